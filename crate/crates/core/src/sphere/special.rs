//! Gamma function and the sine-power integral behind spherical cap areas.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos approximation of Γ(x) (g = 7, nine terms), with reflection below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// ∫₀^r sinᵏ(ρ) dρ for `r <= π` by adaptive Simpson quadrature to `1e-12`
/// relative.
pub fn sin_power_integral(k: u32, r: f64) -> f64 {
    if k == 0 {
        return r;
    }
    if r <= 0.0 {
        return 0.0;
    }
    if k == 1 {
        return 2.0 * (0.5 * r).sin().powi(2);
    }
    let f = |x: f64| x.sin().powi(k as i32);
    // sin(tx) >= t sin(x) on [0, π/2]; the last 1/k of that range bounds the
    // integral below within a factor of about e·k
    let m = r.min(PI / 2.0);
    let kf = k as f64;
    let floor = m / kf * ((1.0 - 1.0 / kf) * m.sin()).powi(k as i32);
    adaptive_simpson(&f, 0.0, r, 1e-12 * floor.max(f64::MIN_POSITIVE))
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_matches_factorials_and_half_integers() {
        let mut fact = 1.0;
        for n in 1..30 {
            let rel = (gamma(n as f64) - fact).abs() / fact;
            assert!(rel < 1e-13, "Γ({n}) rel err {rel}");
            fact *= n as f64;
        }
        // Γ(n + 1/2) = (2n)! √π / (4ⁿ n!)
        let mut g = PI.sqrt();
        for n in 0..30 {
            let x = n as f64 + 0.5;
            let rel = (gamma(x) - g).abs() / g;
            assert!(rel < 1e-13, "Γ({x}) rel err {rel}");
            g *= x;
        }
    }

    #[test]
    fn sine_integrals_have_closed_forms() {
        assert!((sin_power_integral(1, PI) - 2.0).abs() < 1e-12);
        assert!((sin_power_integral(2, PI) - PI / 2.0).abs() < 1e-12);
        assert!((sin_power_integral(3, PI / 2.0) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(sin_power_integral(0, 0.3), 0.3);
    }

    #[test]
    fn small_caps_in_high_dimension_are_relatively_accurate() {
        let r = PI / 40.0;
        let n = 4000;
        let h = r / n as f64;
        for k in 1..=30u32 {
            let f = |x: f64| x.sin().powi(k as i32);
            let mut sum = f(0.0) + f(r);
            for i in 1..n {
                sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let composite = sum * h / 3.0;
            let got = sin_power_integral(k, r);
            assert!((got - composite).abs() / composite < 1e-10, "k = {k}: {got} vs {composite}");
        }
    }
}
