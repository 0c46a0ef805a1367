//! Geometry on the unit sphere `S^(N-1)`: distances, cap areas and the
//! placement of direction sets.

mod greedy;
mod index;
mod special;

pub use greedy::{
    place_greedy, place_greedy_with, verify_density, CandidateOracle, DensityCertificate,
    DensityReport, GreedyConfig, HoleSeekingOracle, UniformOracle, MAX_WITNESSES,
};
pub use index::DirectionIndex;
pub use special::{adaptive_simpson, gamma, sin_power_integral};

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::geometry::{planar, unit, vector, UnitDirection};

/// Great-circle distance in `[0, π]`.
pub fn great_circle_distance(v: &UnitDirection, w: &UnitDirection) -> Result<f64> {
    ensure_dim(v.len(), w.len())?;
    Ok(v.dot(w).clamp(-1.0, 1.0).acos())
}

fn check_sphere_dim(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidDimension(n))
    } else {
        Ok(())
    }
}

/// Surface area of `S^(N-1)`: `N π^(N/2) / Γ(N/2 + 1)`.
pub fn sphere_area(n: usize) -> Result<f64> {
    check_sphere_dim(n)?;
    let nf = n as f64;
    Ok(nf * PI.powf(nf / 2.0) / gamma(nf / 2.0 + 1.0))
}

/// Area of a closed cap of angular radius `r` on `S^(N-1)`.
pub fn ball_area(n: usize, r: f64) -> Result<f64> {
    check_sphere_dim(n)?;
    if !(r > 0.0 && r <= PI) {
        return Err(Error::Domain(format!("cap radius must lie in (0, π], got {r}")));
    }
    let m = (n - 1) as f64;
    let coefficient = m * PI.powf(m / 2.0) / gamma(m / 2.0 + 1.0);
    Ok(coefficient * sin_power_integral((n - 2) as u32, r))
}

/// Closed-form lower and upper bounds on [`ball_area`] for `0 < r <= π/2`.
pub fn ball_area_bounds(n: usize, r: f64) -> Result<(f64, f64)> {
    check_sphere_dim(n)?;
    if !(r > 0.0 && r <= PI / 2.0) {
        return Err(Error::Domain(format!("cap radius must lie in (0, π/2], got {r}")));
    }
    let m = (n - 1) as f64;
    let coefficient = PI.powf(m / 2.0) / gamma((n as f64 + 1.0) / 2.0);
    Ok((coefficient * r.sin().powf(m), coefficient * r.powf(m)))
}

/// Closed cap `{w : dist(center, w) <= radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalBall {
    pub center: UnitDirection,
    pub radius: f64,
}

impl SphericalBall {
    pub fn new(center: UnitDirection, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= PI) {
            return Err(Error::Domain(format!("cap radius must lie in (0, π], got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, w: &UnitDirection) -> Result<bool> {
        Ok(great_circle_distance(&self.center, w)? <= self.radius)
    }

    pub fn area(&self) -> Result<f64> {
        ball_area(self.center.len(), self.radius)
    }
}

/// Ordered directions on `S^(dim-1)`, with the density radius they were
/// placed or verified at.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    pub dim: usize,
    pub directions: Vec<UnitDirection>,
    pub density_radius: Option<f64>,
    pub seed: Option<u64>,
    pub certificate: Option<DensityCertificate>,
}

impl DirectionSet {
    pub fn new(dim: usize, directions: Vec<UnitDirection>) -> Result<Self> {
        check_sphere_dim(dim)?;
        for d in &directions {
            ensure_dim(dim, d.len())?;
        }
        Ok(Self {
            dim,
            directions,
            density_radius: None,
            seed: None,
            certificate: None,
        })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Smallest great-circle distance over all pairs (`π` for fewer than two).
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = PI;
        for (i, a) in self.directions.iter().enumerate() {
            for b in &self.directions[i + 1..] {
                best = best.min(a.dot(b).clamp(-1.0, 1.0).acos());
            }
        }
        best
    }

    pub fn to_file(&self) -> DirectionSetFile {
        DirectionSetFile {
            dim: self.dim,
            phi: self.density_radius,
            seed: self.seed,
            directions: self
                .directions
                .iter()
                .map(|d| d.iter().copied().collect())
                .collect(),
            certificate: self.certificate.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<DirectionSetFile>(text)?.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Format(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }
}

/// `{"dim": N, "phi": r|null, "seed": s|null, "directions": [[..], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSetFile {
    pub dim: usize,
    pub phi: Option<f64>,
    pub seed: Option<u64>,
    pub directions: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<DensityCertificate>,
}

impl TryFrom<DirectionSetFile> for DirectionSet {
    type Error = Error;

    fn try_from(file: DirectionSetFile) -> Result<Self> {
        let directions = file
            .directions
            .iter()
            .map(|coords| {
                let v = vector(coords);
                // keep exact bits of vectors that are already unit
                if (v.norm() - 1.0).abs() <= 1e-12 {
                    Ok(UnitDirection::new_unchecked(v))
                } else {
                    unit(v)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut set = DirectionSet::new(file.dim, directions)?;
        set.density_radius = file.phi;
        set.seed = file.seed;
        set.certificate = file.certificate;
        Ok(set)
    }
}

/// `M` evenly spaced directions on the circle at angles `v0 + 2πi/M`, `i = 1..=M`.
pub fn place_uniform_circle(m: usize, v0: f64) -> Result<DirectionSet> {
    if m < 1 {
        return Err(Error::Domain("need at least one direction".into()));
    }
    let step = 2.0 * PI / m as f64;
    let directions = (1..=m).map(|i| planar(v0 + step * i as f64)).collect();
    let mut set = DirectionSet::new(2, directions)?;
    set.density_radius = Some(PI / m as f64);
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_from;

    #[test]
    fn distance_examples() {
        let v = unit_from(&[1.0, 0.0, 0.0]).unwrap();
        let w = unit_from(&[0.0, 1.0, 0.0]).unwrap();
        let minus = unit_from(&[-1.0, 0.0, 0.0]).unwrap();
        assert_eq!(great_circle_distance(&v, &v).unwrap(), 0.0);
        assert!((great_circle_distance(&v, &minus).unwrap() - PI).abs() < 1e-15);
        assert!((great_circle_distance(&v, &w).unwrap() - PI / 2.0).abs() < 1e-15);
        let planar = unit_from(&[1.0, 0.0]).unwrap();
        assert!(great_circle_distance(&v, &planar).is_err());
    }

    #[test]
    fn sphere_area_examples() {
        assert!((sphere_area(2).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_area(3).unwrap() - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_area(4).unwrap() - 2.0 * PI * PI).abs() < 1e-12);
        assert!(sphere_area(1).is_err());
    }

    #[test]
    fn ball_area_examples() {
        assert!((ball_area(3, PI / 2.0).unwrap() - 2.0 * PI).abs() < 1e-10);
        assert!((ball_area(3, PI).unwrap() - 4.0 * PI).abs() < 1e-10);
        assert!((ball_area(2, 0.3).unwrap() - 0.6).abs() < 1e-14);
        assert!(ball_area(3, 0.0).is_err());
        assert!(ball_area(3, 3.5).is_err());
    }

    #[test]
    fn ball_area_bound_examples() {
        let (lo, hi) = ball_area_bounds(3, PI / 2.0).unwrap();
        assert!((lo - PI).abs() < 1e-12);
        assert!((hi - PI * (PI / 2.0).powi(2)).abs() < 1e-12);
        assert!(lo < 2.0 * PI && 2.0 * PI < hi);

        let (lo, hi) = ball_area_bounds(2, 0.3).unwrap();
        assert!((lo - 2.0 * 0.3f64.sin()).abs() < 1e-14);
        assert!((hi - 0.6).abs() < 1e-14);

        let (lo, hi) = ball_area_bounds(4, 0.5).unwrap();
        let exact = ball_area(4, 0.5).unwrap();
        assert!(lo < exact && exact < hi);
    }

    #[test]
    fn uniform_circle_examples() {
        let s = place_uniform_circle(4, 0.0).unwrap();
        let expected = [PI / 2.0, PI, 3.0 * PI / 2.0, 2.0 * PI];
        for (d, a) in s.directions.iter().zip(expected) {
            assert!((d[0] - a.cos()).abs() < 1e-15 && (d[1] - a.sin()).abs() < 1e-15);
        }
        let s = place_uniform_circle(2, 0.0).unwrap();
        assert!((s.directions[0].dot(&s.directions[1]) + 1.0).abs() < 1e-15);
        let s = place_uniform_circle(6, 0.1).unwrap();
        for i in 0..6 {
            let gap = great_circle_distance(&s.directions[i], &s.directions[(i + 1) % 6]).unwrap();
            assert!((gap - PI / 3.0).abs() < 1e-12);
        }
        assert_eq!(s.density_radius, Some(PI / 6.0));
        assert!(place_uniform_circle(0, 0.0).is_err());
    }

    #[test]
    fn greedy_examples() {
        let mut oracle = UniformOracle::new(2, 1);
        let s = place_greedy(2, PI / 3.0, 1, &mut oracle).unwrap();
        assert!((3..=6).contains(&s.len()), "{}", s.len());
        assert!(s.min_pairwise_distance() > PI / 3.0);

        let mut oracle = UniformOracle::new(2, 2);
        assert_eq!(place_greedy(2, PI, 2, &mut oracle).unwrap().len(), 1);

        let mut oracle = UniformOracle::new(3, 3);
        let s = place_greedy(3, PI / 6.0, 3, &mut oracle).unwrap();
        assert!(s.len() <= 64, "{}", s.len());
        assert!(verify_density(&s, PI / 6.0, 100_000, 99).pass);
    }

    #[test]
    fn exhausted_oracle_is_an_error() {
        let mut oracle = UniformOracle::new(3, 4).with_budget(10);
        let err = place_greedy(3, PI / 6.0, 4, &mut oracle).unwrap_err();
        assert!(matches!(err, Error::OracleExhausted { .. }));
    }

    #[test]
    fn verify_density_examples() {
        let single = DirectionSet::new(3, vec![unit_from(&[0.0, 0.0, 1.0]).unwrap()]).unwrap();
        let report = verify_density(&single, PI / 4.0, 10_000, 5);
        assert!(!report.pass);
        assert!(report.max_observed_gap > 3.0);

        let circle = place_uniform_circle(6, 0.0).unwrap();
        let report = verify_density(&circle, PI / 6.0, 10_000, 6);
        assert!(report.pass);
        assert!(report.max_observed_gap <= PI / 6.0 + 1e-12);
    }

    #[test]
    fn direction_file_round_trip() {
        let mut oracle = UniformOracle::new(3, 8);
        let s = place_greedy(3, PI / 4.0, 8, &mut oracle).unwrap();
        let back = DirectionSet::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(s, back);
    }
}
