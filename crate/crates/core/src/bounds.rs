//! Closed-form ray counts: the planar pigeonhole bound, the greedy set size
//! bound, the dense-set bound for `N` dimensions, the covering count behind
//! it, and the quantum-dot bound.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{theta_min, ClassParams};

/// Downward nudge applied before every ceiling so exact integers computed
/// with rounding error do not bump up by one.
pub const CEIL_NUDGE: f64 = 1e-9;

fn ceil_nudged(x: f64) -> f64 {
    (x - CEIL_NUDGE).ceil()
}

/// What a ray budget promises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Guarantee {
    /// Every edge hit at least twice and some edge at least three times.
    #[serde(rename = "EACH_EDGE_2_ONE_EDGE_3")]
    EachEdge2OneEdge3,
    /// Every facet hit at least `N` times.
    #[serde(rename = "EACH_FACE_N")]
    EachFaceN,
    /// Enough rays to tell the quantum-dot cell classes apart.
    QdDistinguish,
}

/// Which bound produced a budget, and so which semantics apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Smallest `M` strictly above `⌈4π/θ_min⌉`, evenly spaced rays in the plane.
    PlanarPigeonhole,
    /// Size bound of a greedy `θ_min/6`-dense set; an upper bound on what
    /// the set needs, not a minimum.
    DenseSetSize,
    /// Five rays when the short hexagon edge is detectable.
    QdFiveRays,
    /// Three rays inside the smallest span of two joined long edges.
    QdUndetectableAperture,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayBudget {
    pub m: u64,
    pub guarantee: Guarantee,
    pub provenance: Provenance,
    /// Smallest angular span the count was derived from.
    pub theta_min: f64,
    /// Density radius to hand to greedy placement, when the budget is for a
    /// dense set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    /// The real-valued expression before rounding.
    pub raw: f64,
}

/// Aperture `a` and width `w` of a quantum-dot hexagon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QDGeometry {
    pub a: f64,
    pub w: f64,
}

impl QDGeometry {
    pub fn new(a: f64, w: f64) -> Result<Self> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Domain(format!("width must be positive, got {w}")));
        }
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("aperture must be non-negative, got {a}")));
        }
        Ok(Self { a, w })
    }

    pub fn ratio(&self) -> f64 {
        self.a / self.w
    }
}

/// Evenly spaced rays in the plane that hit every edge of every polygon in
/// the class twice and some edge three times.
pub fn rays_2d(params: &ClassParams) -> Result<RayBudget> {
    if params.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: params.dim,
        });
    }
    let theta = theta_min(params)?;
    let raw = 4.0 * PI / theta;
    Ok(RayBudget {
        m: ceil_nudged(raw) as u64 + 1,
        guarantee: Guarantee::EachEdge2OneEdge3,
        provenance: Provenance::PlanarPigeonhole,
        theta_min: theta,
        phi: None,
        raw,
    })
}

/// `√(2πN) (1/sin(φ/2))^(N-1)`: the most points greedy placement can place
/// at density radius `φ`.
pub fn greedy_count_bound(n: usize, phi: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if !(phi > 0.0 && phi <= PI) {
        return Err(Error::Domain(format!("φ must lie in (0, π], got {phi}")));
    }
    let nf = n as f64;
    Ok((2.0 * PI * nf).sqrt() * (1.0 / (phi / 2.0).sin()).powi(n as i32 - 1))
}

/// Size bound of the `θ_min/6`-dense greedy set, which hits every face of
/// every polytope in the class at least `N` times.
pub fn rays_nd(params: &ClassParams) -> Result<RayBudget> {
    let theta = theta_min(params)?;
    let phi = theta / 6.0;
    let raw = greedy_count_bound(params.dim, phi)?;
    Ok(RayBudget {
        m: raw.floor() as u64,
        guarantee: Guarantee::EachFaceN,
        provenance: Provenance::DenseSetSize,
        theta_min: theta,
        phi: Some(phi),
        raw,
    })
}

/// Lower estimate `(2 sinc(θ_min/3))^(N-1)` of how many disjoint
/// `θ_min/6`-caps fit in a `θ_min/3`-cap.
pub fn covering_count(n: usize, theta_min: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if !(theta_min > 0.0 && theta_min <= PI / 2.0) {
        return Err(Error::Domain(format!("θ_min must lie in (0, π/2], got {theta_min}")));
    }
    let x = theta_min / 3.0;
    Ok((2.0 * x.sin() / x).powi(n as i32 - 1))
}

/// Smallest span of two joined long hexagon edges:
/// `arccos((-1 + r²)/(1 + r²))` with `r = a/w`.
pub fn qd_theta_min(g: &QDGeometry) -> f64 {
    let r2 = g.ratio() * g.ratio();
    ((-1.0 + r2) / (1.0 + r2)).clamp(-1.0, 1.0).acos()
}

/// Rays needed to tell the quantum-dot cell classes apart.
pub fn rays_qd(g: &QDGeometry, aperture_detectable: bool) -> Result<RayBudget> {
    let g = QDGeometry::new(g.a, g.w)?;
    let theta = qd_theta_min(&g);
    if aperture_detectable {
        return Ok(RayBudget {
            m: 5,
            guarantee: Guarantee::QdDistinguish,
            provenance: Provenance::QdFiveRays,
            theta_min: PI,
            phi: None,
            raw: 5.0,
        });
    }
    let raw = 6.0 * PI / theta;
    Ok(RayBudget {
        m: ceil_nudged(raw) as u64,
        guarantee: Guarantee::QdDistinguish,
        provenance: Provenance::QdUndetectableAperture,
        theta_min: theta,
        phi: None,
        raw,
    })
}
