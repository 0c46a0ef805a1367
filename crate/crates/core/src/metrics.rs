//! Class parameters of a polytope: diameter, face inscription sizes and
//! exterior dihedral angles, and membership in the class `Q(N, d, l, α)`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{orthonormal_complement, ConvexPolytope, Vector, TIGHT_TOL};
use crate::lp::{LinearProgram, LpOutcome};

/// Relative slack allowed when comparing computed metrics to class bounds.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// How the angle parameter constrains exterior dihedral angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleBound {
    /// Every exterior angle is at most `α`.
    #[default]
    AtMost,
    /// Every exterior angle is at least `α`.
    AtLeast,
}

/// The class `Q(N, d, l, α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub dim: usize,
    /// Largest admissible diameter.
    pub d: f64,
    /// Smallest admissible face inscription size.
    pub l: f64,
    /// Exterior angle bound, radians.
    pub alpha: f64,
    #[serde(default)]
    pub angle_bound: AngleBound,
}

impl ClassParams {
    pub fn new(dim: usize, d: f64, l: f64, alpha: f64) -> Result<Self> {
        let params = Self {
            dim,
            d,
            l,
            alpha,
            angle_bound: AngleBound::AtMost,
        };
        params.check()?;
        Ok(params)
    }

    pub fn with_angle_bound(mut self, bound: AngleBound) -> Self {
        self.angle_bound = bound;
        self
    }

    pub fn check(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidDimension(self.dim));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::Domain(format!("d must be positive, got {}", self.d)));
        }
        if !(self.l > 0.0 && self.l <= self.d) {
            return Err(Error::Domain(format!(
                "l must lie in (0, d] = (0, {}], got {}",
                self.d, self.l
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < std::f64::consts::PI) {
            return Err(Error::Domain(format!("α must lie in (0, π), got {}", self.alpha)));
        }
        Ok(())
    }
}

/// Smallest angular span of a face over the class: `arcsin((l/d) sin α)`.
pub fn theta_min(params: &ClassParams) -> Result<f64> {
    params.check()?;
    Ok(((params.l / params.d) * params.alpha.sin()).min(1.0).asin())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnglePair {
    pub pair: [usize; 2],
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeMetrics {
    #[serde(with = "crate::float_text")]
    pub diameter: f64,
    pub inscriptions: BTreeMap<usize, crate::float_text::InfFloat>,
    pub exterior_angles: Vec<AnglePair>,
}

impl PolytopeMetrics {
    pub fn min_inscription(&self) -> f64 {
        self.inscriptions
            .values()
            .map(|x| x.0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_angle(&self) -> Option<f64> {
        self.exterior_angles.iter().map(|a| a.angle).reduce(f64::max)
    }

    pub fn min_angle(&self) -> Option<f64> {
        self.exterior_angles.iter().map(|a| a.angle).reduce(f64::min)
    }
}

/// Largest distance between two points of the polytope; `∞` when unbounded.
pub fn diameter(p: &ConvexPolytope) -> Result<f64> {
    if !p.is_bounded() {
        return Ok(f64::INFINITY);
    }
    let points: Vec<Vector> = if p.dim() == 2 {
        p.polygon_boundary()?.vertices
    } else {
        p.vertices()?.into_iter().map(|v| v.point).collect()
    };
    if points.is_empty() {
        return Err(Error::Degenerate("polytope has no vertices".into()));
    }
    let mut best: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max((a - b).norm());
        }
    }
    Ok(best)
}

/// Largest `(N-1)`-disk inside a facet, found in an orthonormal chart of
/// its supporting hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct FacetDisk {
    pub center: Vector,
    /// `∞` when the facet is unbounded.
    pub radius: f64,
}

pub fn chebyshev_facet_disk(p: &ConvexPolytope, facet_id: usize) -> Result<FacetDisk> {
    let j = p.index_of(facet_id)?;
    let n = p.dim();
    let hs = p.halfspaces();
    let hj = &hs[j];
    let chart: DMatrix<f64> = orthonormal_complement(&hj.normal);
    let base: Vector = hj.normal.as_ref() * hj.offset;

    // variables: chart coordinates y (N-1 of them), then r
    let mut objective = vec![0.0; n];
    objective[n - 1] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for (i, h) in hs.iter().enumerate() {
        if i == j {
            continue;
        }
        let a = chart.tr_mul(h.normal.as_ref());
        let c = h.offset - h.normal.dot(&base);
        let norm = a.norm();
        if norm <= TIGHT_TOL {
            // parallel to the facet: either harmless or empties it
            if c < -TIGHT_TOL {
                return Err(Error::Degenerate(format!("facet {facet_id} is empty")));
            }
            continue;
        }
        let mut row: Vec<f64> = a.iter().copied().collect();
        row.push(norm);
        lp.le(row, c);
    }
    match lp.solve() {
        LpOutcome::Optimal { x, value } => {
            if value <= TIGHT_TOL {
                return Err(Error::Degenerate(format!(
                    "facet {facet_id} has no relative interior"
                )));
            }
            let y = Vector::from_column_slice(&x[..n - 1]);
            Ok(FacetDisk {
                center: base + chart * y,
                radius: value,
            })
        }
        LpOutcome::Unbounded => Ok(FacetDisk {
            center: base,
            radius: f64::INFINITY,
        }),
        LpOutcome::Infeasible => Err(Error::Degenerate(format!("facet {facet_id} is empty"))),
    }
}

/// Diameter of the largest disk inscribed in the facet; the edge length
/// when `N = 2`.
pub fn face_inscription_size(p: &ConvexPolytope, facet_id: usize) -> Result<f64> {
    if p.dim() == 2 && p.is_bounded() {
        let boundary = p.polygon_boundary()?;
        return match boundary.edges.iter().position(|&e| e == facet_id) {
            Some(i) => Ok(boundary.edge_length(i)),
            None => {
                p.index_of(facet_id)?;
                Err(Error::Degenerate(format!("facet {facet_id} is not an edge")))
            }
        };
    }
    Ok(2.0 * chebyshev_facet_disk(p, facet_id)?.radius)
}

/// Turning angle between outward normals for every pair of facets that
/// share a ridge.
pub fn exterior_dihedral_angles(p: &ConvexPolytope) -> Result<Vec<AnglePair>> {
    let hs = p.halfspaces();
    let ids = p.facet_ids();
    let angle = |i: usize, j: usize| {
        let (a, b) = (ids[i].min(ids[j]), ids[i].max(ids[j]));
        AnglePair {
            pair: [a, b],
            angle: hs[i].normal.dot(&hs[j].normal).clamp(-1.0, 1.0).acos(),
        }
    };
    let mut out = Vec::new();
    if p.dim() == 2 && p.is_bounded() {
        let boundary = p.polygon_boundary()?;
        let k = boundary.edges.len();
        for e in 0..k {
            let i = p.index_of(boundary.edges[e])?;
            let j = p.index_of(boundary.edges[(e + 1) % k])?;
            out.push(angle(i, j));
        }
    } else {
        for i in 0..hs.len() {
            for j in (i + 1)..hs.len() {
                if shares_ridge(p, i, j) {
                    out.push(angle(i, j));
                }
            }
        }
    }
    out.sort_by_key(|a| a.pair);
    Ok(out)
}

/// Facets `i` and `j` share a ridge when some point on both hyperplanes
/// clears every other constraint by a positive margin.
fn shares_ridge(p: &ConvexPolytope, i: usize, j: usize) -> bool {
    let hs = p.halfspaces();
    let n = p.dim();
    if hs[i].normal.dot(&hs[j].normal) >= 1.0 - TIGHT_TOL {
        return false;
    }
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for k in [i, j] {
        let mut row: Vec<f64> = hs[k].normal.iter().copied().collect();
        row.push(0.0);
        lp.eq(row, hs[k].offset);
    }
    for (k, h) in hs.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        let mut row: Vec<f64> = h.normal.iter().copied().collect();
        row.push(1.0);
        lp.le(row, h.offset);
    }
    let mut cap = vec![0.0; n + 1];
    cap[n] = 1.0;
    lp.le(cap, 1.0);
    matches!(lp.solve(), LpOutcome::Optimal { value, .. } if value > TIGHT_TOL)
}

pub fn polytope_metrics(p: &ConvexPolytope) -> Result<PolytopeMetrics> {
    if p.dim() == 2 && p.is_bounded() {
        return polygon_metrics(p);
    }
    let diameter = diameter(p)?;
    let mut inscriptions = BTreeMap::new();
    for &id in p.facet_ids() {
        inscriptions.insert(id, crate::float_text::InfFloat(face_inscription_size(p, id)?));
    }
    Ok(PolytopeMetrics {
        diameter,
        inscriptions,
        exterior_angles: exterior_dihedral_angles(p)?,
    })
}

/// Bounded polygons: one boundary walk gives every metric.
fn polygon_metrics(p: &ConvexPolytope) -> Result<PolytopeMetrics> {
    let boundary = p.polygon_boundary()?;
    let k = boundary.len();
    if let Some(&id) = p.facet_ids().iter().find(|id| !boundary.edges.contains(id)) {
        return Err(Error::Degenerate(format!("facet {id} is not an edge")));
    }
    let mut diameter: f64 = 0.0;
    for (i, a) in boundary.vertices.iter().enumerate() {
        for b in &boundary.vertices[i + 1..] {
            diameter = diameter.max((a - b).norm());
        }
    }
    let inscriptions = (0..k)
        .map(|i| (boundary.edges[i], crate::float_text::InfFloat(boundary.edge_length(i))))
        .collect();
    let hs = p.halfspaces();
    let mut exterior_angles = Vec::with_capacity(k);
    for e in 0..k {
        let (a, b) = (boundary.edges[e], boundary.edges[(e + 1) % k]);
        let (ha, hb) = (&hs[p.index_of(a)?], &hs[p.index_of(b)?]);
        exterior_angles.push(AnglePair {
            pair: [a.min(b), a.max(b)],
            angle: ha.normal.dot(&hb.normal).clamp(-1.0, 1.0).acos(),
        });
    }
    exterior_angles.sort_by_key(|a| a.pair);
    Ok(PolytopeMetrics {
        diameter,
        inscriptions,
        exterior_angles,
    })
}

/// Outcome of a class-membership test, one flag per criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub member: bool,
    pub diameter_ok: bool,
    pub inscription_ok: bool,
    pub angle_ok: bool,
    pub metrics: PolytopeMetrics,
}

pub fn class_membership(p: &ConvexPolytope, params: &ClassParams) -> Result<MembershipReport> {
    params.check()?;
    crate::error::ensure_dim(params.dim, p.dim())?;
    let metrics = polytope_metrics(p)?;
    Ok(membership_from_metrics(metrics, params))
}

pub fn membership_from_metrics(metrics: PolytopeMetrics, params: &ClassParams) -> MembershipReport {
    let slack = 1.0 + MEMBERSHIP_TOL;
    let diameter_ok = metrics.diameter <= params.d * slack;
    let inscription_ok = metrics.min_inscription() * slack >= params.l;
    let angle_ok = match params.angle_bound {
        AngleBound::AtMost => metrics.max_angle().is_none_or(|a| a <= params.alpha * slack),
        AngleBound::AtLeast => metrics.min_angle().is_none_or(|a| a * slack >= params.alpha),
    };
    MembershipReport {
        member: diameter_ok && inscription_ok && angle_ok,
        diameter_ok,
        inscription_ok,
        angle_ok,
        metrics,
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_relative_eq;

    use super::*;
    use crate::geometry::{cube, regular_polygon, regular_simplex, vector, HalfSpace};

    fn unit_square() -> ConvexPolytope {
        cube(2, 0.0, 1.0)
    }

    fn strip() -> ConvexPolytope {
        ConvexPolytope::new(
            2,
            vec![
                HalfSpace::from_slice(&[0.0, 1.0], 1.0).unwrap(),
                HalfSpace::from_slice(&[0.0, -1.0], 0.0).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn diameters() {
        assert_relative_eq!(diameter(&unit_square()).unwrap(), 2f64.sqrt(), epsilon = 1e-12);
        let thin = ConvexPolytope::new(
            2,
            vec![
                HalfSpace::from_slice(&[1.0, 0.0], 3.0).unwrap(),
                HalfSpace::from_slice(&[-1.0, 0.0], 0.0).unwrap(),
                HalfSpace::from_slice(&[0.0, 1.0], 0.1).unwrap(),
                HalfSpace::from_slice(&[0.0, -1.0], 0.0).unwrap(),
            ],
        )
        .unwrap();
        assert_relative_eq!(diameter(&thin).unwrap(), 9.01f64.sqrt(), epsilon = 1e-12);
        assert_eq!(diameter(&strip()).unwrap(), f64::INFINITY);
        assert_relative_eq!(diameter(&cube(3, 0.0, 1.0)).unwrap(), 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn inscriptions() {
        let sq = unit_square();
        for &id in sq.facet_ids() {
            assert_relative_eq!(face_inscription_size(&sq, id).unwrap(), 1.0, epsilon = 1e-12);
            // the chart LP agrees with the edge length in the plane
            assert_relative_eq!(2.0 * chebyshev_facet_disk(&sq, id).unwrap().radius, 1.0, epsilon = 1e-9);
        }
        let c = cube(3, 0.0, 1.0);
        for &id in c.facet_ids() {
            assert_relative_eq!(face_inscription_size(&c, id).unwrap(), 1.0, epsilon = 1e-9);
        }
        let s = 1.7;
        let tet = regular_simplex(3, s).unwrap();
        for &id in tet.facet_ids() {
            assert_relative_eq!(face_inscription_size(&tet, id).unwrap(), s / 3f64.sqrt(), epsilon = 1e-9);
        }
        assert_eq!(face_inscription_size(&strip(), 0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn chebyshev_center_clears_constraints() {
        let tet = regular_simplex(3, 1.0).unwrap();
        for (k, &id) in tet.facet_ids().iter().enumerate() {
            let disk = chebyshev_facet_disk(&tet, id).unwrap();
            let h = &tet.halfspaces()[k];
            assert!(h.signed_distance(&disk.center).abs() < 1e-9);
            // the disk lives in the facet's hyperplane; other constraints are
            // cleared by r times the in-plane component of their normal
            let chart = orthonormal_complement(&h.normal);
            for (i, g) in tet.halfspaces().iter().enumerate() {
                if i == k {
                    continue;
                }
                let in_plane = chart.tr_mul(g.normal.as_ref()).norm();
                assert!(-g.signed_distance(&disk.center) >= disk.radius * in_plane - 1e-9);
            }
        }
    }

    #[test]
    fn exterior_angles() {
        let sq = exterior_dihedral_angles(&unit_square()).unwrap();
        assert_eq!(sq.len(), 4);
        assert!(sq.iter().all(|a| (a.angle - PI / 2.0).abs() < 1e-12));

        let hex = exterior_dihedral_angles(&regular_polygon(6, 1.0, 0.2).unwrap()).unwrap();
        assert_eq!(hex.len(), 6);
        assert!(hex.iter().all(|a| (a.angle - PI / 3.0).abs() < 1e-12));
        let total: f64 = hex.iter().map(|a| a.angle).sum();
        assert_relative_eq!(total, 2.0 * PI, epsilon = 1e-9);

        let c = exterior_dihedral_angles(&cube(3, 0.0, 1.0)).unwrap();
        assert_eq!(c.len(), 12);
        assert!(c.iter().all(|a| (a.angle - PI / 2.0).abs() < 1e-12));

        assert!(exterior_dihedral_angles(&strip()).unwrap().is_empty());
    }

    #[test]
    fn theta_min_examples() {
        let t = |l, d, a| theta_min(&ClassParams::new(2, d, l, a).unwrap()).unwrap();
        assert_relative_eq!(t(1.0, 2.0, PI / 2.0), PI / 6.0, epsilon = 1e-12);
        assert_relative_eq!(t(1.0, 1.0, PI / 2.0), PI / 2.0, epsilon = 1e-12);
        assert_relative_eq!(t(1.0, 2f64.sqrt(), PI / 2.0), PI / 4.0, epsilon = 1e-12);
        assert!(ClassParams::new(2, 1.0, 2.0, 1.0).is_err());
        assert!(ClassParams::new(2, 1.0, 0.5, PI).is_err());
    }

    #[test]
    fn membership_examples() {
        let sq = unit_square();
        let r = class_membership(&sq, &ClassParams::new(2, 1.5, 0.9, 1.6).unwrap()).unwrap();
        assert!(r.member);
        let r = class_membership(&sq, &ClassParams::new(2, 1.2, 0.9, 1.6).unwrap()).unwrap();
        assert!(!r.member && !r.diameter_ok && r.inscription_ok && r.angle_ok);
        let hex = regular_polygon(6, 1.0, 0.0).unwrap();
        let r = class_membership(&hex, &ClassParams::new(2, 2.0, 1.0, PI / 3.0).unwrap()).unwrap();
        assert!(r.member, "{r:?}");
    }

    #[test]
    fn metrics_scale_and_move() {
        let p = regular_simplex(3, 1.0).unwrap();
        let q = p
            .scaled(2.5)
            .unwrap()
            .translated(&vector(&[0.3, -1.0, 2.0]))
            .unwrap();
        let (a, b) = (polytope_metrics(&p).unwrap(), polytope_metrics(&q).unwrap());
        assert_relative_eq!(b.diameter, 2.5 * a.diameter, epsilon = 1e-9);
        for (id, x) in &a.inscriptions {
            assert_relative_eq!(b.inscriptions[id].0, 2.5 * x.0, epsilon = 1e-9);
        }
        assert_eq!(a.exterior_angles.len(), 6);
        for (x, y) in a.exterior_angles.iter().zip(&b.exterior_angles) {
            assert_relative_eq!(x.angle, y.angle, epsilon = 1e-12);
        }
    }

    #[test]
    fn metrics_json_writes_inf_tokens() {
        let m = polytope_metrics(&strip()).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains(r#""diameter":"inf""#), "{text}");
        let back: PolytopeMetrics = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
