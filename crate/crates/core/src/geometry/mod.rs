//! Vectors, rays and half-space polytopes with exact first-exit queries.

mod io;
mod shapes;
mod vertices;

pub use io::{HalfSpaceRecord, PolytopeFile};
pub use shapes::{
    cube, hypercube, polygon_from_vertices, prism, prism_over, regular_polygon, regular_simplex,
    simplex_inradius,
};
pub use vertices::{PolygonBoundary, Vertex};

use nalgebra::{DMatrix, DVector, Unit};

use crate::error::{ensure_dim, Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};

pub type Vector = DVector<f64>;
pub type UnitDirection = Unit<DVector<f64>>;

/// Absolute tolerance for tightness tests.
pub const TIGHT_TOL: f64 = 1e-9;
/// Required clearance between a ray origin and every bounding hyperplane.
pub const INTERIOR_MARGIN: f64 = 1e-12;

pub fn vector(coords: &[f64]) -> Vector {
    DVector::from_column_slice(coords)
}

/// Normalizes `v`, rejecting zero and non-finite input.
pub fn unit(v: Vector) -> Result<UnitDirection> {
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("direction"));
    }
    let norm = v.norm();
    if norm <= 1e-300 {
        return Err(Error::Degenerate("zero-length direction".into()));
    }
    Ok(Unit::new_unchecked(v / norm))
}

pub fn unit_from(coords: &[f64]) -> Result<UnitDirection> {
    unit(vector(coords))
}

/// Unit vector at angle `angle` in the plane.
pub fn planar(angle: f64) -> UnitDirection {
    Unit::new_unchecked(vector(&[angle.cos(), angle.sin()]))
}

/// Orthonormal basis of the complement of `n`, as the last `N-1` columns of
/// the Householder reflection sending `n` to the first basis vector.
pub fn orthonormal_complement(n: &UnitDirection) -> DMatrix<f64> {
    let dim = n.len();
    let mut u = n.clone_owned();
    // reflect n onto ±e_0, choosing the sign that avoids cancellation
    let sign = if u[0] >= 0.0 { 1.0 } else { -1.0 };
    u[0] += sign;
    let uu = u.norm_squared();
    let h = DMatrix::identity(dim, dim) - (&u * u.transpose()) * (2.0 / uu);
    h.columns(1, dim - 1).into_owned()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    pub origin: Vector,
    pub direction: UnitDirection,
}

impl Ray {
    pub fn new(origin: Vector, direction: UnitDirection) -> Result<Self> {
        ensure_dim(origin.len(), direction.len())?;
        if origin.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("ray origin"));
        }
        Ok(Self { origin, direction })
    }

    pub fn at(&self, t: f64) -> Vector {
        &self.origin + self.direction.as_ref() * t
    }
}

/// `{x : <x, normal> <= offset}` with a unit outward normal.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: UnitDirection,
    pub offset: f64,
}

impl HalfSpace {
    /// Builds from a possibly unnormalized normal, rescaling the offset.
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        if !offset.is_finite() {
            return Err(Error::NonFinite("half-space offset"));
        }
        let norm = normal.norm();
        let normal = unit(normal)?;
        Ok(Self {
            normal,
            offset: offset / norm,
        })
    }

    pub fn from_slice(normal: &[f64], offset: f64) -> Result<Self> {
        Self::new(vector(normal), offset)
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `<x, n> - offset`; negative inside.
    pub fn signed_distance(&self, x: &Vector) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExitRecord {
    /// Exit distance, or `f64::INFINITY` when the ray escapes or passes the cutoff.
    pub t: f64,
    pub facet_ids: Vec<usize>,
}

impl ExitRecord {
    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    /// Pairs of facet ids describing the same half-space.
    pub duplicates: Vec<(usize, usize)>,
    /// Facet ids whose hyperplane does not support a facet.
    pub redundant: Vec<usize>,
    pub unbounded: bool,
    pub empty: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.duplicates.is_empty() && self.redundant.is_empty() && !self.empty
    }
}

/// Intersection of half-spaces in `R^dim`, each carrying a stable facet id.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolytope {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
    facet_ids: Vec<usize>,
}

impl ConvexPolytope {
    /// Facet ids are assigned `0..halfspaces.len()`.
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace>) -> Result<Self> {
        let ids = (0..halfspaces.len()).collect();
        Self::with_ids(dim, halfspaces, ids)
    }

    pub fn with_ids(dim: usize, halfspaces: Vec<HalfSpace>, facet_ids: Vec<usize>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if facet_ids.len() != halfspaces.len() {
            return Err(Error::Shape(format!(
                "{} facet ids for {} half-spaces",
                facet_ids.len(),
                halfspaces.len()
            )));
        }
        let mut sorted = facet_ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Shape("facet ids must be distinct".into()));
        }
        for h in &halfspaces {
            ensure_dim(dim, h.dim())?;
        }
        Ok(Self {
            dim,
            halfspaces,
            facet_ids,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn facet_ids(&self) -> &[usize] {
        &self.facet_ids
    }

    pub fn len(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfspaces.is_empty()
    }

    /// Index of the half-space carrying `facet_id`.
    pub fn index_of(&self, facet_id: usize) -> Result<usize> {
        self.facet_ids
            .iter()
            .position(|&f| f == facet_id)
            .ok_or(Error::UnknownFacet(facet_id))
    }

    pub fn facet(&self, facet_id: usize) -> Result<&HalfSpace> {
        Ok(&self.halfspaces[self.index_of(facet_id)?])
    }

    /// Same polytope without the listed facets (ids of the rest are kept).
    pub fn without(&self, removed: &[usize]) -> Result<Self> {
        let (hs, ids) = self
            .halfspaces
            .iter()
            .zip(&self.facet_ids)
            .filter(|(_, id)| !removed.contains(id))
            .map(|(h, &id)| (h.clone(), id))
            .unzip();
        Self::with_ids(self.dim, hs, ids)
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        ensure_dim(self.dim, x.len())?;
        Ok(self
            .halfspaces
            .iter()
            .all(|h| h.normal.dot(x) <= h.offset + tol))
    }

    /// True when `x` clears every hyperplane by the interiority margin.
    pub fn is_interior(&self, x: &Vector) -> Result<bool> {
        self.contains(x, -INTERIOR_MARGIN)
    }

    pub fn ray_exit(&self, ray: &Ray, cutoff: f64) -> Result<ExitRecord> {
        self.ray_exit_with_tol(ray, cutoff, TIGHT_TOL)
    }

    /// First boundary crossing along `ray`. Every facet tight at the exit
    /// point within `tol` is reported.
    pub fn ray_exit_with_tol(&self, ray: &Ray, cutoff: f64, tol: f64) -> Result<ExitRecord> {
        ensure_dim(self.dim, ray.origin.len())?;
        if !(cutoff > 0.0) {
            return Err(Error::Domain(format!("cutoff must be positive, got {cutoff}")));
        }
        if !self.is_interior(&ray.origin)? {
            return Err(Error::OriginNotInterior);
        }
        Ok(self.exit_unchecked(&ray.origin, &ray.direction, cutoff, tol))
    }

    /// Exit query without argument validation; `origin` must be interior.
    pub(crate) fn exit_unchecked(
        &self,
        origin: &Vector,
        direction: &Vector,
        cutoff: f64,
        tol: f64,
    ) -> ExitRecord {
        let mut t = f64::INFINITY;
        let mut slack = Vec::with_capacity(self.halfspaces.len());
        for h in &self.halfspaces {
            let denom = h.normal.dot(direction);
            let gap = h.offset - h.normal.dot(origin);
            slack.push((denom, gap));
            if denom > 0.0 {
                t = t.min(gap / denom);
            }
        }
        if !(t <= cutoff) {
            return ExitRecord {
                t: f64::INFINITY,
                facet_ids: Vec::new(),
            };
        }
        let facet_ids = slack
            .iter()
            .zip(&self.facet_ids)
            .filter(|((denom, gap), _)| *denom > 0.0 && (gap - t * denom).abs() <= tol)
            .map(|(_, &id)| id)
            .collect();
        ExitRecord { t, facet_ids }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let k = self.halfspaces.len();
        let mut duplicate_of = vec![false; k * k];
        for i in 0..k {
            for j in (i + 1)..k {
                let (a, b) = (&self.halfspaces[i], &self.halfspaces[j]);
                let same_normal = (a.normal.as_ref() - b.normal.as_ref()).amax() <= TIGHT_TOL;
                if same_normal && (a.offset - b.offset).abs() <= TIGHT_TOL {
                    report.duplicates.push((self.facet_ids[i], self.facet_ids[j]));
                    duplicate_of[i * k + j] = true;
                    duplicate_of[j * k + i] = true;
                }
            }
        }

        report.empty = !self.is_feasible();
        if report.empty {
            report.redundant = self.facet_ids.clone();
            return report;
        }
        for j in 0..k {
            let others: Vec<usize> = (0..k).filter(|&i| i != j && !duplicate_of[j * k + i]).collect();
            if self.facet_witness_slack(j, &others) <= TIGHT_TOL {
                report.redundant.push(self.facet_ids[j]);
            }
        }
        report.unbounded = self.recession_direction().is_some();
        report
    }

    pub fn is_bounded(&self) -> bool {
        self.recession_direction().is_none()
    }

    fn is_feasible(&self) -> bool {
        let mut lp = LinearProgram::maximize(vec![0.0; self.dim]);
        for h in &self.halfspaces {
            lp.le(h.normal.iter().copied().collect(), h.offset);
        }
        matches!(lp.solve(), LpOutcome::Optimal { .. })
    }

    /// Largest uniform clearance `s <= 1` from the other constraints that a
    /// point on hyperplane `j` can have.
    fn facet_witness_slack(&self, j: usize, others: &[usize]) -> f64 {
        let n = self.dim;
        let mut objective = vec![0.0; n + 1];
        objective[n] = 1.0;
        let mut lp = LinearProgram::maximize(objective);
        let hj = &self.halfspaces[j];
        let mut row: Vec<f64> = hj.normal.iter().copied().collect();
        row.push(0.0);
        lp.eq(row, hj.offset);
        for &i in others {
            let h = &self.halfspaces[i];
            let mut row: Vec<f64> = h.normal.iter().copied().collect();
            row.push(1.0);
            lp.le(row, h.offset);
        }
        let mut cap = vec![0.0; n + 1];
        cap[n] = 1.0;
        lp.le(cap, 1.0);
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => value,
            _ => f64::NEG_INFINITY,
        }
    }

    /// Some nonzero `v` with `<v, n_j> <= 0` for every facet, if one exists.
    pub fn recession_direction(&self) -> Option<Vector> {
        let n = self.dim;
        for k in 0..n {
            for sign in [1.0, -1.0] {
                let mut objective = vec![0.0; n];
                objective[k] = sign;
                let mut lp = LinearProgram::maximize(objective);
                for h in &self.halfspaces {
                    lp.le(h.normal.iter().copied().collect(), 0.0);
                }
                for c in 0..n {
                    let mut row = vec![0.0; n];
                    row[c] = 1.0;
                    lp.le(row.clone(), 1.0);
                    lp.add(row, Relation::Ge, -1.0);
                }
                if let LpOutcome::Optimal { x, value } = lp.solve() {
                    if value > TIGHT_TOL {
                        return Some(vector(&x));
                    }
                }
            }
        }
        None
    }

    /// Axis-aligned bounding box `(lo, hi)`; `None` when unbounded or empty.
    pub fn bounding_box(&self) -> Option<(Vector, Vector)> {
        let n = self.dim;
        let mut lo = Vector::zeros(n);
        let mut hi = Vector::zeros(n);
        for k in 0..n {
            for sign in [1.0, -1.0] {
                let mut objective = vec![0.0; n];
                objective[k] = sign;
                let mut lp = LinearProgram::maximize(objective);
                for h in &self.halfspaces {
                    lp.le(h.normal.iter().copied().collect(), h.offset);
                }
                let LpOutcome::Optimal { value, .. } = lp.solve() else {
                    return None;
                };
                if sign > 0.0 {
                    hi[k] = value;
                } else {
                    lo[k] = -value;
                }
            }
        }
        Some((lo, hi))
    }

    /// Uniform interior point by rejection from the bounding box.
    pub fn sample_interior<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Result<Vector> {
        let (lo, hi) = self.bounding_box().ok_or(Error::Unbounded)?;
        for _ in 0..100_000 {
            let x = Vector::from_fn(self.dim, |k, _| rng.random_range(lo[k]..=hi[k]));
            if self.is_interior(&x)? {
                return Ok(x);
            }
        }
        Err(Error::Degenerate("no interior point found by sampling".into()))
    }

    /// Applies `x -> rotation * x + translation` to the region.
    pub fn transformed(&self, rotation: &DMatrix<f64>, translation: &Vector) -> Result<Self> {
        ensure_dim(self.dim, rotation.nrows())?;
        ensure_dim(self.dim, rotation.ncols())?;
        ensure_dim(self.dim, translation.len())?;
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| {
                let normal = rotation * h.normal.as_ref();
                let offset = h.offset + normal.dot(translation);
                HalfSpace::new(normal, offset)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_ids(self.dim, halfspaces, self.facet_ids.clone())
    }

    pub fn translated(&self, translation: &Vector) -> Result<Self> {
        self.transformed(&DMatrix::identity(self.dim, self.dim), translation)
    }

    /// Uniform scaling about the origin by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!("scale must be positive, got {s}")));
        }
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| HalfSpace {
                normal: h.normal.clone(),
                offset: h.offset * s,
            })
            .collect();
        Self::with_ids(self.dim, halfspaces, self.facet_ids.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexPolytope {
        cube(2, 0.0, 1.0)
    }

    #[test]
    fn contains_examples() {
        let p = square();
        assert!(p.contains(&vector(&[0.5, 0.5]), 0.0).unwrap());
        assert!(!p.contains(&vector(&[1.5, 0.5]), 0.0).unwrap());
        assert!(p.contains(&vector(&[1.0, 0.5]), 1e-9).unwrap());
        assert!(matches!(
            p.contains(&vector(&[0.5, 0.5, 0.5]), 0.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ray_exit_examples() {
        let p = square();
        let o = vector(&[0.5, 0.5]);
        let r = p
            .ray_exit(&Ray::new(o.clone(), unit_from(&[1.0, 0.0]).unwrap()).unwrap(), 10.0)
            .unwrap();
        assert!((r.t - 0.5).abs() < 1e-15);
        assert_eq!(r.facet_ids.len(), 1);
        assert_eq!(p.facet(r.facet_ids[0]).unwrap().normal[0], 1.0);

        let r = p
            .ray_exit(&Ray::new(o, unit_from(&[1.0, 1.0]).unwrap()).unwrap(), 10.0)
            .unwrap();
        assert!((r.t - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.facet_ids.len(), 2);

        let half = ConvexPolytope::new(2, vec![HalfSpace::from_slice(&[1.0, 0.0], 1.0).unwrap()]).unwrap();
        let r = half
            .ray_exit(&Ray::new(vector(&[0.0, 0.0]), unit_from(&[-1.0, 0.0]).unwrap()).unwrap(), 10.0)
            .unwrap();
        assert!(r.t.is_infinite() && r.facet_ids.is_empty());
    }

    #[test]
    fn cutoff_and_interiority() {
        let p = square();
        let ray = Ray::new(vector(&[0.5, 0.5]), unit_from(&[1.0, 0.0]).unwrap()).unwrap();
        assert!(p.ray_exit(&ray, 0.4).unwrap().t.is_infinite());
        let boundary = Ray::new(vector(&[1.0, 0.5]), unit_from(&[1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(p.ray_exit(&boundary, 1.0), Err(Error::OriginNotInterior));
    }

    #[test]
    fn loader_normalizes_normals() {
        let h = HalfSpace::from_slice(&[2.0, 0.0], 4.0).unwrap();
        assert_eq!(h.normal[0], 1.0);
        assert_eq!(h.offset, 2.0);
    }

    #[test]
    fn validate_examples() {
        let p = square();
        let report = p.validate();
        assert!(report.is_valid());
        assert!(!report.unbounded);

        let mut hs = p.halfspaces().to_vec();
        hs.push(HalfSpace::from_slice(&[1.0, 0.0], 1.0).unwrap());
        let report = ConvexPolytope::new(2, hs).unwrap().validate();
        assert_eq!(report.duplicates.len(), 1);
        assert!(report.redundant.is_empty());

        let strip = ConvexPolytope::new(
            2,
            vec![
                HalfSpace::from_slice(&[0.0, 1.0], 1.0).unwrap(),
                HalfSpace::from_slice(&[0.0, -1.0], 0.0).unwrap(),
            ],
        )
        .unwrap();
        let report = strip.validate();
        assert!(report.is_valid());
        assert!(report.unbounded);
    }

    #[test]
    fn validate_flags_redundant_and_empty() {
        let mut hs = square().halfspaces().to_vec();
        hs.push(HalfSpace::from_slice(&[1.0, 1.0], 5.0).unwrap());
        let report = ConvexPolytope::new(2, hs).unwrap().validate();
        assert_eq!(report.redundant, vec![4]);

        let empty = ConvexPolytope::new(
            2,
            vec![
                HalfSpace::from_slice(&[1.0, 0.0], -1.0).unwrap(),
                HalfSpace::from_slice(&[-1.0, 0.0], -1.0).unwrap(),
            ],
        )
        .unwrap();
        assert!(empty.validate().empty);
    }

    #[test]
    fn complement_is_orthonormal() {
        for coords in [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.3, -0.4, 0.8]] {
            let n = unit_from(&coords).unwrap();
            let b = orthonormal_complement(&n);
            assert!((b.transpose() * &b - DMatrix::identity(2, 2)).amax() < 1e-14);
            assert!((b.transpose() * n.as_ref()).amax() < 1e-14);
        }
    }
}
