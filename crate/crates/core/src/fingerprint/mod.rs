//! Point fingerprints: exit distances from one observation point along an
//! ordered set of directions, plus per-facet hit accounting.

mod reconstruct;
mod verify;

pub use reconstruct::{reconstruct_2d, Ambiguity, ReconstructedPolygon, COLLINEAR_REL_TOL};
pub use verify::{
    adversarial_points, dense_direction_set, verify_theorem1, verify_theorem1_with, verify_theorem2,
    verify_theorem2_with, DenseBoundReport, FamilyReport, HitViolation, PlanarBoundReport,
    PlanarCheckConfig, ShapeFamily, SpatialCheckConfig,
};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::geometry::{ConvexPolytope, Vector, TIGHT_TOL};
use crate::sphere::{DirectionSet, DirectionSetFile};

#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    pub observation_point: Vector,
    pub directions: DirectionSet,
    /// Exit distance per direction, `∞` beyond the cutoff.
    pub distances: Vec<f64>,
    pub cutoff: f64,
    /// Facets tight at each exit point; empty for `∞` entries.
    pub hit_facets: Vec<Vec<usize>>,
}

/// Fingerprint of `p` seen from `x_o` along `dirs`, cut off at `cutoff`.
pub fn fingerprint(
    p: &ConvexPolytope,
    x_o: &Vector,
    dirs: &DirectionSet,
    cutoff: f64,
) -> Result<Fingerprint> {
    ensure_dim(p.dim(), x_o.len())?;
    ensure_dim(p.dim(), dirs.dim)?;
    if !(cutoff > 0.0) {
        return Err(Error::Domain(format!("cutoff must be positive, got {cutoff}")));
    }
    if !p.is_interior(x_o)? {
        return Err(Error::OriginNotInterior);
    }
    let mut distances = Vec::with_capacity(dirs.len());
    let mut hit_facets = Vec::with_capacity(dirs.len());
    for v in &dirs.directions {
        let exit = p.exit_unchecked(x_o, v.as_ref(), cutoff, TIGHT_TOL);
        distances.push(exit.t);
        hit_facets.push(exit.facet_ids);
    }
    Ok(Fingerprint {
        observation_point: x_o.clone(),
        directions: dirs.clone(),
        distances,
        cutoff,
        hit_facets,
    })
}

impl Fingerprint {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    /// Boundary points `x_o + t_i v_i` of the finite entries.
    pub fn boundary_points(&self) -> Vec<Option<Vector>> {
        self.distances
            .iter()
            .zip(&self.directions.directions)
            .map(|(&t, v)| t.is_finite().then(|| &self.observation_point + v.as_ref() * t))
            .collect()
    }

    /// Distances clamped at the cutoff and divided by it; `∞` maps to 1.
    pub fn features(&self) -> Vec<f64> {
        self.distances
            .iter()
            .map(|&t| if t.is_finite() { t.min(self.cutoff) / self.cutoff } else { 1.0 })
            .collect()
    }
}

/// Hits per facet, ridge hits crediting every incident facet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitReport {
    pub counts: BTreeMap<usize, usize>,
    pub min_count: usize,
    pub max_count: usize,
    pub threshold: usize,
    /// Facets with fewer than `threshold` hits.
    pub facets_below: Vec<usize>,
}

pub fn hit_report(f: &Fingerprint, p: &ConvexPolytope, threshold: usize) -> Result<HitReport> {
    let mut counts: BTreeMap<usize, usize> = p.facet_ids().iter().map(|&id| (id, 0)).collect();
    for ids in &f.hit_facets {
        for id in ids {
            *counts.get_mut(id).ok_or(Error::UnknownFacet(*id))? += 1;
        }
    }
    Ok(report_from_counts(counts, threshold))
}

pub(crate) fn report_from_counts(counts: BTreeMap<usize, usize>, threshold: usize) -> HitReport {
    let min_count = counts.values().copied().min().unwrap_or(0);
    let max_count = counts.values().copied().max().unwrap_or(0);
    let facets_below = counts
        .iter()
        .filter(|(_, &c)| c < threshold)
        .map(|(&id, _)| id)
        .collect();
    HitReport {
        counts,
        min_count,
        max_count,
        threshold,
        facets_below,
    }
}

/// Where a fingerprint file finds its directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DirectionsRef {
    Path(PathBuf),
    Inline(DirectionSetFile),
}

/// `{"x_o": [..], "T": .., "directions_ref": .., "t": [..], "hit_facets": [[..], ..]}`
/// with `"inf"` for infinite distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintFile {
    pub x_o: Vec<f64>,
    #[serde(rename = "T", with = "crate::float_text")]
    pub cutoff: f64,
    pub directions_ref: DirectionsRef,
    #[serde(with = "crate::float_text::vec")]
    pub t: Vec<f64>,
    pub hit_facets: Vec<Vec<usize>>,
}

impl Fingerprint {
    /// File record with the directions inline, or by reference when
    /// `directions_path` is given.
    pub fn to_file(&self, directions_path: Option<&Path>) -> FingerprintFile {
        FingerprintFile {
            x_o: self.observation_point.iter().copied().collect(),
            cutoff: self.cutoff,
            directions_ref: match directions_path {
                Some(path) => DirectionsRef::Path(path.to_path_buf()),
                None => DirectionsRef::Inline(self.directions.to_file()),
            },
            t: self.distances.clone(),
            hit_facets: self.hit_facets.clone(),
        }
    }

    /// Rebuilds a fingerprint; relative direction paths resolve against `base`.
    pub fn from_file(file: FingerprintFile, base: Option<&Path>) -> Result<Self> {
        let directions = match file.directions_ref {
            DirectionsRef::Inline(d) => DirectionSet::try_from(d)?,
            DirectionsRef::Path(path) => {
                let path = match base {
                    Some(b) if path.is_relative() => b.join(path),
                    _ => path,
                };
                DirectionSet::load(path)?
            }
        };
        if file.t.len() != directions.len() || file.hit_facets.len() != directions.len() {
            return Err(Error::Shape(format!(
                "{} distances and {} hit lists for {} directions",
                file.t.len(),
                file.hit_facets.len(),
                directions.len()
            )));
        }
        ensure_dim(directions.dim, file.x_o.len())?;
        Ok(Self {
            observation_point: Vector::from_column_slice(&file.x_o),
            directions,
            distances: file.t,
            cutoff: file.cutoff,
            hit_facets: file.hit_facets,
        })
    }

    pub fn to_json(&self, directions_path: Option<&Path>) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file(directions_path))?)
    }

    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?, base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cube, unit_from, vector, HalfSpace};
    use crate::sphere::place_uniform_circle;

    fn axis_directions() -> DirectionSet {
        let dirs = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
            .iter()
            .map(|c| unit_from(c).unwrap())
            .collect();
        DirectionSet::new(2, dirs).unwrap()
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
    fn fingerprint_examples() {
        let sq = cube(2, 0.0, 1.0);
        let f = fingerprint(&sq, &vector(&[0.5, 0.5]), &axis_directions(), 10.0).unwrap();
        assert_eq!(f.distances, vec![0.5; 4]);

        let f = fingerprint(&strip(), &vector(&[0.0, 0.5]), &axis_directions(), 10.0).unwrap();
        assert_eq!(f.distances, vec![f64::INFINITY, 0.5, f64::INFINITY, 0.5]);
        assert!(f.hit_facets[0].is_empty());
        assert_eq!(f.features(), vec![1.0, 0.05, 1.0, 0.05]);

        let f = fingerprint(&sq, &vector(&[0.25, 0.5]), &axis_directions(), 10.0).unwrap();
        assert_eq!(f.distances[0], 0.75);
        assert_eq!(f.distances[2], 0.25);

        assert_eq!(
            fingerprint(&sq, &vector(&[1.0, 0.5]), &axis_directions(), 10.0),
            Err(Error::OriginNotInterior)
        );
    }

    #[test]
    fn hit_report_examples() {
        let sq = cube(2, -0.5, 0.5);
        let x_o = vector(&[0.0, 0.0]);
        let f = fingerprint(&sq, &x_o, &place_uniform_circle(17, 0.123).unwrap(), 10.0).unwrap();
        let r = hit_report(&f, &sq, 2).unwrap();
        assert!(r.min_count >= 2 && r.max_count >= 3, "{r:?}");
        assert!(r.facets_below.is_empty());

        let f = fingerprint(&sq, &x_o, &place_uniform_circle(3, 0.1).unwrap(), 10.0).unwrap();
        let r = hit_report(&f, &sq, 1).unwrap();
        assert_eq!(r.min_count, 0);
        assert!(!r.facets_below.is_empty());

        // a hit on a facet the polytope does not carry
        let f = fingerprint(&sq, &x_o, &axis_directions(), 10.0).unwrap();
        let trimmed = sq.without(&[0]).unwrap();
        assert_eq!(hit_report(&f, &trimmed, 1), Err(Error::UnknownFacet(0)));
    }

    #[test]
    fn corner_hit_credits_both_edges() {
        let sq = cube(2, 0.0, 1.0);
        let d = DirectionSet::new(2, vec![unit_from(&[1.0, 1.0]).unwrap()]).unwrap();
        let f = fingerprint(&sq, &vector(&[0.5, 0.5]), &d, 10.0).unwrap();
        assert!((f.distances[0] - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.hit_facets[0], vec![0, 2]);
    }

    #[test]
    fn file_round_trip_with_infinities() {
        let f = fingerprint(&strip(), &vector(&[0.0, 0.5]), &axis_directions(), 10.0).unwrap();
        let text = f.to_json(None).unwrap();
        assert!(text.contains(r#""T":10.0"#) && text.contains(r#""inf""#), "{text}");
        assert_eq!(Fingerprint::from_json(&text, None).unwrap(), f);

        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("dirs.json"), f.directions.to_json().unwrap()).unwrap();
        let text = f.to_json(Some(Path::new("dirs.json"))).unwrap();
        assert_eq!(Fingerprint::from_json(&text, Some(dir.path())).unwrap(), f);
    }
}
