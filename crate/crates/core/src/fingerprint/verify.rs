//! Simulation checks of the hit-count guarantees.
//!
//! Planar check: random polygons of a class, observation points drawn
//! uniformly plus deliberately close to vertices and edges, evenly spaced
//! rays at a random offset. Spatial check: rotated canned shapes seen along
//! a greedy dense direction set. Every trial draws from its own derived
//! seed, so reports do not depend on worker count.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fingerprint, report_from_counts, HitReport};
use crate::bounds::{rays_2d, rays_nd};
use crate::error::{Error, Result};
use crate::geometry::{
    hypercube, prism_over, regular_polygon, regular_simplex, ConvexPolytope, PolytopeFile, Vector,
};
use crate::metrics::{class_membership, polytope_metrics, theta_min, ClassParams};
use crate::qd::gen_random_polygon;
use crate::rng::{derive_seed, rotation, seeded};
use crate::sphere::{place_greedy, place_uniform_circle, DirectionSet, HoleSeekingOracle};

/// One failed hit-count check, with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitViolation {
    pub trial: usize,
    pub point: usize,
    /// How the observation point was chosen.
    pub placement: String,
    pub reason: String,
    pub polytope: PolytopeFile,
    pub x_o: Vec<f64>,
    /// Angular offset of the evenly spaced rays (planar checks).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    pub rays: usize,
    pub counts: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarCheckConfig {
    /// Observation points per polygon, adversarial ones included.
    pub points_per_polygon: usize,
    /// Distances from a vertex and from an edge, as fractions of the
    /// polygon diameter; each gives one near-vertex and one near-edge point.
    pub adversarial_offsets: Vec<f64>,
    /// Ray count; the planar bound when `None`.
    pub rays: Option<u64>,
    /// Cutoff as a multiple of `d`.
    pub cutoff_factor: f64,
    pub max_examples: usize,
}

impl Default for PlanarCheckConfig {
    fn default() -> Self {
        Self {
            points_per_polygon: 10,
            adversarial_offsets: vec![1e-3, 1e-6],
            rays: None,
            cutoff_factor: 10.0,
            max_examples: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarBoundReport {
    pub params: ClassParams,
    pub rays: u64,
    pub trials: usize,
    pub points_checked: usize,
    pub violations: usize,
    /// Violations per kind of observation point.
    pub violations_by_placement: BTreeMap<String, usize>,
    /// Smallest per-edge hit count seen in any fingerprint.
    pub min_edge_hits: usize,
    /// Fingerprints in which no edge took three hits.
    pub no_triple: usize,
    pub examples: Vec<HitViolation>,
}

impl PlanarBoundReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Near-vertex and near-edge observation points: for each offset `δ`, one
/// point `δ · scale` from a random vertex toward the vertex centroid and one
/// `δ · scale` inside a random edge.
pub fn adversarial_points<R: Rng + ?Sized>(
    p: &ConvexPolytope,
    scale: f64,
    offsets: &[f64],
    rng: &mut R,
) -> Result<Vec<(String, Vector)>> {
    let boundary = p.polygon_boundary()?;
    let centroid = boundary.vertex_centroid();
    let mut out = Vec::new();
    for &delta in offsets {
        let v = &boundary.vertices[rng.random_range(0..boundary.len())];
        let toward = (&centroid - v).normalize();
        let x = v + toward * (delta * scale);
        if p.is_interior(&x)? {
            out.push((format!("vertex+{delta:e}"), x));
        }
        let e = rng.random_range(0..boundary.len());
        let (a, b) = boundary.edge_endpoints(e);
        let along = rng.random_range(0.05..0.95);
        let normal = p.facet(boundary.edges[e])?.normal.as_ref().clone();
        let x = a + (b - a) * along - normal * (delta * scale);
        if p.is_interior(&x)? {
            out.push((format!("edge+{delta:e}"), x));
        }
    }
    Ok(out)
}

pub fn verify_theorem1(trials: usize, params: &ClassParams, seed: u64) -> Result<PlanarBoundReport> {
    verify_theorem1_with(trials, params, seed, &PlanarCheckConfig::default())
}

/// Every edge of every sampled polygon takes at least two hits and some
/// edge at least three.
pub fn verify_theorem1_with(
    trials: usize,
    params: &ClassParams,
    seed: u64,
    config: &PlanarCheckConfig,
) -> Result<PlanarBoundReport> {
    let rays = match config.rays {
        Some(m) => m,
        None => rays_2d(params)?.m,
    };
    if rays == 0 {
        return Err(Error::Domain("need at least one ray".into()));
    }
    let cutoff = config.cutoff_factor * params.d;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<(usize, usize, usize, Vec<HitViolation>)> {
            let stream = derive_seed(seed, trial as u64);
            let p = gen_random_polygon(params, derive_seed(stream, 0))?;
            let mut rng = seeded(derive_seed(stream, 1));
            let scale = polytope_metrics(&p)?.diameter;
            let mut points = adversarial_points(&p, scale, &config.adversarial_offsets, &mut rng)?;
            while points.len() < config.points_per_polygon {
                points.push(("uniform".into(), p.sample_interior(&mut rng)?));
            }
            let mut min_hits = usize::MAX;
            let mut no_triple = 0;
            let mut violations = Vec::new();
            for (i, (placement, x_o)) in points.iter().enumerate() {
                let v0 = rng.random_range(0.0..2.0 * PI);
                let dirs = place_uniform_circle(rays as usize, v0)?;
                let f = fingerprint(&p, x_o, &dirs, cutoff)?;
                let report = super::hit_report(&f, &p, 2)?;
                min_hits = min_hits.min(report.min_count);
                let reason = if report.min_count < 2 {
                    Some(format!("edges {:?} hit fewer than twice", report.facets_below))
                } else if report.max_count < 3 {
                    Some("no edge hit three times".to_string())
                } else {
                    None
                };
                if report.max_count < 3 {
                    no_triple += 1;
                }
                if let Some(reason) = reason {
                    violations.push(HitViolation {
                        trial,
                        point: i,
                        placement: placement.clone(),
                        reason,
                        polytope: PolytopeFile::from(&p),
                        x_o: x_o.iter().copied().collect(),
                        v0: Some(v0),
                        rays: rays as usize,
                        counts: report.counts,
                    });
                }
            }
            Ok((points.len(), min_hits, no_triple, violations))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = PlanarBoundReport {
        params: *params,
        rays,
        trials,
        points_checked: 0,
        violations: 0,
        violations_by_placement: BTreeMap::new(),
        min_edge_hits: usize::MAX,
        no_triple: 0,
        examples: Vec::new(),
    };
    for (checked, min_hits, no_triple, violations) in per_trial {
        report.points_checked += checked;
        report.min_edge_hits = report.min_edge_hits.min(min_hits);
        report.no_triple += no_triple;
        report.violations += violations.len();
        for v in &violations {
            *report.violations_by_placement.entry(v.placement.clone()).or_default() += 1;
        }
        let room = config.max_examples.saturating_sub(report.examples.len());
        report.examples.extend(violations.into_iter().take(room));
    }
    Ok(report)
}

/// Canned shape families for the spatial check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeFamily {
    Cube,
    /// Right prism over a regular pentagon (`N = 3`) or a regular simplex
    /// one dimension down (`N >= 4`).
    Prism,
    Simplex,
}

impl ShapeFamily {
    pub const ALL: [ShapeFamily; 3] = [ShapeFamily::Cube, ShapeFamily::Prism, ShapeFamily::Simplex];

    /// Unit-size representative centered at the origin.
    pub fn canonical(self, dim: usize) -> Result<ConvexPolytope> {
        match self {
            ShapeFamily::Cube => Ok(hypercube(dim, 1.0)),
            ShapeFamily::Simplex => regular_simplex(dim, 1.0),
            ShapeFamily::Prism => {
                if dim == 3 {
                    let base = regular_polygon(5, 1.0, 0.0)?;
                    let side = 2.0 * (PI / 5.0).sin();
                    prism_over(&base, side)
                } else if dim >= 4 {
                    let base = regular_simplex(dim - 1, 1.0)?;
                    // height equal to the base facets' inscribed diameter
                    let h = 2.0 * crate::geometry::simplex_inradius(dim - 2, 1.0);
                    prism_over(&base, h)
                } else {
                    Err(Error::Domain("prisms need N >= 3".into()))
                }
            }
        }
    }

    /// A member of the class drawn at a random size and orientation, or
    /// `None` when no size puts the family inside the class.
    pub fn instance<R: Rng + ?Sized>(
        self,
        params: &ClassParams,
        rng: &mut R,
    ) -> Result<Option<ConvexPolytope>> {
        let base = self.canonical(params.dim)?;
        let m = polytope_metrics(&base)?;
        let ratio = m.min_inscription() / m.diameter;
        // sizes with diameter <= d and inscription >= l
        let lo = params.l / ratio;
        let hi = params.d;
        if lo > hi {
            return Ok(None);
        }
        let target = rng.random_range(lo..=hi) * (1.0 - 1e-9);
        let scaled = base.scaled(target / m.diameter)?;
        let rot = rotation(rng, params.dim);
        let shift = Vector::from_fn(params.dim, |_, _| rng.random_range(-1.0..1.0));
        let p = scaled.transformed(&rot, &shift)?;
        Ok(class_membership(&p, params)?.member.then_some(p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialCheckConfig {
    pub families: Vec<ShapeFamily>,
    pub cutoff_factor: f64,
    pub max_examples: usize,
}

impl Default for SpatialCheckConfig {
    fn default() -> Self {
        Self {
            families: ShapeFamily::ALL.to_vec(),
            cutoff_factor: 10.0,
            max_examples: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: ShapeFamily,
    /// False when no member of the family lies in the class; no trials run.
    pub in_class: bool,
    pub trials: usize,
    pub violations: usize,
    pub min_face_hits: usize,
    pub examples: Vec<HitViolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseBoundReport {
    pub params: ClassParams,
    pub theta_min: f64,
    pub phi: f64,
    pub set_size: usize,
    /// The real-valued size bound for a `θ_min/6`-dense greedy set.
    pub size_bound: f64,
    pub size_ok: bool,
    pub families: Vec<FamilyReport>,
}

impl DenseBoundReport {
    pub fn violations(&self) -> usize {
        self.families.iter().map(|f| f.violations).sum()
    }

    pub fn passed(&self) -> bool {
        self.size_ok && self.violations() == 0 && self.families.iter().all(|f| f.in_class)
    }
}

/// Builds the greedy `θ_min/6`-dense set with the hole-seeking oracle.
pub fn dense_direction_set(params: &ClassParams, seed: u64) -> Result<DirectionSet> {
    let phi = theta_min(params)? / 6.0;
    let mut oracle = HoleSeekingOracle::new(params.dim, derive_seed(seed, u64::MAX));
    place_greedy(params.dim, phi, seed, &mut oracle)
}

pub fn verify_theorem2(trials: usize, params: &ClassParams, seed: u64) -> Result<DenseBoundReport> {
    let dirs = dense_direction_set(params, seed)?;
    verify_theorem2_with(trials, params, seed, &dirs, &SpatialCheckConfig::default())
}

/// Every face of every sampled shape takes at least `N` hits from the
/// given direction set.
pub fn verify_theorem2_with(
    trials: usize,
    params: &ClassParams,
    seed: u64,
    dirs: &DirectionSet,
    config: &SpatialCheckConfig,
) -> Result<DenseBoundReport> {
    crate::error::ensure_dim(params.dim, dirs.dim)?;
    let budget = rays_nd(params)?;
    let n = params.dim;
    let cutoff = config.cutoff_factor * params.d;
    let mut families = Vec::new();
    for (fi, &family) in config.families.iter().enumerate() {
        let family_seed = derive_seed(seed, fi as u64);
        let outcomes = (0..trials)
            .into_par_iter()
            .map(|trial| -> Result<Option<(HitReport, HitViolation)>> {
                let mut rng = seeded(derive_seed(family_seed, trial as u64));
                let Some(p) = family.instance(params, &mut rng)? else {
                    return Ok(None);
                };
                let x_o = p.sample_interior(&mut rng)?;
                let f = fingerprint(&p, &x_o, dirs, cutoff)?;
                let mut counts: BTreeMap<usize, usize> = p.facet_ids().iter().map(|&id| (id, 0)).collect();
                for ids in &f.hit_facets {
                    for id in ids {
                        *counts.get_mut(id).ok_or(Error::UnknownFacet(*id))? += 1;
                    }
                }
                let report = report_from_counts(counts, n);
                let detail = HitViolation {
                    trial,
                    point: 0,
                    placement: "uniform".into(),
                    reason: format!("faces {:?} hit fewer than {n} times", report.facets_below),
                    polytope: PolytopeFile::from(&p),
                    x_o: x_o.iter().copied().collect(),
                    v0: None,
                    rays: dirs.len(),
                    counts: report.counts.clone(),
                };
                Ok(Some((report, detail)))
            })
            .collect::<Result<Vec<_>>>()?;
        let in_class = outcomes.iter().all(Option::is_some);
        let mut fr = FamilyReport {
            family,
            in_class,
            trials: 0,
            violations: 0,
            min_face_hits: usize::MAX,
            examples: Vec::new(),
        };
        for (report, detail) in outcomes.into_iter().flatten() {
            fr.trials += 1;
            fr.min_face_hits = fr.min_face_hits.min(report.min_count);
            if !report.facets_below.is_empty() {
                fr.violations += 1;
                if fr.examples.len() < config.max_examples {
                    fr.examples.push(detail);
                }
            }
        }
        families.push(fr);
    }
    Ok(DenseBoundReport {
        params: *params,
        theta_min: budget.theta_min,
        phi: budget.phi.expect("dense budgets carry φ"),
        set_size: dirs.len(),
        size_bound: budget.raw,
        size_ok: (dirs.len() as f64) <= budget.raw,
        families,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::AngleBound;

    #[test]
    fn canonical_shapes_have_expected_ratios() {
        let m = polytope_metrics(&ShapeFamily::Cube.canonical(3).unwrap()).unwrap();
        assert!((m.min_inscription() / m.diameter - 1.0 / 3f64.sqrt()).abs() < 1e-9);
        let m = polytope_metrics(&ShapeFamily::Prism.canonical(3).unwrap()).unwrap();
        assert!(m.max_angle().unwrap() < PI / 2.0 + 1e-9);
        let p4 = ShapeFamily::Prism.canonical(4).unwrap();
        assert_eq!(p4.len(), 6);
        assert!(p4.is_bounded());
    }

    #[test]
    fn planar_check_small_run() {
        // equal-angle reading: exterior angles at least α
        let params = ClassParams::new(2, 2.0, 0.5, PI / 3.0)
            .unwrap()
            .with_angle_bound(AngleBound::AtLeast);
        let report = verify_theorem1(20, &params, 3).unwrap();
        assert_eq!(report.points_checked, 200);
        assert!(report.passed(), "{:?}", report.examples.first());
    }

    #[test]
    fn too_few_rays_fail() {
        let params = ClassParams::new(2, 2.0, 0.5, 2.0 * PI / 3.0).unwrap();
        let config = PlanarCheckConfig {
            rays: Some(4),
            ..Default::default()
        };
        let report = verify_theorem1_with(10, &params, 1, &config).unwrap();
        assert!(report.violations > 0);
        assert!(!report.examples.is_empty());
    }

    #[test]
    fn spatial_check_small_run() {
        let params = ClassParams::new(3, 2.0, 1.0, 1.95).unwrap();
        let report = verify_theorem2(5, &params, 11).unwrap();
        assert!(report.size_ok);
        assert!(report.families.iter().all(|f| f.in_class), "{:?}", report.families);
        assert_eq!(report.violations(), 0);
    }
}
