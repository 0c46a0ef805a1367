//! Synthetic quantum-dot cells, random test polygons for a planar class,
//! and fingerprint datasets for the classification experiment.
//!
//! A stability diagram tiles the plane with cells of five kinds: closed
//! center-symmetric hexagons (quadrilaterals when the short edges vanish),
//! three kinds of strips told apart by slope, and the open cell.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{rays_qd, QDGeometry};
use crate::error::{Error, Result};
use crate::fingerprint::fingerprint;
use crate::geometry::{planar, vector, ConvexPolytope, HalfSpace, Vector};
use crate::metrics::{membership_from_metrics, polytope_metrics, AngleBound, ClassParams};
use crate::rng::{derive_seed, dirichlet_weights, seeded};
use crate::sphere::place_uniform_circle;

/// Slope interval of shallow strips.
pub const C2_SLOPE: (f64, f64) = (-0.5, 0.0);
/// Slope interval of mid strips.
pub const C3_SLOPE: (f64, f64) = (-2.0, -0.5);
/// Line-angle interval of steep strips (slope below -2), radians from the
/// positive first axis.
pub const C4_ANGLE: (f64, f64) = (PI / 2.0, PI - 1.107_148_717_794_090_4);

/// Relative spread allowed between the two long edges of a hexagon.
pub const LONG_EDGE_SPREAD: f64 = 0.2;
/// Jitter of the long-edge directions, radians.
pub const LONG_EDGE_JITTER: f64 = 10.0 * PI / 180.0;
/// Fraction of the cell kept clear when placing observation points.
pub const INSET: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QdClass {
    C1Hexagon,
    C2StripShallow,
    C3StripMid,
    C4StripSteep,
    C5Open,
}

impl QdClass {
    pub const ALL: [QdClass; 5] = [
        QdClass::C1Hexagon,
        QdClass::C2StripShallow,
        QdClass::C3StripMid,
        QdClass::C4StripSteep,
        QdClass::C5Open,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QdClass::C1Hexagon => "C1_HEXAGON",
            QdClass::C2StripShallow => "C2_STRIP_SHALLOW",
            QdClass::C3StripMid => "C3_STRIP_MID",
            QdClass::C4StripSteep => "C4_STRIP_STEEP",
            QdClass::C5Open => "C5_OPEN",
        }
    }

    pub fn is_strip(self) -> bool {
        matches!(
            self,
            QdClass::C2StripShallow | QdClass::C3StripMid | QdClass::C4StripSteep
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellGeometry {
    Polytope(ConvexPolytope),
    Open,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QDCell {
    pub label: QdClass,
    pub geometry: CellGeometry,
    /// Aperture and width of hexagons.
    pub params: Option<QDGeometry>,
    /// Slope of strip boundaries.
    pub slope: Option<f64>,
    /// Facet ids of the two short hexagon edges.
    pub short_facets: Vec<usize>,
    pub aperture_detectable: bool,
}

impl QDCell {
    /// The cell as a polytope; the open cell has no half-spaces.
    pub fn region(&self) -> ConvexPolytope {
        match &self.geometry {
            CellGeometry::Polytope(p) => p.clone(),
            CellGeometry::Open => ConvexPolytope::new(2, Vec::new()).expect("empty plane"),
        }
    }

    /// The boundaries a measurement sees: short edges vanish when the
    /// aperture is undetectable.
    pub fn observed_region(&self) -> Result<ConvexPolytope> {
        let region = self.region();
        if self.aperture_detectable || self.short_facets.is_empty() {
            Ok(region)
        } else {
            region.without(&self.short_facets)
        }
    }

    /// Uniform observation point at least [`INSET`] of the cell's scale
    /// away from its boundary.
    pub fn observation_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vector> {
        match (&self.geometry, self.label) {
            (CellGeometry::Open, _) => Ok(vector(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])),
            (CellGeometry::Polytope(p), QdClass::C1Hexagon) => {
                // the hexagon is centered at the origin: shrink it about there
                p.scaled(1.0 - INSET)?.sample_interior(rng)
            }
            (CellGeometry::Polytope(p), _) => {
                let h = &p.halfspaces()[0];
                let width = h.offset + p.halfspaces()[1].offset;
                let across = rng.random_range(-0.5 + INSET..=0.5 - INSET) * width;
                let along = rng.random_range(-1.0..1.0) * width;
                let n = h.normal.as_ref();
                let u = vector(&[-n[1], n[0]]);
                let center = n * (h.offset - width / 2.0);
                Ok(center + n * across + u * along)
            }
        }
    }
}

/// Center-symmetric hexagon with short edges of length `a` and width `w`,
/// rotated by `orientation`. Facets run counterclockwise: `0` and `3` are
/// the short edges (absent when `a = 0`), `1, 2, 4, 5` the long ones.
pub fn gen_hexagon(a: f64, w: f64, orientation: f64, seed: u64) -> Result<QDCell> {
    let geometry = QDGeometry::new(a, w)?;
    if a > w {
        return Err(Error::Domain(format!("aperture {a} exceeds width {w}")));
    }
    let mut rng = seeded(seed);
    let b = vector(&[w / 2.0, a / 2.0]);
    let d = vector(&[-w / 2.0, a / 2.0]);
    let mut apex = None;
    for _ in 0..1000 {
        let height = a / 2.0 + w * rng.random_range(0.3..0.7);
        let c0 = vector(&[0.0, height]);
        let dir1 = rotate(&(&c0 - &b), rng.random_range(-LONG_EDGE_JITTER..LONG_EDGE_JITTER));
        let dir2 = rotate(&(&d - &c0), rng.random_range(-LONG_EDGE_JITTER..LONG_EDGE_JITTER));
        // C = b + s dir1 = d - u dir2
        let det = dir1[0] * (-dir2[1]) + dir2[0] * dir1[1];
        if det.abs() < 1e-12 {
            continue;
        }
        let rhs = &d - &b;
        let s = (rhs[0] * (-dir2[1]) + dir2[0] * rhs[1]) / det;
        let c = &b + dir1 * s;
        let (bc, cd) = ((&c - &b).norm(), (&d - &c).norm());
        let convex = c[1] > a / 2.0 + 1e-3 * w && c[0].abs() < w / 2.0;
        if convex && bc.max(cd) / bc.min(cd) <= 1.0 + LONG_EDGE_SPREAD {
            apex = Some(c);
            break;
        }
    }
    let c = apex.ok_or_else(|| Error::GeneratorExhausted {
        attempts: 1000,
        reason: "no admissible long-edge pair".into(),
    })?;
    let (cx, cy) = (c[0], c[1]);
    let ring: Vec<[f64; 2]> = vec![
        [w / 2.0, -a / 2.0],
        [w / 2.0, a / 2.0],
        [cx, cy],
        [-w / 2.0, a / 2.0],
        [-w / 2.0, -a / 2.0],
        [-cx, -cy],
    ];
    let mut halfspaces = Vec::new();
    let mut ids = Vec::new();
    for i in 0..6 {
        let (p, q) = (ring[i], ring[(i + 1) % 6]);
        let short = i == 0 || i == 3;
        if short && a == 0.0 {
            continue;
        }
        // edge p -> q of a counterclockwise ring: outward normal is (dy, -dx)
        let normal = vector(&[q[1] - p[1], p[0] - q[0]]);
        let offset = normal[0] * p[0] + normal[1] * p[1];
        halfspaces.push(HalfSpace::new(normal, offset)?);
        ids.push(i);
    }
    let cell = ConvexPolytope::with_ids(2, halfspaces, ids)?;
    let (sin, cos) = orientation.sin_cos();
    let rot = nalgebra::DMatrix::from_row_slice(2, 2, &[cos, -sin, sin, cos]);
    let cell = cell.transformed(&rot, &Vector::zeros(2))?;
    Ok(QDCell {
        label: QdClass::C1Hexagon,
        geometry: CellGeometry::Polytope(cell),
        params: Some(geometry),
        slope: None,
        short_facets: if a == 0.0 { Vec::new() } else { vec![0, 3] },
        aperture_detectable: true,
    })
}

fn rotate(v: &Vector, angle: f64) -> Vector {
    let (s, c) = angle.sin_cos();
    vector(&[c * v[0] - s * v[1], s * v[0] + c * v[1]])
}

/// Strip of the given class between two parallel lines `width` apart,
/// centered on the origin.
pub fn gen_strip(cls: QdClass, width: f64, seed: u64) -> Result<QDCell> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::Domain(format!("strip width must be positive, got {width}")));
    }
    let mut rng = seeded(seed);
    let angle = match cls {
        QdClass::C2StripShallow => open_uniform(&mut rng, C2_SLOPE).atan(),
        QdClass::C3StripMid => open_uniform(&mut rng, C3_SLOPE).atan(),
        QdClass::C4StripSteep => open_uniform(&mut rng, C4_ANGLE),
        _ => return Err(Error::Domain(format!("{} is not a strip class", cls.name()))),
    };
    let n = vector(&[-angle.sin(), angle.cos()]);
    let halfspaces = vec![
        HalfSpace::new(n.clone(), width / 2.0)?,
        HalfSpace::new(-n, width / 2.0)?,
    ];
    Ok(QDCell {
        label: cls,
        geometry: CellGeometry::Polytope(ConvexPolytope::new(2, halfspaces)?),
        params: None,
        slope: Some(angle.tan()),
        short_facets: Vec::new(),
        aperture_detectable: true,
    })
}

/// Uniform draw from the open interval.
fn open_uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    loop {
        let x = rng.random_range(lo..hi);
        if x > lo {
            return x;
        }
    }
}

pub fn gen_open() -> QDCell {
    QDCell {
        label: QdClass::C5Open,
        geometry: CellGeometry::Open,
        params: None,
        slope: None,
        short_facets: Vec::new(),
        aperture_detectable: true,
    }
}

/// Attempts before [`gen_random_polygon`] gives up.
pub const POLYGON_ATTEMPTS: usize = 10_000;

/// Random convex polygon certified to lie in the planar class `params`.
///
/// Edge normal angles come from a flat Dirichlet split of the circle with
/// every gap obeying the angle bound; offsets are jittered around a common
/// radius. Draws failing the class test are rejected.
pub fn gen_random_polygon(params: &ClassParams, seed: u64) -> Result<ConvexPolytope> {
    params.check()?;
    if params.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: params.dim,
        });
    }
    let mut rng = seeded(seed);
    // perimeter is at most π d, so at most π d / l edges
    let by_length = ((PI * params.d / params.l).floor() as usize).clamp(3, 24);
    let (k_min, k_max) = match params.angle_bound {
        AngleBound::AtMost => {
            let k = ((2.0 * PI / params.alpha - 1e-9).ceil() as usize).max(3);
            (k, by_length.max(k))
        }
        AngleBound::AtLeast => (3, by_length.min((2.0 * PI / params.alpha + 1e-9).floor() as usize).max(3)),
    };
    for _ in 0..POLYGON_ATTEMPTS {
        let k = rng.random_range(k_min..=k_max);
        let gaps: Vec<f64> = dirichlet_weights(&mut rng, k)
            .into_iter()
            .map(|x| 2.0 * PI * x)
            .collect();
        let gaps_ok = match params.angle_bound {
            AngleBound::AtMost => gaps.iter().all(|&g| g <= params.alpha),
            AngleBound::AtLeast => gaps.iter().all(|&g| g >= params.alpha),
        };
        if !gaps_ok {
            continue;
        }
        let radius = params.d * rng.random_range(0.25..0.5);
        let mut angle = rng.random_range(0.0..2.0 * PI);
        let mut halfspaces = Vec::with_capacity(k);
        for g in &gaps {
            let offset = radius * rng.random_range(0.85..1.0);
            halfspaces.push(HalfSpace::new(planar(angle).into_inner(), offset)?);
            angle += g;
        }
        let shift = vector(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
        let Ok(p) = ConvexPolytope::new(2, halfspaces).and_then(|p| p.translated(&shift)) else {
            continue;
        };
        let Ok(metrics) = polytope_metrics(&p) else {
            continue;
        };
        if metrics.inscriptions.len() == k && membership_from_metrics(metrics, params).member {
            return Ok(p);
        }
    }
    Err(Error::GeneratorExhausted {
        attempts: POLYGON_ATTEMPTS,
        reason: format!(
            "no polygon found in the class (d = {}, l = {}, α = {})",
            params.d, params.l, params.alpha
        ),
    })
}

/// Which labels a dataset carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSet {
    /// The five cell classes.
    #[default]
    Five,
    /// Hexagons against strips of any slope; open cells are left out.
    HexagonVsStrip,
}

impl LabelSet {
    pub fn class_names(self) -> Vec<String> {
        match self {
            LabelSet::Five => QdClass::ALL.iter().map(|c| c.name().to_string()).collect(),
            LabelSet::HexagonVsStrip => vec!["C1_HEXAGON".into(), "STRIP".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub n_per_class: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "T")]
    pub cutoff: f64,
    pub noise: f64,
    pub aperture_detectable: bool,
    pub seed: u64,
    #[serde(default)]
    pub labels: LabelSet,
    /// Range of hexagon widths and strip widths.
    #[serde(default = "default_width_range")]
    pub width_range: (f64, f64),
}

fn default_width_range() -> (f64, f64) {
    (0.5, 1.5)
}

impl DatasetConfig {
    pub fn new(n_per_class: usize, m: usize, cutoff: f64, noise: f64, aperture_detectable: bool, seed: u64) -> Self {
        Self {
            n_per_class,
            m,
            cutoff,
            noise,
            aperture_detectable,
            seed,
            labels: LabelSet::Five,
            width_range: default_width_range(),
        }
    }

    pub fn with_labels(mut self, labels: LabelSet) -> Self {
        self.labels = labels;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: usize,
}

/// First record of a dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "T")]
    pub cutoff: f64,
    pub noise: f64,
    pub seed: u64,
    pub classes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<DatasetConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.header.classes.len()
    }

    /// Header line followed by one line per sample.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Format(e.to_string());
        writeln!(out, "{}", serde_json::to_string(&self.header)?).map_err(io)?;
        for s in &self.samples {
            writeln!(out, "{}", serde_json::to_string(s)?).map_err(io)?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header_line = lines
            .next()
            .ok_or_else(|| Error::Format("empty dataset file".into()))?
            .map_err(|e| Error::Format(e.to_string()))?;
        let header: DatasetHeader = serde_json::from_str(&header_line)?;
        let mut samples = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Format(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let s: Sample = serde_json::from_str(&line)?;
            if s.features.len() != header.m || s.label >= header.classes.len() {
                return Err(Error::Format(format!("sample {i} does not match the header")));
            }
            samples.push(s);
        }
        Ok(Self { header, samples })
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let file = std::fs::File::create(path.as_ref())
            .map_err(|e| Error::Format(format!("{}: {e}", path.as_ref().display())))?;
        let mut out = std::io::BufWriter::new(file);
        self.write_jsonl(&mut out)?;
        out.flush().map_err(|e| Error::Format(e.to_string()))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Format(format!("{}: {e}", path.as_ref().display())))?;
        Self::read_jsonl(std::io::BufReader::new(file))
    }
}

/// Cell of class `cls` drawn for sample stream `seed`.
pub fn gen_cell(cls: QdClass, config: &DatasetConfig, seed: u64) -> Result<QDCell> {
    let mut rng = seeded(seed);
    let (wlo, whi) = config.width_range;
    let width = rng.random_range(wlo..=whi);
    let mut cell = match cls {
        QdClass::C1Hexagon => {
            let ratio = rng.random_range(0.0..=0.5);
            let orientation = rng.random_range(0.0..2.0 * PI);
            gen_hexagon(ratio * width, width, orientation, rng.random())?
        }
        QdClass::C5Open => gen_open(),
        strip => gen_strip(strip, width, rng.random())?,
    };
    cell.aperture_detectable = config.aperture_detectable;
    Ok(cell)
}

/// Features of one cell: an evenly spaced fingerprint with random offset,
/// multiplicative noise on finite distances, clamped and scaled by the cutoff.
pub fn cell_features(cell: &QDCell, config: &DatasetConfig, seed: u64) -> Result<Vec<f64>> {
    let mut rng = seeded(seed);
    let region = cell.observed_region()?;
    let x_o = cell.observation_point(&mut rng)?;
    let offset = rng.random_range(0.0..2.0 * PI);
    let dirs = place_uniform_circle(config.m, offset)?;
    let f = fingerprint(&region, &x_o, &dirs, config.cutoff)?;
    Ok(f.distances
        .iter()
        .map(|&t| {
            let eps = if config.noise > 0.0 {
                rng.random_range(-config.noise..=config.noise)
            } else {
                0.0
            };
            if t.is_finite() {
                (t * (1.0 + eps)).min(config.cutoff) / config.cutoff
            } else {
                1.0
            }
        })
        .collect())
}

/// Balanced dataset ordered by class, then index. Each sample draws from its
/// own derived stream, so the result does not depend on scheduling.
pub fn gen_dataset(config: &DatasetConfig) -> Result<Dataset> {
    if config.n_per_class == 0 || config.m == 0 {
        return Err(Error::Domain("need at least one sample per class and one ray".into()));
    }
    if !(config.cutoff > 0.0) || !(0.0..1.0).contains(&config.noise) {
        return Err(Error::Domain("cutoff must be positive and noise in [0, 1)".into()));
    }
    let n = config.n_per_class;
    // (label, generated class) per sample slot
    let slots: Vec<(usize, QdClass)> = match config.labels {
        LabelSet::Five => QdClass::ALL
            .iter()
            .enumerate()
            .flat_map(|(label, &c)| std::iter::repeat_n((label, c), n))
            .collect(),
        LabelSet::HexagonVsStrip => {
            let strips = [QdClass::C2StripShallow, QdClass::C3StripMid, QdClass::C4StripSteep];
            std::iter::repeat_n((0, QdClass::C1Hexagon), n)
                .chain((0..n).map(|i| (1, strips[i % 3])))
                .collect()
        }
    };
    let samples = slots
        .par_iter()
        .enumerate()
        .map(|(i, &(label, cls))| {
            let stream = derive_seed(config.seed, i as u64);
            let cell = gen_cell(cls, config, derive_seed(stream, 0))?;
            let features = cell_features(&cell, config, derive_seed(stream, 1))?;
            Ok(Sample { features, label })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        header: DatasetHeader {
            m: config.m,
            cutoff: config.cutoff,
            noise: config.noise,
            seed: config.seed,
            classes: config.labels.class_names(),
            config: Some(config.clone()),
        },
        samples,
    })
}

/// Outcome of the hit-accounting checks behind the quantum-dot bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdReport {
    pub hexagon_trials: usize,
    /// Hexagons where neither joined long-edge pair took three hits.
    pub hexagon_violations: usize,
    /// Worst cases: `(a/w, rays, best pair hits, observation point)`.
    pub hexagon_examples: Vec<HexagonExample>,
    pub strip_trials: usize,
    /// Strips whose five-ray pattern was neither 3+2 nor 2+2 with one escape.
    pub strip_violations: usize,
}

/// `(a/w, rays, best pair hits, observation point)` of a failing hexagon.
pub type HexagonExample = (f64, u64, usize, [f64; 2]);

/// Hexagons with undetectable aperture, `a/w` uniform in `[0, 1/2]`,
/// observed with the bound's ray count; strips observed with five rays.
pub fn verify_qd(trials: usize, seed: u64) -> Result<QdReport> {
    let results: Vec<(Option<HexagonExample>, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let stream = derive_seed(seed, i as u64);
            let mut rng = seeded(stream);
            let ratio = rng.random_range(0.0..=0.5);
            let mut cell = gen_hexagon(ratio, 1.0, rng.random_range(0.0..2.0 * PI), rng.random())?;
            cell.aperture_detectable = false;
            let m = rays_qd(&QDGeometry::new(ratio, 1.0)?, false)?.m;
            let x_o = cell.observation_point(&mut rng)?;
            let dirs = place_uniform_circle(m as usize, rng.random_range(0.0..2.0 * PI))?;
            let f = fingerprint(&cell.observed_region()?, &x_o, &dirs, 100.0)?;
            // distinct rays landing on each joined pair
            let pair_hits = |pair: [usize; 2]| {
                f.hit_facets
                    .iter()
                    .filter(|ids| ids.iter().any(|id| pair.contains(id)))
                    .count()
            };
            let best = pair_hits([1, 2]).max(pair_hits([4, 5]));
            let hex = (best < 3).then_some((ratio, m, best, [x_o[0], x_o[1]]));

            let cls = [QdClass::C2StripShallow, QdClass::C3StripMid, QdClass::C4StripSteep][i % 3];
            let strip = gen_strip(cls, rng.random_range(0.5..1.5), rng.random())?;
            let x_o = strip.observation_point(&mut rng)?;
            let dirs = place_uniform_circle(5, rng.random_range(0.0..2.0 * PI))?;
            let f = fingerprint(&strip.region(), &x_o, &dirs, 1e6)?;
            let mut counts = [0usize; 3];
            for ids in &f.hit_facets {
                match ids.as_slice() {
                    [] => counts[2] += 1,
                    [id] => counts[*id] += 1,
                    _ => {}
                }
            }
            let mut lines = [counts[0], counts[1]];
            lines.sort_unstable();
            let strip_ok = (lines == [2, 3] && counts[2] == 0) || (lines == [2, 2] && counts[2] == 1);
            Ok((hex, strip_ok))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = QdReport {
        hexagon_trials: trials,
        hexagon_violations: 0,
        hexagon_examples: Vec::new(),
        strip_trials: trials,
        strip_violations: 0,
    };
    for (hex, strip_ok) in results {
        if let Some(example) = hex {
            report.hexagon_violations += 1;
            if report.hexagon_examples.len() < 20 {
                report.hexagon_examples.push(example);
            }
        }
        if !strip_ok {
            report.strip_violations += 1;
        }
    }
    Ok(report)
}
