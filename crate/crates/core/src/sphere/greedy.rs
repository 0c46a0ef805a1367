//! Inductive placement of a φ-separated, φ-dense direction set.
//!
//! Each new direction must lie outside every closed φ-ball around the
//! directions already placed. Candidates come from a [`CandidateOracle`].
//! Exhausting the uncovered set cannot be decided by sampling, so after a
//! long run of consecutive rejected uniform candidates the set is probed for
//! density; a passing probe run ends the placement and is kept as its
//! certificate. Uncovered probes of a failing run are admissible and join
//! the set.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::index::DirectionIndex;
use super::DirectionSet;
use crate::error::{Error, Result};
use crate::geometry::UnitDirection;
use crate::rng::{derive_seed, seeded, unit_vector, SeededRng};

/// Source of candidate directions for [`place_greedy`].
///
/// Rejections of [`propose`](Self::propose) candidates drive the stopping
/// rule, so those should be uniform on the sphere. [`refine`](Self::refine)
/// may aim anywhere; its candidates never affect when placement stops.
pub trait CandidateOracle {
    /// Next candidate, or `None` once the oracle can offer nothing more.
    fn propose(&mut self, placed: &DirectionIndex, phi: f64) -> Option<UnitDirection>;

    /// Follow-up candidate after `rejected` fell inside the covered set.
    fn refine(
        &mut self,
        _rejected: &UnitDirection,
        _placed: &DirectionIndex,
        _phi: f64,
    ) -> Option<UnitDirection> {
        None
    }
}

/// Uniform random candidates (normalized Gaussians), optionally capped.
#[derive(Debug, Clone)]
pub struct UniformOracle {
    dim: usize,
    rng: SeededRng,
    remaining: Option<usize>,
}

impl UniformOracle {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self {
            dim,
            rng: seeded(seed),
            remaining: None,
        }
    }

    /// Stops proposing after `budget` candidates.
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.remaining = Some(budget);
        self
    }
}

impl CandidateOracle for UniformOracle {
    fn propose(&mut self, _placed: &DirectionIndex, _phi: f64) -> Option<UnitDirection> {
        if let Some(left) = self.remaining.as_mut() {
            if *left == 0 {
                return None;
            }
            *left -= 1;
        }
        Some(unit_vector(&mut self.rng, self.dim))
    }
}

/// Uniform candidates whose rejections are followed up by hole search:
/// the points equidistant from `N`-subsets of the rejected candidate's
/// `N + 1` nearest placed directions. Such points sit in the holes between
/// balls, which is where the uncovered set shrinks to late in the
/// placement. Only every `stride`-th rejection is followed up (default 16).
#[derive(Debug, Clone)]
pub struct HoleSeekingOracle {
    dim: usize,
    rng: SeededRng,
    stride: usize,
    skipped: usize,
}

impl HoleSeekingOracle {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self {
            dim,
            rng: seeded(seed),
            stride: 16,
            skipped: 0,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride.max(1);
        self
    }
}

impl CandidateOracle for HoleSeekingOracle {
    fn propose(&mut self, _placed: &DirectionIndex, _phi: f64) -> Option<UnitDirection> {
        Some(unit_vector(&mut self.rng, self.dim))
    }

    fn refine(
        &mut self,
        rejected: &UnitDirection,
        placed: &DirectionIndex,
        phi: f64,
    ) -> Option<UnitDirection> {
        self.skipped += 1;
        if self.skipped < self.stride {
            return None;
        }
        self.skipped = 0;
        let n = self.dim;
        let near = placed.k_nearest(rejected.as_slice(), n + 1);
        if near.len() < n {
            return None;
        }
        let free = chord2(phi) * (1.0 + 1e-12);
        // drop each neighbour in turn (none when only N are available)
        let drops: Vec<Option<usize>> = if near.len() > n {
            (0..near.len()).rev().map(Some).collect()
        } else {
            vec![None]
        };
        for drop in drops {
            let rows: Vec<usize> = (0..near.len())
                .filter(|&i| Some(i) != drop)
                .map(|i| near[i].0)
                .collect();
            let Some(y) = equidistant(placed, &rows) else {
                continue;
            };
            if placed.any_within(y.as_slice(), free).is_none() {
                return Some(y);
            }
        }
        None
    }
}

/// The direction at equal distance from the `N` given members, on their
/// side of the sphere.
fn equidistant(placed: &DirectionIndex, members: &[usize]) -> Option<UnitDirection> {
    let n = placed.dim();
    let m = DMatrix::from_fn(n, n, |r, c| placed.point(members[r])[c]);
    // <y, c_i> = 1 for every chosen center
    let y = m.lu().solve(&DVector::from_element(n, 1.0))?;
    if !y.iter().all(|c| c.is_finite()) || y.norm() == 0.0 {
        return None;
    }
    Some(UnitDirection::new_normalize(y))
}

/// Walks from `q` towards a local maximum of the gap: each step moves to
/// the best point equidistant from `N` of the current `N + 1` nearest
/// members, while the gap grows past `floor` (a squared chord). Returns the
/// best point and its squared chord to the nearest member.
fn climb(index: &DirectionIndex, q: &UnitDirection, floor: f64) -> Option<(UnitDirection, f64)> {
    let n = index.dim();
    let mut best: Option<(UnitDirection, f64)> = None;
    let mut bar = floor;
    let mut current = q.clone();
    for _ in 0..16 {
        let near: Vec<usize> = index
            .k_nearest(current.as_slice(), n + 1)
            .into_iter()
            .map(|(j, _)| j)
            .collect();
        if near.len() < n {
            return None;
        }
        let mut moved = false;
        for drop in 0..near.len() {
            let members: Vec<usize> = near
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != drop || near.len() == n)
                .map(|(_, &j)| j)
                .take(n)
                .collect();
            let Some(y) = equidistant(index, &members) else {
                continue;
            };
            if index.any_within(y.as_slice(), bar).is_some() {
                continue;
            }
            let Some((_, d2)) = index.nearest(y.as_slice()) else {
                continue;
            };
            bar = d2;
            best = Some((y, d2));
            moved = true;
        }
        if !moved {
            break;
        }
        current = best.as_ref()?.0.clone();
    }
    best
}

/// Probes the sphere and climbs from every probe whose gap exceeds
/// `0.8 φ`, admitting the uncovered points it reaches. Returns how many
/// were added.
fn climb_near_misses(
    index: &mut DirectionIndex,
    directions: &mut Vec<UnitDirection>,
    phi: f64,
    probes: usize,
    seed: u64,
) -> usize {
    let dim = index.dim();
    let near_miss = chord2(0.8 * phi);
    let free = chord2(phi) * (1.0 + 1e-12);
    let chunks = probes.div_ceil(PROBE_CHUNK);
    let shared: &DirectionIndex = index;
    let found: Vec<Vec<UnitDirection>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seeded(derive_seed(seed, c as u64));
            let count = PROBE_CHUNK.min(probes - c * PROBE_CHUNK);
            let mut out = Vec::new();
            for _ in 0..count {
                let q = unit_vector(&mut rng, dim);
                if shared.any_within(q.as_slice(), near_miss).is_some() {
                    continue;
                }
                if let Some((y, d2)) = climb(shared, &q, near_miss) {
                    if d2 > free {
                        out.push(y);
                    }
                }
            }
            out
        })
        .collect();
    let mut added = 0;
    for y in found.into_iter().flatten() {
        if index.any_within(y.as_slice(), free).is_none() {
            index.insert(y.as_slice());
            directions.push(y);
            added += 1;
        }
    }
    added
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyConfig {
    /// Consecutive rejected uniform candidates before a density probe:
    /// `base + per_point * |P|`.
    pub rejection_base: usize,
    pub rejection_per_point: usize,
    /// Probe count of each density check.
    pub probes: usize,
    /// Probes drawn before each density check to climb from near misses
    /// into uncovered holes; 0 disables the search.
    pub hole_probes: usize,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            rejection_base: 1000,
            rejection_per_point: 50,
            probes: 100_000,
            hole_probes: 100_000,
        }
    }
}

/// Statistical evidence that a set is φ-dense.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCertificate {
    pub probes: usize,
    pub max_gap: f64,
    pub probe_seed: u64,
    /// Density checks run before one passed.
    pub checks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub probes: usize,
    pub max_observed_gap: f64,
    pub uncovered: usize,
    pub pass: bool,
    /// Up to [`MAX_WITNESSES`] uncovered probes.
    pub witnesses: Vec<UnitDirection>,
}

pub const MAX_WITNESSES: usize = 4096;
const PROBE_CHUNK: usize = 4096;
const HOLE_STREAM: u64 = 0x686f_6c65;

/// Squared chord length for great-circle distance `phi`.
pub(crate) fn chord2(phi: f64) -> f64 {
    let c = 2.0 * (phi / 2.0).sin();
    c * c
}

fn angle_from_chord2(d2: f64) -> f64 {
    2.0 * (d2.sqrt() / 2.0).min(1.0).asin()
}

/// Places directions on `S^(dim-1)` pairwise more than `phi` apart until
/// the set is certified `phi`-dense.
pub fn place_greedy<O: CandidateOracle>(
    dim: usize,
    phi: f64,
    seed: u64,
    oracle: &mut O,
) -> Result<DirectionSet> {
    place_greedy_with(dim, phi, seed, oracle, &GreedyConfig::default())
}

pub fn place_greedy_with<O: CandidateOracle>(
    dim: usize,
    phi: f64,
    seed: u64,
    oracle: &mut O,
    config: &GreedyConfig,
) -> Result<DirectionSet> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if !(phi > 0.0 && phi <= std::f64::consts::PI) {
        return Err(Error::Domain(format!("phi must lie in (0, π], got {phi}")));
    }
    if config.probes == 0 {
        return Err(Error::Domain("density check needs at least one probe".into()));
    }
    // strict separation with a relative margin far above rounding error
    let reject_below = chord2(phi) * (1.0 + 1e-12);
    let mut index = DirectionIndex::new(dim);
    let mut directions: Vec<UnitDirection> = Vec::new();
    let mut rejections = 0usize;
    let mut checks = 0usize;

    let admit = |u: &UnitDirection, index: &DirectionIndex| -> bool {
        u.len() == dim && index.any_within(u.as_slice(), reject_below).is_none()
    };

    loop {
        let limit = config.rejection_base + config.rejection_per_point * directions.len();
        if rejections >= limit {
            if config.hole_probes > 0 && !directions.is_empty() {
                let hole_seed = derive_seed(seed ^ HOLE_STREAM, checks as u64);
                climb_near_misses(&mut index, &mut directions, phi, config.hole_probes, hole_seed);
            }
            let probe_seed = derive_seed(seed, checks as u64);
            checks += 1;
            let report = probe_index(&index, phi, config.probes, probe_seed);
            if report.pass {
                let mut set = DirectionSet::new(dim, directions)?;
                set.density_radius = Some(phi);
                set.seed = Some(seed);
                set.certificate = Some(DensityCertificate {
                    probes: report.probes,
                    max_gap: report.max_observed_gap,
                    probe_seed,
                    checks,
                });
                return Ok(set);
            }
            // uncovered probes are admissible points themselves
            for w in report.witnesses {
                if admit(&w, &index) {
                    index.insert(w.as_slice());
                    directions.push(w);
                }
            }
            rejections = 0;
            continue;
        }
        let candidate = oracle
            .propose(&index, phi)
            .ok_or(Error::OracleExhausted {
                accepted: directions.len(),
            })?;
        if admit(&candidate, &index) {
            index.insert(candidate.as_slice());
            directions.push(candidate);
            rejections = 0;
        } else {
            rejections += 1;
            if let Some(refined) = oracle.refine(&candidate, &index, phi) {
                if admit(&refined, &index) {
                    index.insert(refined.as_slice());
                    directions.push(refined);
                }
            }
        }
    }
}

/// Probes `probes` uniform points and reports how far each is from its
/// nearest member of `set`.
pub fn verify_density(set: &DirectionSet, phi: f64, probes: usize, seed: u64) -> DensityReport {
    let index = DirectionIndex::from_points(set.dim, set.directions.iter().map(|d| d.as_slice()));
    probe_index(&index, phi, probes, seed)
}

fn probe_index(index: &DirectionIndex, phi: f64, probes: usize, seed: u64) -> DensityReport {
    let dim = index.dim();
    let covered = chord2(phi);
    let chunks = probes.div_ceil(PROBE_CHUNK);
    let results: Vec<(f64, usize, Vec<UnitDirection>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seeded(derive_seed(seed, c as u64));
            let count = PROBE_CHUNK.min(probes - c * PROBE_CHUNK);
            let mut max_gap: f64 = 0.0;
            let mut uncovered = 0;
            let mut witnesses = Vec::new();
            for _ in 0..count {
                let p = unit_vector(&mut rng, dim);
                let d2 = index
                    .nearest(p.as_slice())
                    .map_or(f64::INFINITY, |(_, d2)| d2);
                let gap = if d2.is_finite() {
                    angle_from_chord2(d2)
                } else {
                    std::f64::consts::PI
                };
                max_gap = max_gap.max(gap);
                if !(d2 <= covered) {
                    uncovered += 1;
                    if witnesses.len() < MAX_WITNESSES {
                        witnesses.push(p);
                    }
                }
            }
            (max_gap, uncovered, witnesses)
        })
        .collect();

    let mut report = DensityReport {
        probes,
        max_observed_gap: 0.0,
        uncovered: 0,
        pass: false,
        witnesses: Vec::new(),
    };
    for (gap, uncovered, witnesses) in results {
        report.max_observed_gap = report.max_observed_gap.max(gap);
        report.uncovered += uncovered;
        let room = MAX_WITNESSES - report.witnesses.len();
        report.witnesses.extend(witnesses.into_iter().take(room));
    }
    report.pass = report.uncovered == 0;
    report
}
