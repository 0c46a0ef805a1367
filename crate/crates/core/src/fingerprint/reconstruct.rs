//! Polygon recovery from a planar fingerprint.
//!
//! Boundary points are taken in angular order and split into maximal runs
//! of collinear neighbours. A run of three or more points pins its edge. A
//! stretch of points between two pinned runs can only be split into
//! consecutive pairs, so it is also determined. When no run has three
//! points the pairing has two phases, one giving the polygon and the other
//! its dual, and the result is reported as ambiguous.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Fingerprint;
use crate::error::{Error, Result};
use crate::geometry::{ConvexPolytope, HalfSpace, Vector};

/// Collinearity tolerance as a fraction of the largest exit distance.
pub const COLLINEAR_REL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Ambiguity {
    Unique,
    PrimalDualAmbiguous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedPolygon {
    /// Corners in angular order around the observation point; vertex `k`
    /// joins edge lines `k` and `k + 1`.
    pub vertices: Vec<Vector>,
    pub edge_lines: Vec<HalfSpace>,
    /// Boundary points behind each edge line.
    pub run_lengths: Vec<usize>,
    pub ambiguity: Ambiguity,
}

impl ReconstructedPolygon {
    pub fn to_polytope(&self) -> Result<ConvexPolytope> {
        ConvexPolytope::new(2, self.edge_lines.clone())
    }
}

fn cross(a: &Vector, b: &Vector) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Distance from `q` to the line through `a` and `b`.
fn line_distance(a: &Vector, b: &Vector, q: &Vector) -> f64 {
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return (q - a).norm();
    }
    cross(&d, &(q - a)).abs() / len
}

pub fn reconstruct_2d(f: &Fingerprint) -> Result<ReconstructedPolygon> {
    if f.directions.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: f.directions.dim,
        });
    }
    let m = f.len();
    if m < 3 {
        return Err(Error::Reconstruction(format!("{m} rays cannot enclose a polygon")));
    }
    if let Some(i) = f.distances.iter().position(|t| !t.is_finite()) {
        return Err(Error::Reconstruction(format!(
            "ray {i} escapes: the region is open"
        )));
    }

    let mut order: Vec<(f64, usize)> = f
        .directions
        .directions
        .iter()
        .enumerate()
        .map(|(i, v)| (v[1].atan2(v[0]), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let step = 2.0 * PI / m as f64;
    for k in 0..m {
        let next = if k + 1 == m { order[0].0 + 2.0 * PI } else { order[k + 1].0 };
        if (next - order[k].0 - step).abs() > 1e-9 {
            return Err(Error::Reconstruction("directions are not evenly spaced".into()));
        }
    }
    let points: Vec<Vector> = order
        .iter()
        .map(|&(_, i)| &f.observation_point + f.directions.directions[i].as_ref() * f.distances[i])
        .collect();
    let scale = f.distances.iter().copied().fold(0.0, f64::max);
    let tol = COLLINEAR_REL_TOL * scale;

    let at = |i: isize| &points[i.rem_euclid(m as isize) as usize];
    let inner: Vec<bool> = (0..m as isize)
        .map(|i| line_distance(at(i - 1), at(i + 1), at(i)) < tol)
        .collect();
    if inner.iter().all(|&c| c) {
        return Err(Error::Reconstruction("all boundary points are collinear".into()));
    }

    // runs as (first, len) on the cyclic index set
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let start = inner.iter().position(|&c| !c).expect("some point is a run end");
    let mut k = 0;
    while k < m {
        let i = (start + k) % m;
        if inner[i] {
            let mut len = 0;
            while k < m && inner[(start + k) % m] {
                len += 1;
                k += 1;
            }
            runs.push(((i + m - 1) % m, len + 2));
        } else {
            k += 1;
        }
    }

    let ambiguity = if runs.is_empty() {
        Ambiguity::PrimalDualAmbiguous
    } else {
        Ambiguity::Unique
    };
    let runs = if runs.is_empty() {
        if m % 2 == 1 {
            return Err(Error::Reconstruction(format!(
                "{m} points with no collinear triple cannot pair up: some edge has a single hit"
            )));
        }
        (0..m / 2).map(|j| (2 * j, 2)).collect()
    } else {
        fill_gaps(&runs, m)?
    };

    for &(first, len) in &runs {
        let (a, b) = (&points[first], &points[(first + len - 1) % m]);
        for j in 1..len - 1 {
            let q = &points[(first + j) % m];
            if line_distance(a, b, q) >= tol {
                return Err(Error::Reconstruction(format!(
                    "point {} strays from the line of its run",
                    (first + j) % m
                )));
            }
        }
    }

    let edge_lines = runs
        .iter()
        .map(|&(first, len)| {
            let run: Vec<&Vector> = (0..len).map(|j| &points[(first + j) % m]).collect();
            fit_line(&run, &f.observation_point)
        })
        .collect::<Result<Vec<_>>>()?;
    let k = edge_lines.len();
    let vertices = (0..k)
        .map(|e| intersect(&edge_lines[e], &edge_lines[(e + 1) % k]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReconstructedPolygon {
        vertices,
        edge_lines,
        run_lengths: runs.iter().map(|r| r.1).collect(),
        ambiguity,
    })
}

/// Splits the stretches between pinned runs into consecutive pairs.
fn fill_gaps(pinned: &[(usize, usize)], m: usize) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (r, &(first, len)) in pinned.iter().enumerate() {
        out.push((first, len));
        let last = first + len - 1;
        let (next_first, _) = pinned[(r + 1) % pinned.len()];
        // points strictly between this run's end and the next run's start
        let gap = (next_first + m - last % m) % m;
        let between = gap.saturating_sub(1);
        if between % 2 == 1 {
            return Err(Error::Reconstruction(format!(
                "{between} points between pinned runs cannot pair up: some edge has a single hit"
            )));
        }
        for j in 0..between / 2 {
            out.push(((last + 1 + 2 * j) % m, 2));
        }
    }
    Ok(out)
}

/// Total-least-squares line through `run`, normal pointing away from `x_o`.
fn fit_line(run: &[&Vector], x_o: &Vector) -> Result<HalfSpace> {
    let n = run.len() as f64;
    let cx = run.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = run.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in run {
        let (dx, dy) = (p[0] - cx, p[1] - cy);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // direction of largest spread
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let mut normal = Vector::from_column_slice(&[-angle.sin(), angle.cos()]);
    let centroid = Vector::from_column_slice(&[cx, cy]);
    if normal.dot(&(&centroid - x_o)) < 0.0 {
        normal = -normal;
    }
    let offset = normal.dot(&centroid);
    HalfSpace::new(normal, offset)
}

fn intersect(a: &HalfSpace, b: &HalfSpace) -> Result<Vector> {
    let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
    if det.abs() < 1e-14 {
        return Err(Error::Reconstruction("consecutive edge lines are parallel".into()));
    }
    let x = (a.offset * b.normal[1] - a.normal[1] * b.offset) / det;
    let y = (a.normal[0] * b.offset - a.offset * b.normal[0]) / det;
    Ok(Vector::from_column_slice(&[x, y]))
}
