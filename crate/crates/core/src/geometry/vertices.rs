//! Vertices derived on demand from the half-space representation.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{vector, ConvexPolytope, HalfSpace, Vector, TIGHT_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub point: Vector,
    /// Facet ids tight at the vertex.
    pub facets: Vec<usize>,
}

/// Boundary of a bounded polygon in counter-clockwise order.
///
/// `edges[i]` is a facet id; its edge runs from `vertices[i-1]` to
/// `vertices[i]` (cyclically), so `vertices[i]` joins `edges[i]` and
/// `edges[i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonBoundary {
    pub vertices: Vec<Vector>,
    pub edges: Vec<usize>,
}

impl PolygonBoundary {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_endpoints(&self, i: usize) -> (&Vector, &Vector) {
        let k = self.vertices.len();
        (&self.vertices[(i + k - 1) % k], &self.vertices[i])
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        let (a, b) = self.edge_endpoints(i);
        (b - a).norm()
    }

    /// Mean of the vertices.
    pub fn vertex_centroid(&self) -> Vector {
        let mut c = DVector::zeros(2);
        for v in &self.vertices {
            c += v;
        }
        c / self.vertices.len() as f64
    }
}

fn intersect_lines(a: &HalfSpace, b: &HalfSpace) -> Option<Vector> {
    let (a1, a2, b1, b2) = (a.normal[0], a.normal[1], b.normal[0], b.normal[1]);
    let det = a1 * b2 - a2 * b1;
    if det.abs() < 1e-14 {
        return None;
    }
    let x = (a.offset * b2 - a2 * b.offset) / det;
    let y = (a1 * b.offset - a.offset * b1) / det;
    Some(vector(&[x, y]))
}

impl ConvexPolytope {
    /// Polygon vertices by sorting edge normals by angle and intersecting
    /// neighbours. Redundant half-planes are pruned on the way.
    pub fn polygon_boundary(&self) -> Result<PolygonBoundary> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        let mut order: Vec<(f64, usize)> = self
            .halfspaces()
            .iter()
            .enumerate()
            .map(|(i, h)| (h.normal[1].atan2(h.normal[0]), i))
            .collect();
        order.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));

        // parallel normals: keep the tighter constraint
        let mut kept: Vec<(f64, usize)> = Vec::with_capacity(order.len());
        for (angle, i) in order {
            if let Some(&(last_angle, j)) = kept.last() {
                if angle - last_angle < 1e-12 {
                    if self.halfspaces()[i].offset < self.halfspaces()[j].offset {
                        kept.pop();
                        kept.push((angle, i));
                    }
                    continue;
                }
            }
            kept.push((angle, i));
        }
        if kept.len() > 1 && kept[0].0 + 2.0 * PI - kept[kept.len() - 1].0 < 1e-12 {
            let (first, last) = (kept[0].1, kept[kept.len() - 1].1);
            if self.halfspaces()[first].offset <= self.halfspaces()[last].offset {
                kept.pop();
            } else {
                kept.remove(0);
            }
        }

        loop {
            let k = kept.len();
            if k < 3 {
                return Err(Error::Unbounded);
            }
            for i in 0..k {
                let next = kept[(i + 1) % k].0 + if i + 1 == k { 2.0 * PI } else { 0.0 };
                if next - kept[i].0 >= PI - 1e-12 {
                    return Err(Error::Unbounded);
                }
            }
            let hs = self.halfspaces();
            let redundant = (0..k).find(|&i| {
                let prev = &hs[kept[(i + k - 1) % k].1];
                let next = &hs[kept[(i + 1) % k].1];
                let gap = {
                    let a = kept[(i + 1) % k].0 - kept[(i + k - 1) % k].0;
                    a.rem_euclid(2.0 * PI)
                };
                // neighbours' corner lies inside this half-plane: it cannot
                // contribute an edge
                gap < PI
                    && intersect_lines(prev, next)
                        .is_some_and(|p| hs[kept[i].1].signed_distance(&p) < -TIGHT_TOL)
            });
            match redundant {
                Some(i) => {
                    kept.remove(i);
                }
                None => break,
            }
        }

        let k = kept.len();
        let hs = self.halfspaces();
        let vertices = (0..k)
            .map(|i| {
                intersect_lines(&hs[kept[i].1], &hs[kept[(i + 1) % k].1])
                    .ok_or_else(|| Error::Degenerate("parallel adjacent edges".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = kept.iter().map(|&(_, i)| self.facet_ids()[i]).collect();
        Ok(PolygonBoundary { vertices, edges })
    }

    /// All vertices by `N`-wise hyperplane intersection with a feasibility
    /// filter. Costs `C(#facets, N)` small solves; intended for modest
    /// facet counts.
    pub fn vertices(&self) -> Result<Vec<Vertex>> {
        let n = self.dim();
        let k = self.len();
        let hs = self.halfspaces();
        let mut out: Vec<Vertex> = Vec::new();
        if k < n {
            return Ok(out);
        }
        let mut combo: Vec<usize> = (0..n).collect();
        loop {
            let a = DMatrix::from_fn(n, n, |r, c| hs[combo[r]].normal[c]);
            let b = DVector::from_fn(n, |r, _| hs[combo[r]].offset);
            if let Some(x) = a.lu().solve(&b) {
                if x.iter().all(|c| c.is_finite()) && self.contains(&x, TIGHT_TOL)? {
                    match out.iter_mut().find(|v| (&v.point - &x).amax() <= 1e-8) {
                        Some(_) => {}
                        None => {
                            let facets = hs
                                .iter()
                                .zip(self.facet_ids())
                                .filter(|(h, _)| h.signed_distance(&x).abs() <= TIGHT_TOL)
                                .map(|(_, &id)| id)
                                .collect();
                            out.push(Vertex { point: x, facets });
                        }
                    }
                }
            }
            // next combination in lexicographic order
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if combo[i] < k - n + i {
                    break;
                }
            }
            combo[i] += 1;
            for j in (i + 1)..n {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
}
