//! Canned polytopes used by tests, verification suites and benchmarks.

use std::f64::consts::PI;

use nalgebra::DVector;

use super::{orthonormal_complement, unit, vector, ConvexPolytope, HalfSpace, Vector};
use crate::error::{Error, Result};

/// Axis-aligned cube `[lo, hi]^dim`. Facet `2k` is `x_k <= hi`, `2k+1` is `-x_k <= -lo`.
pub fn cube(dim: usize, lo: f64, hi: f64) -> ConvexPolytope {
    let mut hs = Vec::with_capacity(2 * dim);
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        hs.push(HalfSpace::from_slice(&e, hi).expect("unit normal"));
        e[k] = -1.0;
        hs.push(HalfSpace::from_slice(&e, -lo).expect("unit normal"));
    }
    ConvexPolytope::new(dim, hs).expect("cube dimensions")
}

/// Centered hypercube with edge length `side`.
pub fn hypercube(dim: usize, side: f64) -> ConvexPolytope {
    cube(dim, -side / 2.0, side / 2.0)
}

/// Regular `k`-gon centered at the origin with circumradius `r`; edge normals
/// at angles `rotation + 2π(i + 1/2)/k`.
pub fn regular_polygon(k: usize, r: f64, rotation: f64) -> Result<ConvexPolytope> {
    if k < 3 {
        return Err(Error::Domain(format!("polygon needs at least 3 sides, got {k}")));
    }
    let apothem = r * (PI / k as f64).cos();
    let hs = (0..k)
        .map(|i| {
            let a = rotation + 2.0 * PI * (i as f64 + 0.5) / k as f64;
            HalfSpace::from_slice(&[a.cos(), a.sin()], apothem)
        })
        .collect::<Result<Vec<_>>>()?;
    ConvexPolytope::new(2, hs)
}

/// Right prism over a regular `k`-gon of circumradius `r`, height `h`,
/// centered at the origin. The last two facets are the caps.
pub fn prism(k: usize, r: f64, h: f64) -> Result<ConvexPolytope> {
    let base = regular_polygon(k, r, 0.0)?;
    let mut hs: Vec<HalfSpace> = base
        .halfspaces()
        .iter()
        .map(|b| HalfSpace::from_slice(&[b.normal[0], b.normal[1], 0.0], b.offset))
        .collect::<Result<_>>()?;
    hs.push(HalfSpace::from_slice(&[0.0, 0.0, 1.0], h / 2.0)?);
    hs.push(HalfSpace::from_slice(&[0.0, 0.0, -1.0], h / 2.0)?);
    ConvexPolytope::new(3, hs)
}

/// Right prism `base × [-h/2, h/2]` one dimension up. The last two facets
/// are the caps; base facet ids are kept.
pub fn prism_over(base: &ConvexPolytope, h: f64) -> Result<ConvexPolytope> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("prism height must be positive, got {h}")));
    }
    let n = base.dim() + 1;
    let mut hs: Vec<HalfSpace> = base
        .halfspaces()
        .iter()
        .map(|b| {
            let mut normal = b.normal.iter().copied().collect::<Vec<_>>();
            normal.push(0.0);
            HalfSpace::from_slice(&normal, b.offset)
        })
        .collect::<Result<_>>()?;
    let mut cap = vec![0.0; n];
    cap[n - 1] = 1.0;
    hs.push(HalfSpace::from_slice(&cap, h / 2.0)?);
    cap[n - 1] = -1.0;
    hs.push(HalfSpace::from_slice(&cap, h / 2.0)?);
    let top = base.facet_ids().iter().copied().max().map_or(0, |m| m + 1);
    let mut ids = base.facet_ids().to_vec();
    ids.extend([top, top + 1]);
    ConvexPolytope::with_ids(n, hs, ids)
}

pub fn simplex_inradius(dim: usize, edge: f64) -> f64 {
    let n = dim as f64;
    edge / (2.0 * n * (n + 1.0)).sqrt()
}

/// Regular simplex with edge length `edge`, centroid at the origin.
pub fn regular_simplex(dim: usize, edge: f64) -> Result<ConvexPolytope> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    // Vertex directions of the standard simplex, expressed in the hyperplane
    // orthogonal to (1, ..., 1); facet normals are their negatives.
    let ones = unit(DVector::from_element(dim + 1, 1.0))?;
    let basis = orthonormal_complement(&ones);
    let centroid = 1.0 / (dim + 1) as f64;
    let inradius = simplex_inradius(dim, edge);
    let hs = (0..=dim)
        .map(|i| {
            let mut w = DVector::from_element(dim + 1, -centroid);
            w[i] += 1.0;
            let dir: Vector = basis.transpose() * w;
            Ok(HalfSpace {
                normal: unit(-dir)?,
                offset: inradius,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ConvexPolytope::new(dim, hs)
}

/// Polygon bounded by the edges of a counter-clockwise vertex cycle.
pub fn polygon_from_vertices(vertices: &[[f64; 2]]) -> Result<ConvexPolytope> {
    let k = vertices.len();
    if k < 3 {
        return Err(Error::Domain(format!("polygon needs at least 3 vertices, got {k}")));
    }
    let hs = (0..k)
        .map(|i| {
            let p = vertices[i];
            let q = vertices[(i + 1) % k];
            let n = vector(&[q[1] - p[1], p[0] - q[0]]);
            let offset = n[0] * p[0] + n[1] * p[1];
            HalfSpace::new(n, offset)
        })
        .collect::<Result<Vec<_>>>()?;
    ConvexPolytope::new(2, hs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_faces_have_expected_geometry() {
        for dim in 2..6 {
            let s = regular_simplex(dim, 1.0).unwrap();
            assert_eq!(s.len(), dim + 1);
            let vs = s.vertices().unwrap();
            assert_eq!(vs.len(), dim + 1);
            for a in 0..vs.len() {
                for b in (a + 1)..vs.len() {
                    let d = (&vs[a].point - &vs[b].point).norm();
                    assert!((d - 1.0).abs() < 1e-9, "edge {d}");
                }
            }
        }
    }

    #[test]
    fn polygon_from_vertices_matches_square() {
        let p = polygon_from_vertices(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(p.contains(&vector(&[0.5, 0.5]), 0.0).unwrap());
        assert!(!p.contains(&vector(&[1.1, 0.5]), 0.0).unwrap());
        assert!(p.validate().is_valid());
    }

    #[test]
    fn prism_is_bounded_and_valid() {
        let p = prism(5, 1.0, 1.5).unwrap();
        let report = p.validate();
        assert!(report.is_valid() && !report.unbounded);
    }
}
