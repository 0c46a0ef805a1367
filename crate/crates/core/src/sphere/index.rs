//! Incremental proximity index for unit vectors.
//!
//! A static kd-tree over a flat coordinate array plus a small unsorted
//! buffer of recent insertions. The tree is rebuilt once the buffer grows
//! past [`PENDING_LIMIT`], which keeps rebuild cost amortized while queries
//! stay logarithmic.

const LEAF_SIZE: usize = 16;
const PENDING_LIMIT: usize = 128;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct DirectionIndex {
    dim: usize,
    /// Coordinates in insertion order.
    coords: Vec<f64>,
    /// Tree-ordered copy of the first `built` points; leaves are contiguous.
    tree_coords: Vec<f64>,
    tree_ids: Vec<usize>,
    nodes: Vec<Node>,
    built: usize,
}

impl DirectionIndex {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            coords: Vec::new(),
            tree_coords: Vec::new(),
            tree_ids: Vec::new(),
            nodes: Vec::new(),
            built: 0,
        }
    }

    pub fn from_points<'a>(dim: usize, points: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let mut index = Self::new(dim);
        for p in points {
            index.coords.extend_from_slice(p);
        }
        index.rebuild();
        index
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn insert(&mut self, p: &[f64]) -> usize {
        debug_assert_eq!(p.len(), self.dim);
        self.coords.extend_from_slice(p);
        if self.len() - self.built > PENDING_LIMIT {
            self.rebuild();
        }
        self.len() - 1
    }

    fn dist2(&self, i: usize, q: &[f64]) -> f64 {
        sq_dist(self.point(i), q)
    }

    /// Squared distance to the point at tree slot `slot`.
    fn slot_dist2(&self, slot: usize, q: &[f64]) -> f64 {
        sq_dist(&self.tree_coords[slot * self.dim..(slot + 1) * self.dim], q)
    }

    fn rebuild(&mut self) {
        let n = self.len();
        self.tree_ids = (0..n).collect();
        self.nodes.clear();
        self.built = n;
        if n > 0 {
            self.build_node(0, n);
        }
        let dim = self.dim;
        self.tree_coords.clear();
        for &i in &self.tree_ids {
            self.tree_coords
                .extend_from_slice(&self.coords[i * dim..(i + 1) * dim]);
        }
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let dim = self.dim;
        let mut axis = 0;
        let mut best_spread = -1.0;
        for a in 0..dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in &self.tree_ids[start..end] {
                let c = self.coords[i * dim + a];
                lo = lo.min(c);
                hi = hi.max(c);
            }
            if hi - lo > best_spread {
                best_spread = hi - lo;
                axis = a;
            }
        }
        let mid = start + (end - start) / 2;
        let coords = &self.coords;
        self.tree_ids[start..end].select_nth_unstable_by(mid - start, |&i, &j| {
            coords[i * dim + axis].total_cmp(&coords[j * dim + axis])
        });
        let value = self.coords[self.tree_ids[mid] * dim + axis];
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    /// Index of some stored point within squared Euclidean distance `r2`.
    pub fn any_within(&self, q: &[f64], r2: f64) -> Option<usize> {
        for i in self.built..self.len() {
            if self.dist2(i, q) <= r2 {
                return Some(i);
            }
        }
        if self.nodes.is_empty() {
            return None;
        }
        let mut stack = [0usize; 128];
        let mut top = 1;
        while top > 0 {
            top -= 1;
            match self.nodes[stack[top]] {
                Node::Leaf { start, end } => {
                    for slot in start..end {
                        if self.slot_dist2(slot, q) <= r2 {
                            return Some(self.tree_ids[slot]);
                        }
                    }
                }
                Node::Split {
                    axis,
                    value,
                    left,
                    right,
                } => {
                    let d = q[axis] - value;
                    let (near, far) = if d < 0.0 { (left, right) } else { (right, left) };
                    if d * d <= r2 {
                        stack[top] = far;
                        top += 1;
                    }
                    stack[top] = near;
                    top += 1;
                }
            }
        }
        None
    }

    /// Nearest stored point and its squared distance.
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        self.k_nearest(q, 1).into_iter().next()
    }

    /// The `k` nearest stored points, closest first.
    pub fn k_nearest(&self, q: &[f64], k: usize) -> Vec<(usize, f64)> {
        self.k_nearest_within(q, k, f64::INFINITY)
    }

    /// The `k` nearest stored points within squared distance `r2`, closest
    /// first; fewer when the ball holds fewer.
    pub fn k_nearest_within(&self, q: &[f64], k: usize, r2: f64) -> Vec<(usize, f64)> {
        let mut best: Vec<(usize, f64)> = Vec::with_capacity(k + 1);
        if k == 0 {
            return best;
        }
        let mut offer = |i: usize, d: f64, best: &mut Vec<(usize, f64)>| {
            if d > r2 {
                return;
            }
            if best.len() < k || d < best[best.len() - 1].1 {
                let pos = best.partition_point(|&(_, e)| e <= d);
                best.insert(pos, (i, d));
                best.truncate(k);
            }
        };
        for i in self.built..self.len() {
            offer(i, self.dist2(i, q), &mut best);
        }
        if !self.nodes.is_empty() {
            let mut offsets = vec![0.0; self.dim];
            self.k_nearest_node(0, q, k, r2, 0.0, &mut offsets, &mut best, &mut offer);
        }
        best
    }

    /// Depth-first search with the incremental box distance: `rd` is the
    /// squared distance from `q` to the current cell, `offsets` its per-axis
    /// components.
    #[allow(clippy::too_many_arguments)]
    fn k_nearest_node(
        &self,
        id: usize,
        q: &[f64],
        k: usize,
        r2: f64,
        rd: f64,
        offsets: &mut [f64],
        best: &mut Vec<(usize, f64)>,
        offer: &mut impl FnMut(usize, f64, &mut Vec<(usize, f64)>),
    ) {
        match self.nodes[id] {
            Node::Leaf { start, end } => {
                for slot in start..end {
                    offer(self.tree_ids[slot], self.slot_dist2(slot, q), best);
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let d = q[axis] - value;
                let (near, far) = if d < 0.0 { (left, right) } else { (right, left) };
                self.k_nearest_node(near, q, k, r2, rd, offsets, best, offer);
                let old = offsets[axis];
                let far_rd = rd - old * old + d * d;
                let bound = if best.len() < k { r2 } else { best[best.len() - 1].1 };
                if far_rd <= bound {
                    offsets[axis] = d;
                    self.k_nearest_node(far, q, k, r2, far_rd, offsets, best, offer);
                    offsets[axis] = old;
                }
            }
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{seeded, unit_vector};

    fn brute_k_nearest(points: &[Vec<f64>], q: &[f64], k: usize) -> Vec<usize> {
        let mut d: Vec<(usize, f64)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()))
            .collect();
        d.sort_by(|a, b| a.1.total_cmp(&b.1));
        d.into_iter().take(k).map(|(i, _)| i).collect()
    }

    #[test]
    fn queries_agree_with_brute_force() {
        let mut rng = seeded(11);
        for dim in [2, 3, 5] {
            let mut index = DirectionIndex::new(dim);
            let mut points = Vec::new();
            for _ in 0..700 {
                let p: Vec<f64> = unit_vector(&mut rng, dim).iter().copied().collect();
                index.insert(&p);
                points.push(p);
            }
            for _ in 0..200 {
                let q: Vec<f64> = unit_vector(&mut rng, dim).iter().copied().collect();
                let got: Vec<usize> = index.k_nearest(&q, 5).iter().map(|x| x.0).collect();
                assert_eq!(got, brute_k_nearest(&points, &q, 5));
                let (_, d_near) = index.nearest(&q).unwrap();
                assert_eq!(index.any_within(&q, d_near * 0.999), None);
                assert!(index.any_within(&q, d_near * 1.001).is_some());
            }
        }
    }
}
