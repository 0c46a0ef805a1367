//! Shared fixtures for the benchmarks.

use std::f64::consts::PI;

use rbc_core::geometry::{hypercube, Vector};
use rbc_core::metrics::ClassParams;
use rbc_core::qd::{gen_dataset, gen_random_polygon, Dataset, DatasetConfig, LabelSet};
use rbc_core::rng::{rotation, seeded};
use rbc_core::ConvexPolytope;

/// A member of Q(2, 2, 0.5, 2π/3).
pub fn polygon(seed: u64) -> ConvexPolytope {
    let params = ClassParams::new(2, 2.0, 0.5, 2.0 * PI / 3.0).expect("valid class");
    gen_random_polygon(&params, seed).expect("class is not empty")
}

/// Unit cube in `dim` dimensions under a random rotation.
pub fn rotated_cube(dim: usize, seed: u64) -> ConvexPolytope {
    let rot = rotation(&mut seeded(seed), dim);
    hypercube(dim, 1.0)
        .transformed(&rot, &Vector::zeros(dim))
        .expect("rotation keeps the cube valid")
}

pub fn qd_dataset(n_per_class: usize, m: usize) -> Dataset {
    let config = DatasetConfig::new(n_per_class, m, 5.0, 0.03, false, 1).with_labels(LabelSet::HexagonVsStrip);
    gen_dataset(&config).expect("dataset parameters are valid")
}
