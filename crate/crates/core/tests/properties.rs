use std::f64::consts::PI;

use proptest::prelude::*;
use rbc_core::bounds::{rays_2d, rays_nd, rays_qd, QDGeometry};
use rbc_core::classify::{to_arrays, MLPModel};
use rbc_core::geometry::{hypercube, regular_simplex, ConvexPolytope, Ray};
use rbc_core::metrics::{polytope_metrics, ClassParams};
use rbc_core::qd::{gen_hexagon, gen_random_polygon, CellGeometry, Sample};
use rbc_core::rng::{rotation, seeded, unit_vector};
use rbc_core::sphere::ball_area;
use rbc_core::Vector;

fn shape(kind: u8, seed: u64) -> ConvexPolytope {
    match kind % 4 {
        0 => gen_random_polygon(&ClassParams::new(2, 2.0, 0.5, 2.0 * PI / 3.0).unwrap(), seed).unwrap(),
        1 => hypercube(3, 1.3),
        2 => regular_simplex(3, 1.7).unwrap(),
        _ => regular_simplex(4, 1.1).unwrap(),
    }
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn exit_is_the_first_boundary_crossing(kind in 0u8..4, seed in any::<u64>()) {
        let p = shape(kind, seed);
        let mut rng = seeded(seed);
        let x = p.sample_interior(&mut rng).unwrap();
        let v = unit_vector(&mut rng, p.dim());
        let exit = p.ray_exit(&Ray::new(x.clone(), v.clone()).unwrap(), 100.0).unwrap();
        prop_assert!(exit.t.is_finite());
        for k in 0..200 {
            let t = exit.t * k as f64 / 200.0;
            prop_assert!(p.contains(&(&x + v.as_ref() * t), 1e-12).unwrap());
        }
        let beyond = &x + v.as_ref() * (exit.t + 1e-7);
        prop_assert!(!p.contains(&beyond, 0.0).unwrap());
    }

    #[test]
    fn exits_scale_and_move_with_the_polytope(kind in 0u8..4, seed in any::<u64>(), s in 0.1f64..10.0) {
        let p = shape(kind, seed);
        let n = p.dim();
        let mut rng = seeded(seed ^ 1);
        let x = p.sample_interior(&mut rng).unwrap();
        let v = unit_vector(&mut rng, n);
        let t = p.ray_exit(&Ray::new(x.clone(), v.clone()).unwrap(), 1e3).unwrap().t;

        let scaled = p.scaled(s).unwrap();
        let ts = scaled.ray_exit(&Ray::new(&x * s, v.clone()).unwrap(), 1e4).unwrap().t;
        prop_assert!((ts - s * t).abs() <= 1e-9 * s * t);

        let rot = rotation(&mut rng, n);
        let shift = Vector::from_fn(n, |i, _| i as f64 - 0.5);
        let moved = p.transformed(&rot, &shift).unwrap();
        let dir = rbc_core::geometry::unit(&rot * v.as_ref()).unwrap();
        let tm = moved.ray_exit(&Ray::new(&rot * &x + &shift, dir).unwrap(), 1e3).unwrap().t;
        prop_assert!((tm - t).abs() <= 1e-9 * t.max(1.0));
    }

    #[test]
    fn bounded_shapes_never_escape(kind in 0u8..4, seed in any::<u64>()) {
        let p = shape(kind, seed);
        let diam = polytope_metrics(&p).unwrap().diameter;
        let mut rng = seeded(seed ^ 2);
        let x = p.sample_interior(&mut rng).unwrap();
        for _ in 0..50 {
            let v = unit_vector(&mut rng, p.dim());
            prop_assert!(p.ray_exit(&Ray::new(x.clone(), v).unwrap(), diam * 1.01).unwrap().is_finite());
        }
    }

    #[test]
    fn metrics_follow_rigid_motions_and_scaling(kind in 0u8..4, seed in any::<u64>(), s in 0.2f64..5.0) {
        let p = shape(kind, seed);
        let n = p.dim();
        let m = polytope_metrics(&p).unwrap();
        let rot = rotation(&mut seeded(seed ^ 3), n);
        let moved = p.transformed(&rot, &Vector::from_element(n, 0.7)).unwrap().scaled(s).unwrap();
        let mm = polytope_metrics(&moved).unwrap();
        prop_assert!((mm.diameter - s * m.diameter).abs() <= 1e-8 * s * m.diameter);
        for (id, w) in &m.inscriptions {
            prop_assert!((mm.inscriptions[id].0 - s * w.0).abs() <= 1e-7 * s * w.0);
        }
        prop_assert_eq!(m.exterior_angles.len(), mm.exterior_angles.len());
        for (a, b) in m.exterior_angles.iter().zip(&mm.exterior_angles) {
            prop_assert_eq!(a.pair, b.pair);
            prop_assert!((a.angle - b.angle).abs() < 1e-8);
        }
    }

    #[test]
    fn polygon_edges_and_turning(seed in any::<u64>()) {
        let p = shape(0, seed);
        let m = polytope_metrics(&p).unwrap();
        let b = p.polygon_boundary().unwrap();
        for i in 0..b.len() {
            prop_assert!((m.inscriptions[&b.edges[i]].0 - b.edge_length(i)).abs() < 1e-12);
        }
        let turning: f64 = m.exterior_angles.iter().map(|a| a.angle).sum();
        prop_assert!((turning - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn planar_ray_count_is_monotone(l in 0.1f64..1.0, extra in 0.0f64..2.0, alpha in 0.1f64..(PI / 2.0), dl in 0.0f64..0.1, da in 0.0f64..0.1) {
        let d = 1.0 + extra;
        let base = rays_2d(&ClassParams::new(2, d, l, alpha).unwrap()).unwrap().m;
        let smaller_l = rays_2d(&ClassParams::new(2, d, (l - dl).max(0.05), alpha).unwrap()).unwrap().m;
        let larger_d = rays_2d(&ClassParams::new(2, d + dl, l, alpha).unwrap()).unwrap().m;
        let smaller_a = rays_2d(&ClassParams::new(2, d, l, (alpha - da).max(0.05)).unwrap()).unwrap().m;
        prop_assert!(smaller_l >= base && larger_d >= base && smaller_a >= base);
    }

    #[test]
    fn dense_ray_count_grows_with_dimension(l in 0.2f64..1.0, alpha in 0.3f64..(PI / 2.0)) {
        let mut last = 0.0;
        for n in 2..8 {
            let b = rays_nd(&ClassParams::new(n, 1.0, l, alpha).unwrap()).unwrap();
            let phi = b.phi.unwrap();
            let closed = (2.0 * PI * n as f64).sqrt() / (phi / 2.0).sin().powi(n as i32 - 1);
            prop_assert!((b.raw - closed).abs() <= 1e-12 * closed);
            prop_assert!(b.raw > last);
            last = b.raw;
        }
    }

    #[test]
    fn qd_ray_count_grows_with_aperture(r in 0.0f64..1.0, dr in 0.0f64..0.2) {
        let m = |r: f64| rays_qd(&QDGeometry::new(r, 1.0).unwrap(), false).unwrap().m;
        prop_assert!(m((r + dr).min(1.0)) >= m(r));
    }

    #[test]
    fn cap_area_increases(n in 2usize..12, r in 0.01f64..3.0, dr in 1e-3f64..0.1) {
        prop_assert!(ball_area(n, (r + dr).min(PI)).unwrap() > ball_area(n, r).unwrap());
    }

    #[test]
    fn hexagons_are_centrally_symmetric(a in 0.0f64..0.5, w in 0.5f64..1.5, o in 0.0f64..(2.0 * PI), seed in any::<u64>()) {
        let cell = gen_hexagon(a * w, w, o, seed).unwrap();
        let CellGeometry::Polytope(p) = &cell.geometry else { panic!("hexagons are closed") };
        let b = p.polygon_boundary().unwrap();
        let c = b.vertex_centroid();
        for u in &b.vertices {
            let mirror = &c * 2.0 - u;
            let near = b.vertices.iter().map(|v| (v - &mirror).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(near < 1e-9);
        }
    }

    #[test]
    fn softmax_and_loss_are_well_formed(seed in any::<u64>(), batch in 1usize..16) {
        let model = MLPModel::reference(6, 5, seed).unwrap();
        let mut rng = seeded(seed);
        let samples: Vec<Sample> = (0..batch)
            .map(|i| Sample { features: (0..6).map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect(), label: i % 5 })
            .collect();
        for s in &samples {
            let p = model.forward(&s.features).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let (x, y) = to_arrays(&samples).unwrap();
        let (loss, g) = model.loss_and_gradients(x.view(), &y).unwrap();
        prop_assert!(loss >= 0.0);

        // gradients do not depend on the order of samples within a batch
        let reversed: Vec<Sample> = samples.iter().rev().cloned().collect();
        let (xr, yr) = to_arrays(&reversed).unwrap();
        let (loss_r, gr) = model.loss_and_gradients(xr.view(), &yr).unwrap();
        prop_assert!((loss - loss_r).abs() < 1e-12);
        for (a, b) in g.weights.iter().zip(&gr.weights) {
            prop_assert!(a.iter().zip(b).all(|(u, v)| (u - v).abs() < 1e-12));
        }
    }
}

#[test]
fn fingerprints_are_deterministic() {
    let p = shape(0, 5);
    let x = p.sample_interior(&mut seeded(6)).unwrap();
    let dirs = rbc_core::sphere::place_uniform_circle(31, 0.2).unwrap();
    let a = rbc_core::fingerprint::fingerprint(&p, &x, &dirs, 20.0).unwrap();
    let b = rbc_core::fingerprint::fingerprint(&p, &x, &dirs, 20.0).unwrap();
    assert_eq!(a, b);
    assert!(a.distances.iter().all(|t| t.is_finite()));
}
