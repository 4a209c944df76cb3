//! Randomized invariants across the model spaces, hull, curves and I/O.

use std::collections::BTreeSet;

use hadamard::curves::{self, SampledCurve};
use hadamard::hull::{self, linear_coords};
use hadamard::io;
use hadamard::majorize::{self, TurningCurve};
use hadamard::spaces::{ModelSpace, Vector};
use hadamard::{fixtures, surfaces};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spaces3() -> Vec<ModelSpace> {
    vec![ModelSpace::euclidean(3), ModelSpace::hyperbolic(3), ModelSpace::klein(3), ModelSpace::product_h2_r()]
}

fn point(space: &ModelSpace, seed: u64, scale: f64) -> Vector {
    fixtures::random_point(space, &mut ChaCha8Rng::seed_from_u64(seed), scale)
}

fn extreme_set(h: &hull::ConvexHull) -> BTreeSet<usize> {
    h.vertices.iter().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_is_a_metric(seed in any::<u64>(), which in 0usize..4) {
        let space = &spaces3()[which];
        let (x, y, z) = (point(space, seed, 1.5), point(space, seed ^ 1, 1.5), point(space, seed ^ 2, 1.5));
        let (dxy, dyx) = (space.distance(&x, &y), space.distance(&y, &x));
        prop_assert!((dxy - dyx).abs() <= 1e-10 * (1.0 + dxy));
        prop_assert!(space.distance(&x, &x) <= 1e-7);
        prop_assert!(dxy <= space.distance(&x, &z) + space.distance(&z, &y) + 1e-9);
    }

    #[test]
    fn exp_inverts_log(seed in any::<u64>(), which in 0usize..4) {
        let space = &spaces3()[which];
        let (x, y) = (point(space, seed, 1.5), point(space, seed ^ 7, 1.5));
        let v = space.log_map(&x, &y);
        prop_assert!((space.norm(&x, &v) - space.distance(&x, &y)).abs() <= 1e-8 * (1.0 + space.norm(&x, &v)));
        let back = space.exp_map(&x, &v);
        prop_assert!(space.distance(&back, &y) <= 1e-8);
    }

    #[test]
    fn boosts_are_isometries(seed in any::<u64>(), axis in 0usize..3, s in -1.5f64..1.5) {
        let space = ModelSpace::hyperbolic(3);
        let (x, y) = (point(&space, seed, 1.5), point(&space, seed ^ 3, 1.5));
        let (bx, by) = (space.boost(&x, axis, s), space.boost(&y, axis, s));
        let (d0, d1) = (space.distance(&x, &y), space.distance(&bx, &by));
        prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0));
    }

    #[test]
    fn transport_preserves_inner_products(seed in any::<u64>(), which in 0usize..4) {
        let space = &spaces3()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let curve = fixtures::random_frenet_curve(space, &mut rng, 1.5, 200);
        let frame = fixtures::random_frame(space, &mut rng, curve.start());
        let (a, b) = (&frame[0] + &frame[1] * 0.3, &frame[1] - &frame[2] * 0.7);
        let (ta, tb) = (
            hadamard::transport::parallel_transport(space, &curve, &a).unwrap(),
            hadamard::transport::parallel_transport(space, &curve, &b).unwrap(),
        );
        let (g0, g1) = (space.inner(curve.start(), &a, &b), space.inner(curve.end(), &ta, &tb));
        prop_assert!((g0 - g1).abs() <= 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Hull contains every input point and every geodesic between two of them.
    #[test]
    fn hull_contains_geodesics(seed in any::<u64>(), hyperbolic in any::<bool>(), n in 8usize..60) {
        let space = if hyperbolic { ModelSpace::hyperbolic(3) } else { ModelSpace::euclidean(3) };
        let pts: Vec<Vector> = (0..n as u64).map(|k| point(&space, seed.wrapping_add(k), 1.2)).collect();
        let h = hull::convex_hull(&space, &pts).unwrap();
        let tol = 1e-9 * h.diameter();
        prop_assert!(h.containment_excess() <= tol);
        for k in 0..6 {
            let (p, q) = (&pts[k % n], &pts[(3 * k + 1) % n]);
            if space.distance(p, q) < 1e-9 {
                continue;
            }
            let g = space.geodesic(p, q, 16).unwrap();
            for x in &g.points {
                prop_assert!(h.signed_distance(linear_coords(&space, x).unwrap()) <= tol);
            }
        }
    }

    /// Rebuilding the hull from its own extreme points changes nothing, and
    /// neither does moving all points by an isometry.
    #[test]
    fn hull_is_idempotent_and_isometry_invariant(seed in any::<u64>(), n in 8usize..60, s in -1.0f64..1.0) {
        let space = ModelSpace::hyperbolic(3);
        let pts: Vec<Vector> = (0..n as u64).map(|k| point(&space, seed.wrapping_add(k), 1.0)).collect();
        let h = hull::convex_hull(&space, &pts).unwrap();
        let extreme: Vec<Vector> = h.vertices.iter().map(|&v| pts[v].clone()).collect();
        let again = hull::convex_hull(&space, &extreme).unwrap();
        prop_assert_eq!(again.vertices.len(), extreme.len());
        let moved: Vec<Vector> = pts.iter().map(|p| space.boost(p, 2, s)).collect();
        let hm = hull::convex_hull(&space, &moved).unwrap();
        prop_assert_eq!(extreme_set(&hm), extreme_set(&h));
    }

    #[test]
    fn total_curvature_ignores_direction(seed in any::<u64>(), which in 0usize..4) {
        let space = &spaces3()[which];
        let curve = fixtures::random_frenet_curve(space, &mut ChaCha8Rng::seed_from_u64(seed), 2.0, 300);
        let fwd = curves::total_curvature(space, &curve, None).unwrap();
        let back = curves::total_curvature(space, &curve.reversed(), None).unwrap();
        prop_assert!((fwd - back).abs() <= 1e-6 * (1.0 + fwd));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn majorant_postconditions_hold(seed in any::<u64>(), len in 0.5f64..2.5) {
        let space = ModelSpace::hyperbolic(2);
        let curve: SampledCurve = fixtures::random_frenet_curve(&space, &mut ChaCha8Rng::seed_from_u64(seed), len, 200);
        let m = majorize::majorize(&space, &curve).unwrap();
        prop_assert!(m.report.chord_deficit <= 1e-6);
        prop_assert!(m.report.properness_error <= 1e-8 * curve.length().max(1.0));
        prop_assert!(m.report.chord_convex);
        prop_assert!(m.report.turning_excess <= 1e-4);
        let back = TurningCurve::from_table(&m.curve.to_table()).unwrap();
        prop_assert!((back.length() - m.curve.length()).abs() <= 1e-12 * m.curve.length());
    }

    #[test]
    fn mesh_io_round_trip(seed in any::<u64>(), hyperbolic in any::<bool>()) {
        let space = if hyperbolic { ModelSpace::hyperbolic(3) } else { ModelSpace::euclidean(3) };
        let surface = fixtures::random_closed_surface(&space, &mut ChaCha8Rng::seed_from_u64(seed), 2).unwrap();
        let mut buf = Vec::new();
        io::write_mesh(&mut buf, &io::Mesh::from_surface(&surface)).unwrap();
        let back = io::read_mesh(&buf[..]).unwrap().into_surface().unwrap();
        prop_assert_eq!(&back.triangles, &surface.triangles);
        prop_assert_eq!(back.genus, surface.genus);
        let (a, b) = (surfaces::curvature_report(&space, &surface).unwrap(), surfaces::curvature_report(&space, &back).unwrap());
        prop_assert_eq!(a.total_abs, b.total_abs);
    }
}
