use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sunlab_core::approx::{find_luminosity, project, SunParams, TIE_TOL};
use sunlab_core::hull::{ball_hull_outer_with, interval, HullOptions};
use sunlab_core::metric::{
    additive_per_functional, associated_norm, check_monotone, is_between, monotone_path, random_triple,
    Monotonicity, NeighborRadius, PathOptions, Weights,
};
use sunlab_core::vector::{lerp, midpoint};
use sunlab_core::{Embedding, PointCloud, Space};

fn random_space(seed: u64, dim: usize, extra: usize) -> Space {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Space::random(dim, dim + extra, &mut rng).unwrap()
}

fn any_space() -> impl Strategy<Value = Space> {
    prop_oneof![
        (1usize..=4).prop_map(|n| Space::linf(n).unwrap()),
        (1usize..=4).prop_map(|n| Space::l1(n).unwrap()),
        (any::<u64>(), 2usize..=3, 0usize..=4).prop_map(|(seed, n, extra)| random_space(seed, n, extra)),
    ]
}

fn vec_of(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

/// Multiples of 1/8 in [-4, 4]; sums, differences and doublings stay exact.
fn dyadic_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-32i32..=32).prop_map(|k| k as f64 / 8.0), n)
}

fn space_and_points(k: usize) -> impl Strategy<Value = (Space, Vec<Vec<f64>>)> {
    any_space().prop_flat_map(move |s| {
        let n = s.dim();
        (Just(s), prop::collection::vec(vec_of(n), k))
    })
}

fn linf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn norm_axioms((s, pts) in space_and_points(2), t in -5.0f64..5.0) {
        let (x, y) = (&pts[0], &pts[1]);
        let nx = s.norm(x).unwrap();
        prop_assert!(nx >= 0.0);
        prop_assert_eq!(s.norm(&vec![0.0; s.dim()]).unwrap(), 0.0);
        if x.iter().any(|v| *v != 0.0) {
            prop_assert!(nx > 0.0);
        }
        let scaled: Vec<f64> = x.iter().map(|v| t * v).collect();
        prop_assert!((s.norm(&scaled).unwrap() - t.abs() * nx).abs() <= 1e-9 * (1.0 + nx));
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        prop_assert!(s.norm(&sum).unwrap() <= nx + s.norm(y).unwrap() + 1e-9);
        prop_assert!((s.distance(x, y).unwrap() - s.distance(y, x).unwrap()).abs() == 0.0);
    }

    #[test]
    fn builtin_closed_forms(n in 1usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let linf = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let l1: f64 = x.iter().map(|v| v.abs()).sum();
        prop_assert_eq!(Space::linf(n).unwrap().norm(&x).unwrap(), linf);
        prop_assert!((Space::l1(n).unwrap().norm(&x).unwrap() - l1).abs() <= 1e-12 * (1.0 + l1));
    }

    #[test]
    fn interval_contains_endpoints_and_segment((s, pts) in space_and_points(3), t in 0.0f64..=1.0) {
        let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
        let iv = interval(&s, x, y).unwrap();
        let vi = interval(&s, y, x).unwrap();
        prop_assert!(iv.contains(x).unwrap() && iv.contains(y).unwrap());
        prop_assert!(iv.contains(&lerp(x, y, t)).unwrap());
        prop_assert_eq!(iv.contains(z).unwrap(), vi.contains(z).unwrap());
        prop_assert!(interval(&s, x, x).unwrap().contains(x).unwrap());
    }

    #[test]
    fn midpoint_is_between((s, pts) in space_and_points(2)) {
        let w = Weights::default_for(&s);
        let (x, y) = (&pts[0], &pts[1]);
        let scale = 1.0 + s.norm(x).unwrap() + s.norm(y).unwrap();
        prop_assert!(is_between(&s, &w, x, &midpoint(x, y), y, 1e-9 * scale).unwrap());
        prop_assert!(is_between(&s, &w, x, x, y, 1e-9 * scale).unwrap());
    }

    #[test]
    fn associated_norm_is_equivalent((s, pts) in space_and_points(1)) {
        let w = Weights::default_for(&s);
        let x = &pts[0];
        let a = associated_norm(&s, &w, x).unwrap();
        let n = s.norm(x).unwrap();
        prop_assert!(w.min() * n <= a * (1.0 + 1e-12) + 1e-300);
        prop_assert!(a <= w.sum() * n * (1.0 + 1e-12));
    }

    #[test]
    fn betweenness_predicates_agree(s in any_space(), seed in any::<u64>()) {
        let w = Weights::uniform(s.pair_count());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let [x, z, y] = random_triple(s.dim(), &mut rng);
            let a = interval(&s, &x, &y).unwrap().contains(&z).unwrap();
            let b = additive_per_functional(&s, &x, &z, &y, 1e-9).unwrap();
            let c = is_between(&s, &w, &x, &z, &y, 1e-9).unwrap();
            prop_assert_eq!(a, b);
            prop_assert_eq!(b, c);
        }
    }

    #[test]
    fn monotonicity_reverses(s in any_space(), seed in any::<u64>(), len in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let pts: Vec<Vec<f64>> = (0..len)
            .map(|_| (0..s.dim()).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let fwd = check_monotone(&s, &pts, 1e-9).unwrap();
        let rev: Vec<Vec<f64>> = pts.iter().rev().cloned().collect();
        let bwd = check_monotone(&s, &rev, 1e-9).unwrap();
        prop_assert_eq!(fwd.monotone, bwd.monotone);
        for (i, v) in &fwd.verdicts {
            let flipped = match v {
                Monotonicity::Nondecreasing => Monotonicity::Nonincreasing,
                Monotonicity::Nonincreasing => Monotonicity::Nondecreasing,
                other => *other,
            };
            prop_assert_eq!(bwd.verdicts[i], flipped);
        }
    }

    #[test]
    fn found_paths_are_short_and_monotone((s, pts) in space_and_points(6)) {
        let w = Weights::default_for(&s);
        let Ok(m) = PointCloud::new(pts.clone()) else { return Ok(()) };
        if m.check_distinct().is_err() {
            return Ok(());
        }
        let direct = sunlab_core::metric::associated_distance(&s, &w, &pts[0], &pts[1]);
        let eps = 1e-9 * direct;
        let opts = PathOptions { eps: Some(eps), radius: NeighborRadius::Complete, monotone_tol: eps / w.min() };
        let path = monotone_path(&s, &w, &m, &pts[0], &pts[1], &opts).unwrap();
        prop_assert!(path.defect <= eps);
        prop_assert!(path.monotone.monotone, "{:?}", path);
        prop_assert_eq!(path.points.first().unwrap(), &pts[0]);
        prop_assert_eq!(path.points.last().unwrap(), &pts[1]);
    }

    #[test]
    fn projection_equivariance(
        n in 1usize..=3,
        l1 in any::<bool>(),
        pts in prop::collection::vec(dyadic_vec(3), 1..8),
        x in dyadic_vec(3),
        t in dyadic_vec(3),
    ) {
        let s = if l1 { Space::l1(n).unwrap() } else { Space::linf(n).unwrap() };
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|p| p[..n].to_vec()).collect();
        let (x, t) = (&x[..n], &t[..n]);
        let m = PointCloud::new(pts.clone()).unwrap();
        let base = project(&s, &m, x, 0.0).unwrap();

        let shifted = PointCloud::new(pts.iter().map(|p| p.iter().zip(t).map(|(a, b)| a + b).collect()).collect()).unwrap();
        let xt: Vec<f64> = x.iter().zip(t).map(|(a, b)| a + b).collect();
        let moved = project(&s, &shifted, &xt, 0.0).unwrap();
        prop_assert_eq!(&moved.nearest, &base.nearest);
        prop_assert_eq!(moved.distance, base.distance);

        let doubled = PointCloud::new(pts.iter().map(|p| p.iter().map(|v| 2.0 * v).collect()).collect()).unwrap();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let scaled = project(&s, &doubled, &x2, 0.0).unwrap();
        prop_assert_eq!(&scaled.nearest, &base.nearest);
        prop_assert_eq!(scaled.distance, 2.0 * base.distance);
    }

    #[test]
    fn singletons_are_suns(s in any_space(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let p: Vec<f64> = (0..s.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let x: Vec<f64> = p.iter().map(|v| v + rng.random_range(0.1..1.0)).collect();
        let m = PointCloud::new(vec![p.clone()]).unwrap();
        let params = SunParams { grid_size: 32, ..Default::default() };
        let r = find_luminosity(&s, &m, &x, &params).unwrap();
        prop_assert!(r.holds());
        prop_assert_eq!(project(&s, &m, &x, TIE_TOL).unwrap().nearest, vec![0]);
    }

    #[test]
    fn embedding_contracts_and_transports((s, pts) in space_and_points(3), mask in any::<u16>(), t in 0.0f64..=1.0) {
        let k = s.pair_count();
        let mut sel: Vec<usize> = (0..k).filter(|i| mask >> (i % 16) & 1 == 1).collect();
        if sel.is_empty() {
            sel.push(0);
        }
        let e = Embedding::new(s.clone(), sel).unwrap();
        let full = Embedding::full(s.clone()).unwrap();
        let (x, y) = (&pts[0], &pts[1]);
        let (ex, ey) = (e.embed_point(x).unwrap(), e.embed_point(y).unwrap());
        let d = s.distance(x, y).unwrap();
        prop_assert!(linf_dist(&ex, &ey) <= d * (1.0 + 1e-12));
        let (fx, fy) = (full.embed_point(x).unwrap(), full.embed_point(y).unwrap());
        prop_assert!((linf_dist(&fx, &fy) - d).abs() <= 1e-12 * (1.0 + d));

        let z = lerp(x, y, t);
        let target = e.target();
        let iv = interval(target, &ex, &ey).unwrap();
        prop_assert!(iv.contains(&e.embed_point(&z).unwrap()).unwrap());
        let z_off = &pts[2];
        if interval(&s, x, y).unwrap().contains(z_off).unwrap() {
            prop_assert!(iv.contains(&e.embed_point(z_off).unwrap()).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn interval_lies_in_sampled_hull(s in any_space(), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = s.dim();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let opts = HullOptions { grid_points: 2, ..HullOptions::for_dim(n) };
        let hull = ball_hull_outer_with(&s, &x, &y, 300, seed, &opts).unwrap();
        let iv = interval(&s, &x, &y).unwrap();
        // random points of the interval: rejection sampling from a padded box
        let d = s.distance(&x, &y).unwrap();
        let bounds = s.unit_ball_axis_bounds();
        let mid = midpoint(&x, &y);
        for _ in 0..400 {
            let z: Vec<f64> = (0..n).map(|i| mid[i] + bounds[i] * d * rng.random_range(-0.5..=0.5)).collect();
            if iv.contains_unchecked(&z) {
                prop_assert!(hull.contains_by_balls(&s, &z), "{:?} not in hull", z);
                prop_assert!(hull.contains_unchecked(&s, &z));
            }
        }
        for t in [0.0, 0.25, 0.5, 1.0] {
            prop_assert!(hull.contains_by_balls(&s, &lerp(&x, &y, t)));
        }
    }

    #[test]
    fn m_connectedness_transports_to_full_embedding(s in any_space(), seed in any::<u64>()) {
        use rand::Rng;
        use sunlab_core::hull::{m_connected, MConnectOptions};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..s.dim()).map(|_| (rng.random_range(-8i32..=8) as f64) / 4.0).collect())
            .collect();
        let Ok(m) = PointCloud::new(pts) else { return Ok(()) };
        if m.check_distinct().is_err() {
            return Ok(());
        }
        let e = Embedding::full(s.clone()).unwrap();
        let img = e.embed_cloud(&m).unwrap();
        prop_assert_eq!(img.collisions(), 0);
        // the full embedding is an isometry onto its image, so resolutions match
        let r = m.sampling_step(&s);
        let opts = MConnectOptions { resolution: Some(r), ..Default::default() };
        let src = m_connected(&s, &m, &opts).unwrap();
        let dst = m_connected(e.target(), &img.cloud, &opts).unwrap();
        if src.connected {
            prop_assert!(dst.connected, "{:?} vs {:?}", src, dst);
        }
    }
}
