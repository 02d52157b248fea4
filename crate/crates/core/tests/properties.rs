//! Property suites: linear-algebra identities, region sandwiches, and
//! synthesis of arbitrary feasible allocations.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use threewc::channel::{gaussian_matrix, sample_channel, sample_states};
use threewc::linalg::{
    column_space, log2_det_hpd, null_space, orthogonal_complement, projector, pseudo_inverse, rank,
    singular_values, subspace_intersection,
};
use threewc::polytope::{
    lemma1_bounds, lemma3_outer, polytope_contains, rat, theorem1_region, DofPoint,
};
use threewc::restricted::{estimate_dof, sweep_snr, Group};
use threewc::{
    ComplexMatrix, IntermittencyConfig, Node, NodeConfig, Scheme, StreamAllocation, Tolerance,
};

fn tol() -> Tolerance {
    Tolerance::default()
}

/// `rows x cols` matrix of rank `min(r, rows, cols)`.
fn low_rank(rows: usize, cols: usize, r: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = gaussian_matrix(rows, r, &mut rng);
    let c = gaussian_matrix(r, cols, &mut rng);
    &b * &c
}

fn close(a: &ComplexMatrix, b: &ComplexMatrix, eps: f64) -> bool {
    (a - b).max_abs() <= eps
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity(rows in 1usize..7, cols in 1usize..7, r in 0usize..7, seed in any::<u64>()) {
        let a = low_rank(rows, cols, r, seed);
        let rk = rank(&a, tol()).unwrap();
        prop_assert_eq!(rk, r.min(rows).min(cols));
        let n = null_space(&a, tol()).unwrap();
        prop_assert_eq!(rk + n.cols(), cols);
        prop_assert!((&a * &n).max_abs() < 1e-9);
        prop_assert!(close(&(&n.adjoint() * &n), &ComplexMatrix::identity(n.cols()), 1e-9));
    }

    #[test]
    fn moore_penrose_identities(rows in 1usize..6, cols in 1usize..6, r in 1usize..6, seed in any::<u64>()) {
        let a = low_rank(rows, cols, r, seed);
        let p = pseudo_inverse(&a, tol()).unwrap();
        prop_assert_eq!(p.shape(), (cols, rows));
        let eps = 1e-8 * (1.0 + a.max_abs()) * (1.0 + p.max_abs());
        prop_assert!(close(&(&(&a * &p) * &a), &a, eps));
        prop_assert!(close(&(&(&p * &a) * &p), &p, eps));
        let ap = &a * &p;
        let pa = &p * &a;
        prop_assert!(close(&ap, &ap.adjoint(), eps));
        prop_assert!(close(&pa, &pa.adjoint(), eps));
    }

    #[test]
    fn intersection_lies_in_both_spans(
        m in 2usize..7,
        ka in 1usize..5,
        kb in 1usize..5,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = gaussian_matrix(m, ka.min(m), &mut rng);
        let b = gaussian_matrix(m, kb.min(m), &mut rng);
        let q = subspace_intersection(&a, &b, tol()).unwrap();
        let (da, db) = (a.cols(), b.cols());
        prop_assert_eq!(q.cols(), (da + db).saturating_sub(m));
        let pa = projector(&a, tol()).unwrap();
        let pb = projector(&b, tol()).unwrap();
        prop_assert!(close(&(&pa * &q), &q, 1e-8));
        prop_assert!(close(&(&pb * &q), &q, 1e-8));
        prop_assert!(close(&(&q.adjoint() * &q), &ComplexMatrix::identity(q.cols()), 1e-9));
    }

    #[test]
    fn complement_is_orthogonal(rows in 1usize..7, cols in 1usize..7, r in 0usize..7, seed in any::<u64>()) {
        let a = low_rank(rows, cols, r, seed);
        let w = orthogonal_complement(&a, tol()).unwrap();
        let q = column_space(&a, tol()).unwrap();
        prop_assert_eq!(w.cols() + q.cols(), rows);
        prop_assert!((&w.adjoint() * &a).max_abs() < 1e-9 * (1.0 + a.max_abs()));
    }

    #[test]
    fn log_det_matches_singular_values(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian_matrix(rows, cols, &mut rng);
        let g = &ComplexMatrix::identity(rows) - &(&x * &x.adjoint()).scale(-1.0);
        let want: f64 = singular_values(&x).unwrap().iter().map(|s| (1.0 + s * s).log2()).sum();
        prop_assert!((log2_det_hpd(&g).unwrap() - want).abs() < 1e-9 * (1.0 + want));
    }

    /// Inner region sits inside both outer bounds.
    #[test]
    fn region_sandwich(
        m in (1usize..4, 0usize..3, 0usize..3),
        p in 1i64..8,
        coords in prop::array::uniform6(0i64..9),
    ) {
        let cfg = NodeConfig::new(m.0 + m.1 + m.2, m.0 + m.1, m.0).unwrap();
        let tau = rat(p, 8);
        let point = DofPoint::new(coords.map(|c| rat(c, 4))).unwrap();
        if polytope_contains(&theorem1_region(cfg, &tau).unwrap(), &point).unwrap() {
            prop_assert!(polytope_contains(&lemma1_bounds(cfg, &tau).unwrap(), &point).unwrap());
            prop_assert!(polytope_contains(&lemma3_outer(cfg, &tau).unwrap(), &point).unwrap());
        }
    }
}

fn random_allocation(cfg: NodeConfig, rng: &mut impl Rng) -> StreamAllocation {
    loop {
        let mut a = StreamAllocation::zero();
        for g in Group::all() {
            a.set(g.link, g.kind, rng.random_range(0..=2));
        }
        for n in Node::ALL {
            a.set_alignment(n, rng.random_range(0..=2));
        }
        if a.is_valid(cfg) {
            return a;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Any allocation satisfying the combined constraints is realizable on a
    /// generic channel, with exact zero-forcing, alignment and post-coding,
    /// and its fitted DoF matches the tau-weighted stream counts.
    #[test]
    fn feasible_allocations_realize_their_dof(
        m in (1usize..4, 0usize..3, 0usize..3),
        p in 1u32..8,
        seed in any::<u64>(),
    ) {
        let cfg = NodeConfig::new(m.0 + m.1 + m.2, m.0 + m.1, m.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alloc = random_allocation(cfg, &mut rng);
        let ch = sample_channel(cfg, seed).unwrap();
        let scheme = Scheme::synthesize(alloc.clone(), &ch, tol(), seed);
        prop_assert!(scheme.is_ok(), "{alloc:?}: {:?}", scheme.err());
        let scheme = scheme.unwrap();
        prop_assert!(scheme.zero_forcing_residual(&ch) <= 1e-8);
        let (leak, orth) = scheme.postcoder_residuals(&ch);
        prop_assert!(leak <= 1e-8, "leak {leak:e}");
        prop_assert!(orth <= 1e-9, "orth {orth:e}");
        let dims = scheme.alignment_dimensions(&ch, tol()).unwrap();
        prop_assert_eq!(dims, Node::ALL.map(|n| alloc.alignment(n)));

        let tau = p as f64 / 8.0;
        let ic = IntermittencyConfig::new(tau).unwrap();
        let states = sample_states(100, ic, seed).unwrap();
        // 40 dB leaves rare badly conditioned draws short of the asymptote
        let reports = sweep_snr(&scheme, &ch, &[60.0, 80.0, 100.0], ic, &states).unwrap();
        let d = estimate_dof(&reports).unwrap();
        for (got, want) in d.slopes.iter().zip(alloc.predicted_dof(tau)) {
            prop_assert!((got - want).abs() <= 0.05, "{:?} vs {:?}", d.slopes, alloc.predicted_dof(tau));
        }
    }
}
