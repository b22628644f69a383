mod common;

use highway_toll::equity::{gini, lorenz, rank_correlations};
use highway_toll::game::{core_check, core_check_exhaustive};
use highway_toll::{
    block_structured_matrix, family_allocate, game_from, random_matrix, scs, ses, sps, BuiltinScheme, Method,
    TollMatrix,
};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = TollMatrix> {
    (1usize..8, prop_oneof![Just(0.3), Just(0.6), Just(1.0)], any::<u64>())
        .prop_map(|(n, d, seed)| random_matrix(n, d, 10.0, seed).unwrap())
}

fn pair() -> impl Strategy<Value = (TollMatrix, TollMatrix)> {
    (1usize..8, any::<u64>(), any::<u64>())
        .prop_map(|(n, a, b)| (random_matrix(n, 0.6, 10.0, a).unwrap(), random_matrix(n, 0.6, 10.0, b).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn methods_are_efficient_and_nonnegative(t in matrix()) {
        for m in Method::ALL {
            let x = m.apply(&t);
            prop_assert!((x.total() - t.total()).abs() <= 1e-9 * t.total().max(1.0));
            prop_assert!(x.as_slice().iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn ses_and_scs_are_additive((a, b) in pair()) {
        let sum = a.plus(&b).unwrap();
        for f in [ses, scs] {
            let lhs = f(&sum);
            let rhs: Vec<f64> = f(&a).as_slice().iter().zip(f(&b).as_slice()).map(|(x, y)| x + y).collect();
            prop_assert!(common::max_abs_diff(lhs.as_slice(), &rhs) < 1e-9);
        }
    }

    #[test]
    fn sps_scales_with_positive_factor(t in matrix(), c in 0.1f64..5.0) {
        let x = sps(&t.scaled(c).unwrap());
        let y: Vec<f64> = sps(&t).as_slice().iter().map(|v| c * v).collect();
        prop_assert!(common::max_abs_diff(x.as_slice(), &y) < 1e-9 * c.max(1.0) * t.total().max(1.0));
    }

    #[test]
    fn worth_decomposes_over_blocks(t in matrix(), mask in any::<u64>()) {
        let game = game_from(&t).unwrap();
        let s = highway_toll::Coalition(mask & ((1u64 << t.n()) - 1));
        prop_assert!((game.value(s) - game.value_by_blocks(s)).abs() < 1e-12);
        prop_assert!((game.value(s) - common::worth(&t, s.0 as usize)).abs() < 1e-12);
    }

    #[test]
    fn interval_core_check_matches_exhaustive(t in matrix(), noise in prop::collection::vec(0.0f64..1.0, 8)) {
        let game = game_from(&t).unwrap();
        let x = ses(&t);
        // shift mass towards a random segment to produce non-members too
        let n = t.n();
        let mut shares = x.into_vec();
        let target = (noise[0] * n as f64) as usize % n;
        for (i, s) in shares.iter_mut().enumerate() {
            if i != target {
                *s *= 1.0 - noise[i % 8];
            }
        }
        let deficit = t.total() - shares.iter().sum::<f64>();
        shares[target] += deficit;
        let y = highway_toll::Allocation::new(shares).unwrap();
        let interval = core_check(&game, &y).unwrap().is_member;
        prop_assert_eq!(interval, core_check_exhaustive(&game, &y, 1e-9).unwrap());
    }

    #[test]
    fn family_matches_direct_methods(t in matrix()) {
        for (scheme, m) in [(BuiltinScheme::Ses, Method::Ses), (BuiltinScheme::Sps, Method::Sps), (BuiltinScheme::Scs, Method::Scs)] {
            let f = family_allocate(&t, &scheme).unwrap();
            prop_assert!(f.max_abs_diff(&m.apply(&t)) <= 1e-12 * t.total().max(1.0));
        }
    }

    #[test]
    fn gini_invariances(v in prop::collection::vec(0.0f64..100.0, 2..20), c in 0.01f64..100.0, rot in 0usize..20) {
        prop_assume!(v.iter().sum::<f64>() > 0.0);
        let g = gini(&v).unwrap();
        prop_assert!((0.0..1.0).contains(&g));
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        prop_assert!((gini(&scaled).unwrap() - g).abs() < 1e-12);
        let mut rotated = v.clone();
        rotated.rotate_left(rot % v.len());
        prop_assert!((gini(&rotated).unwrap() - g).abs() < 1e-12);
        prop_assert_eq!(lorenz(&rotated).unwrap(), lorenz(&v).unwrap());
        let l = lorenz(&v).unwrap();
        prop_assert!(l.points.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-15));
        prop_assert!(l.points.iter().all(|(p, share)| *share <= p + 1e-12));
    }

    #[test]
    fn correlations_are_symmetric_and_affine_invariant(
        x in prop::collection::vec(0.0f64..100.0, 3..15),
        a in 0.1f64..10.0,
        b in -5.0f64..5.0,
    ) {
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| v * ((i % 3) as f64 + 0.5)).collect();
        let (Ok(c), Ok(d)) = (rank_correlations(&x, &y), rank_correlations(&y, &x)) else { return Ok(()) };
        prop_assert!((c.spearman - d.spearman).abs() < 1e-12 && (c.pearson - d.pearson).abs() < 1e-12);
        let moved: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let e = rank_correlations(&moved, &y).unwrap();
        prop_assert!((e.pearson - c.pearson).abs() < 1e-9 && (e.spearman - c.spearman).abs() < 1e-9);
    }
}

#[test]
fn block_matrices_never_cross_blocks() {
    let t = block_structured_matrix(&[(1, 3), (4, 4), (5, 7)], 11).unwrap();
    assert!(t.is_subhighway(1, 3) && t.is_subhighway(4, 4) && t.is_subhighway(5, 7));
    assert!(t.trips().all(|(trip, _)| !trip.crosses(3) && !trip.crosses(4)));
}
