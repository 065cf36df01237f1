//! Engine output against independent references: a dense whole-matrix
//! oracle, values frozen from a separate Python implementation, and the
//! Eagon-Northcott numbers for rational normal curves.

mod common;

use proptest::prelude::*;

use vsl_core::betti::{Engine, EngineConfig};
use vsl_core::bounds::VeroneseParams;
use vsl_core::koszul::{orbit_reduce, orbit_size, BlockKey, KoszulContext};
use vsl_core::linalg::{rational_rank, sparse_rank, PrimeField, DEFAULT_DENSE_LIMIT};
use vsl_core::polyspace::MultiDegree;

fn engine() -> Engine {
    Engine::new(EngineConfig::default()).unwrap()
}

fn row(e: &Engine, n: u32, d: u32, b: i64, q: i64, ps: std::ops::RangeInclusive<i64>) -> Vec<u64> {
    let pr = VeroneseParams::with_twist(n, d, b).unwrap();
    ps.map(|p| e.kpq_dim(pr, p, q).unwrap()).collect()
}

#[test]
fn twisted_tables_match_dense_oracle() {
    let e = engine();
    for (n, d, b) in [(1, 3, -2), (1, 2, 1), (2, 2, -3), (2, 2, 1), (1, 4, -1)] {
        let pr = VeroneseParams::with_twist(n, d, b).unwrap();
        let top = KoszulContext::new(pr).unwrap().v_dim() as i64;
        for q in 0..=n as i64 + 1 {
            for p in 0..=top {
                assert_eq!(
                    e.kpq_dim(pr, p, q).unwrap(),
                    common::dense_kpq(n as usize, d as i64, b, p, q),
                    "(n,d,b)=({n},{d},{b}) K_({p},{q})"
                );
            }
        }
    }
}

#[test]
fn blocks_in_one_orbit_share_rank() {
    let f = PrimeField::pinned(0);
    for (n, d, p, q) in [(2u32, 2u32, 3i64, 1i64), (2, 3, 2, 1), (1, 4, 2, 1)] {
        let ctx = KoszulContext::new(VeroneseParams::new(n, d).unwrap()).unwrap();
        let blocks = ctx.block_multidegrees(p, q).unwrap();
        let weights: Vec<MultiDegree> = blocks.iter().map(|(w, _)| w.clone()).collect();
        for (w, _) in &blocks {
            let rep = w.sorted_desc();
            let key = |mdeg| BlockKey {
                params: ctx.params,
                p,
                q,
                mdeg,
            };
            assert_eq!(
                sparse_rank(&ctx.differential_block(&key(w.clone())), f),
                sparse_rank(&ctx.differential_block(&key(rep)), f),
                "{w:?}"
            );
        }
        let reduced = orbit_reduce(&weights);
        let covered: u64 = reduced.iter().map(|(w, _)| orbit_size(w)).sum();
        assert_eq!(covered as usize, weights.len());
    }
}

#[test]
fn small_blocks_agree_over_two_primes_and_rationals() {
    let (f1, f2) = (PrimeField::pinned(0), PrimeField::pinned(5));
    for (n, d) in [(1u32, 2u32), (1, 3), (1, 4), (2, 2), (2, 3)] {
        let ctx = KoszulContext::new(VeroneseParams::new(n, d).unwrap()).unwrap();
        let top = ctx.v_dim() as i64;
        for q in 0..=n as i64 + 1 {
            for p in 1..=top {
                for (w, _) in ctx.block_multidegrees(p, q).unwrap() {
                    let m = ctx.differential_block(&BlockKey {
                        params: ctx.params,
                        p,
                        q,
                        mdeg: w,
                    });
                    let r = sparse_rank(&m, f1);
                    assert_eq!(r, sparse_rank(&m, f2));
                    if m.n_rows.max(m.n_cols) <= DEFAULT_DENSE_LIMIT {
                        assert_eq!(r, rational_rank(&m, DEFAULT_DENSE_LIMIT).unwrap());
                    }
                }
            }
        }
    }
}

// Reference values computed once by an independent Python script modulo 2^31 - 1.

#[test]
fn quartic_surface_matches_frozen_values() {
    let e = engine();
    let q1 = [0, 75, 536, 1947, 4488, 7095, 7920, 6237, 3344, 1089, 120, 0, 0, 0, 0, 0];
    assert_eq!(row(&e, 2, 4, 0, 1, 0..=15), q1);
    let q2 = row(&e, 2, 4, 0, 2, 0..=15);
    let nonzero: Vec<(i64, u64)> = (0..).zip(q2).filter(|&(_, k)| k > 0).collect();
    assert_eq!(nonzero, [(10, 55), (11, 24), (12, 3)]);
}

#[test]
fn quadric_threefold_matches_frozen_values() {
    let e = engine();
    assert_eq!(row(&e, 3, 2, 0, 1, 1..=5), [20, 64, 90, 64, 20]);
    assert_eq!(row(&e, 3, 2, 0, 1, 6..=10), [0; 5]);
    let q2 = row(&e, 3, 2, 0, 2, 0..=10);
    assert_eq!(q2.iter().sum::<u64>(), 1);
    assert_eq!(q2[6], 1);
    assert_eq!(row(&e, 3, 2, 0, 0, 0..=10), [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
    assert_eq!(row(&e, 3, 2, 0, 3, 0..=10), [0; 11]);
}

#[test]
fn rational_normal_curves_match_frozen_values() {
    let e = engine();
    assert_eq!(row(&e, 1, 5, 0, 1, 1..=4), [10, 20, 15, 4]);
    assert_eq!(row(&e, 1, 6, 0, 1, 1..=5), [15, 40, 45, 24, 5]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curves_follow_eagon_northcott(d in 2u32..=7, p in 0i64..=8) {
        let e = engine();
        let pr = VeroneseParams::new(1, d).unwrap();
        let expected = if (1..d as i64).contains(&p) {
            p as u64 * common::binom(d as u64, p as u64 + 1)
        } else {
            0
        };
        prop_assert_eq!(e.kpq_dim(pr, p, 1).unwrap(), expected);
        prop_assert_eq!(e.kpq_dim(pr, p, 2).unwrap(), 0);
    }

    #[test]
    fn engine_matches_dense_oracle_on_twists(n in 1u32..=2, d in 1u32..=3, b in -4i64..=2, p in 0i64..=6, q in 0i64..=3) {
        prop_assume!(n == 1 || d <= 2);
        let e = engine();
        let pr = VeroneseParams::with_twist(n, d, b).unwrap();
        prop_assert_eq!(e.kpq_dim(pr, p, q).unwrap(), common::dense_kpq(n as usize, d as i64, b, p, q));
    }
}
