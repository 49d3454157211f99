use std::f64::consts::{PI, SQRT_2};

use proptest::prelude::*;

use regsimplex::bounds;
use regsimplex::hadamard::{generate, HadamardMatrix};
use regsimplex::matrix::{b2, Matrix};
use regsimplex::ohat::{self, OhatMatrix, PhaseChoice, PivotMode};
use regsimplex::planner::{self, PlanConfig, Planner};
use regsimplex::simplex::{self, SimplexEmbedding, Tolerances};

fn covered_order() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![
        1usize, 2, 4, 8, 12, 16, 20, 24, 28, 32, 36, 40, 44, 48, 52, 60, 64,
    ])
}

/// Independent Ô check: explicit AᵀA through `matmul`.
fn is_member(a: &OhatMatrix) -> bool {
    let body = a.body();
    let n = a.size();
    let gram = body.transpose().matmul(body).unwrap();
    let orthogonal = (0..n).all(|i| {
        (0..n).all(|j| (gram[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs() <= 1e-10 * n as f64)
    });
    let root = 1.0 / (n as f64).sqrt();
    orthogonal && (0..n).all(|i| (body[(i, 0)] - root).abs() <= 1e-12)
}

fn small_order() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![1usize, 2, 4, 8, 12, 20, 24])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fourier_is_member_with_bounded_norm(
        n in 2usize..60,
        seed in any::<u64>(),
    ) {
        let k = ohat::pair_count(n);
        let theta: Vec<f64> = (0..k)
            .map(|j| ((seed.wrapping_mul(6364136223846793005).wrapping_add(j as u64)) % 10_000) as f64 / 10_000.0 * 2.0 * PI)
            .collect();
        let a = ohat::fourier(n, &PhaseChoice::new(theta).unwrap()).unwrap();
        prop_assert!(is_member(&a));
        prop_assert!(a.norm().value() <= (2.0 / n as f64).sqrt() + 1e-12);
    }

    #[test]
    fn doubling_halves_norm_by_sqrt2(n in 2usize..30, seed in any::<u64>()) {
        let a = ohat::random_member(n, seed).unwrap();
        let d = ohat::double(&a);
        prop_assert_eq!(d.size(), 2 * n);
        prop_assert!(is_member(&d));
        let want = a.norm().value() / SQRT_2;
        prop_assert!((d.norm().value() - want).abs() <= 1e-15 * want);
        // independent Kronecker product agrees entrywise
        let k = b2().kronecker(a.body()).unwrap();
        prop_assert_eq!(&k, d.body());
    }

    #[test]
    fn any_pivot_loses_at_most_one(n in 3usize..20, seed in any::<u64>(), r in 0usize..64, c in 1usize..64) {
        let a = ohat::random_member(n, seed).unwrap();
        let (row, col) = (r % n, 1 + c % (n - 1));
        let out = ohat::reduce(&a, row, col).unwrap();
        prop_assert_eq!(out.size(), n - 1);
        prop_assert!(is_member(&out));
        prop_assert!(1.0 / out.norm().value() > 1.0 / a.norm().value() - 1.0);
    }

    #[test]
    fn exhaustive_never_worse_than_heuristic(n in 3usize..16, seed in any::<u64>()) {
        let a = ohat::random_member(n, seed).unwrap();
        let h = ohat::reduce_best(&a, PivotMode::Heuristic).unwrap();
        let e = ohat::reduce_best(&a, PivotMode::Exhaustive).unwrap();
        prop_assert!(e.norm().value() <= h.norm().value());
    }

    #[test]
    fn extraction_is_regular_and_contained(n in 2usize..40, seed in any::<u64>()) {
        let a = ohat::random_member(n, seed).unwrap();
        let s = simplex::extract(&a).unwrap();
        let r = simplex::verify(&s, &Tolerances::default()).unwrap();
        prop_assert!(r.pass, "{:?}", r);
        prop_assert!(r.containment_margin.abs() <= 1e-12);
        prop_assert!((s.edge_length() - a.edge_length()).abs() <= 1e-12 * s.edge_length());
    }

    #[test]
    fn kronecker_of_hadamards_is_hadamard(a in small_order(), b in small_order()) {
        let ha = generate(a).unwrap();
        let hb = generate(b).unwrap();
        let k = ha.kronecker(&hb).unwrap();
        prop_assert_eq!(k.order(), a * b);
        prop_assert!(HadamardMatrix::new(k.order(), k.entries().to_vec()).is_ok());
    }

    #[test]
    fn hadamard_rows_are_optimal(order in covered_order()) {
        let a = ohat::from_hadamard(&generate(order).unwrap());
        prop_assert!(is_member(&a));
        let n = order as f64;
        prop_assert!((a.norm().value() - 1.0 / n.sqrt()).abs() <= 1e-15);
    }

    #[test]
    fn embedding_serialisations_agree(n in 2usize..30, seed in any::<u64>()) {
        let s = simplex::extract(&ohat::random_member(n, seed).unwrap()).unwrap();
        let from_json = SimplexEmbedding::from_json(&s.to_json()).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let from_csv = SimplexEmbedding::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(from_json.vertices(), s.vertices());
        prop_assert_eq!(from_csv.vertices(), s.vertices());
    }

    #[test]
    fn bounds_are_ordered(n in 1usize..20_000) {
        let r = bounds::bound_report(n).unwrap();
        prop_assert!(r.best_lower <= r.upper);
        prop_assert!(r.fourier_refined >= r.fourier_basic);
        prop_assert!(bounds::theorem1_check(n).holds());
        if let Some(g) = r.hadamard_gap {
            prop_assert!(g.value <= r.upper);
            prop_assert_eq!(g.exact, g.k == 1);
        }
    }

    #[test]
    fn gap_bound_decreases_at_fixed_order(h in 3usize..5_000, k in 1usize..40) {
        prop_assume!(k + 1 < h);
        let a = bounds::hadamard_gap_formula(h - k, k);
        let b = bounds::hadamard_gap_formula(h - k - 1, k + 1);
        prop_assert!(b < a);
    }
}

#[test]
fn plans_are_deterministic_and_replayable() {
    let first = Planner::default();
    let second = Planner::default();
    for n in (1..=120).chain([255, 300, 400]) {
        let a = first.plan(n).unwrap();
        let b = second.plan(n).unwrap();
        assert_eq!(a, b, "n = {n}");
        let m = planner::replay(&a).unwrap();
        assert_eq!(m.norm().value().to_bits(), a.achieved_norm.to_bits());
        assert!(is_member(&m));
        let edge = 1.0 / (SQRT_2 * a.achieved_norm);
        assert_eq!(a.achieved_edge, edge);
        assert!(a.achieved_edge >= a.bound_predicted - 1e-9, "n = {n}");
    }
}

#[test]
fn every_strategy_dominates_its_bound() {
    for strategy in planner::Strategy::ALL {
        let planner = Planner::new(PlanConfig {
            strategy: Some(strategy),
            ..PlanConfig::default()
        });
        for n in 1..=200 {
            if let Ok(p) = planner.plan(n) {
                assert_eq!(p.strategy, strategy);
                assert!(
                    p.achieved_edge >= p.bound_predicted - 1e-9,
                    "{strategy} n={n}: {} < {}",
                    p.achieved_edge,
                    p.bound_predicted
                );
            }
        }
    }
}

#[test]
fn reduction_chains_meet_gap_formula() {
    let planner = Planner::default();
    for n in 1..=200 {
        let p = planner.plan(n).unwrap();
        if p.strategy == planner::Strategy::Reduce {
            let k = p.reductions() + 1;
            let want = (((n + k) as f64).sqrt() - k as f64 + 1.0) / SQRT_2;
            assert!(p.achieved_edge >= want - 1e-9, "n = {n}");
        }
    }
}

#[test]
fn exhaustive_config_is_no_worse() {
    let heuristic = Planner::default();
    let exhaustive = Planner::new(PlanConfig {
        pivot: PivotMode::Exhaustive,
        ..PlanConfig::default()
    });
    for n in [5, 6, 10, 13, 22, 30, 45] {
        let h = heuristic.plan(n).unwrap();
        let e = exhaustive.plan(n).unwrap();
        assert!(e.achieved_edge >= h.achieved_edge - 1e-12, "n = {n}");
        planner::replay(&e).unwrap();
    }
}

#[test]
fn sweep_hits_upper_bound_at_hadamard_dimensions() {
    let records = planner::sweep(1, 100, &PlanConfig::default()).unwrap();
    for r in &records {
        let exact = ((r.n as f64 + 1.0) / (2.0 * r.n as f64)).sqrt();
        assert!(r.edge_ratio <= exact + 1e-12);
        if generate(r.n + 1).is_ok() {
            assert!((r.edge_ratio - exact).abs() <= 1e-12 * exact, "n = {}", r.n);
        }
    }
}

#[test]
fn phase_grid_never_loses() {
    let plain = Planner::new(PlanConfig {
        strategy: Some(planner::Strategy::Fourier),
        ..PlanConfig::default()
    });
    let grid = Planner::new(PlanConfig {
        strategy: Some(planner::Strategy::Fourier),
        phase_grid: Some(planner::DEFAULT_PHASE_GRID),
        seed: 17,
        ..PlanConfig::default()
    });
    for n in 2..40 {
        let a = plain.plan(n).unwrap();
        let b = grid.plan(n).unwrap();
        assert!(b.achieved_norm <= a.achieved_norm);
        planner::replay(&b).unwrap();
    }
}

#[test]
fn matrix_rejects_non_finite() {
    assert!(Matrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
}
