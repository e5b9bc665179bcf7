use proptest::prelude::*;
use qmarko::bits::index_to_bits;
use qmarko::encode::{
    build_cardinality_slack_qubo, build_penalty_qubo, build_slack_ancilla_qubo, cardinality_slack_bits,
};
use qmarko::oracle::exhaustive_qubo_minimum;
use qmarko::{generate_instance, to_ising, PortfolioInstance, QuboProgram};

fn instance_strategy() -> impl Strategy<Value = PortfolioInstance> {
    (1usize..=4)
        .prop_flat_map(|n| (Just(n), 1..=n, any::<u64>()))
        .prop_map(|(n, k, seed)| generate_instance(n, k, seed).unwrap())
}

fn program_strategy(max_m: usize) -> impl Strategy<Value = QuboProgram> {
    (1..=max_m).prop_flat_map(|m| {
        (
            prop::collection::vec(prop::collection::vec(-2.0f64..2.0, m), m),
            prop::collection::vec(-2.0f64..2.0, m),
            -2.0f64..2.0,
        )
            .prop_map(|(q, b, c)| QuboProgram::from_dense(&q, &b, c).unwrap())
    })
}

fn slack_direct(inst: &PortfolioInstance, beta: f64, x: &[u8]) -> f64 {
    let n = inst.n;
    let (w, s) = x.split_at(n);
    let pen: f64 = (0..n).map(|i| (w[i] as f64 - inst.alpha[i] + s[i] as f64).powi(2)).sum();
    inst.classical_objective(w).unwrap() + beta * pen
}

fn cardinality_direct(inst: &PortfolioInstance, a: f64, w: &[u8], slack: f64) -> f64 {
    let count: f64 = w.iter().map(|&b| b as f64).sum();
    inst.classical_objective(w).unwrap() + a * (count + slack - inst.k as f64).powi(2)
}

/// Penalty terms cancel to O(1) energies, so the achievable absolute accuracy
/// scales with the coefficient magnitudes rather than with the energy.
fn tolerance(program: &QuboProgram) -> f64 {
    let m = program.num_vars();
    let quad: f64 =
        (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).map(|(i, j)| program.quadratic(i, j).abs()).sum();
    let lin: f64 = program.linear().iter().map(|v| v.abs()).sum();
    8.0 * f64::EPSILON * (quad + lin + program.constant().abs()) + 1e-13
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ising_matches_qubo_on_every_bitstring(program in program_strategy(12)) {
        let h = to_ising(&program);
        let m = program.num_vars();
        for x in 0..1usize << m {
            let bits = index_to_bits(x, m);
            let q = program.qubo_energy(&bits).unwrap();
            prop_assert!((h.ising_energy(&bits).unwrap() - q).abs() < 1e-12);
            prop_assert!((h.energy_of_index(x) - q).abs() < 1e-12);
        }
    }

    #[test]
    fn scaling_keeps_argmin(program in program_strategy(8), factor in 0.01f64..100.0) {
        let (x0, e0) = exhaustive_qubo_minimum(&program);
        let scaled = program.scaled(factor);
        let (x1, e1) = exhaustive_qubo_minimum(&scaled);
        prop_assert_eq!(x0, x1);
        prop_assert!((e1 - factor * e0).abs() < 1e-9 * (1.0 + e1.abs()));
    }

    #[test]
    fn builders_match_direct_evaluation(inst in instance_strategy(), beta in 1.0f64..1e3) {
        let n = inst.n;

        let slack = build_slack_ancilla_qubo(&inst, beta).unwrap();
        let h = to_ising(&slack);
        for x in 0..1usize << (2 * n) {
            let bits = index_to_bits(x, 2 * n);
            let q = slack.qubo_energy(&bits).unwrap();
            let tol = tolerance(&slack);
            prop_assert!((h.ising_energy(&bits).unwrap() - q).abs() < tol);
            prop_assert!((slack_direct(&inst, beta, &bits) - q).abs() < tol);
        }

        let penalty = build_penalty_qubo(&inst, beta).unwrap();
        let h = to_ising(&penalty);
        for x in 0..1usize << n {
            let w = index_to_bits(x, n);
            let q = penalty.qubo_energy(&w).unwrap();
            let tol = tolerance(&penalty);
            prop_assert!((h.ising_energy(&w).unwrap() - q).abs() < tol);
            prop_assert!((cardinality_direct(&inst, beta, &w, 0.0) - q).abs() < tol);
        }

        let card = build_cardinality_slack_qubo(&inst, beta).unwrap();
        let bits_k = cardinality_slack_bits(inst.k);
        let h = to_ising(&card);
        for x in 0..1usize << (n + bits_k) {
            let bits = index_to_bits(x, n + bits_k);
            let s: f64 = (0..bits_k).map(|b| bits[n + b] as f64 * (1u64 << b) as f64).sum();
            let q = card.qubo_energy(&bits).unwrap();
            let tol = tolerance(&card);
            prop_assert!((h.ising_energy(&bits).unwrap() - q).abs() < tol);
            let d = cardinality_direct(&inst, beta, &bits[..n], s);
            prop_assert!((d - q).abs() < tol, "bits={:?} direct={} qubo={}", bits, d, q);
        }
    }

    #[test]
    fn penalty_energy_grows_only_on_violations(inst in instance_strategy(), beta in 1.0f64..100.0) {
        let n = inst.n;
        let low = build_slack_ancilla_qubo(&inst, beta).unwrap();
        let high = build_slack_ancilla_qubo(&inst, 2.0 * beta).unwrap();
        for x in 0..1usize << (2 * n) {
            let bits = index_to_bits(x, 2 * n);
            let satisfied = (0..n).all(|i| bits[i] as f64 + bits[n + i] as f64 == inst.alpha[i]);
            let (e1, e2) = (low.qubo_energy(&bits).unwrap(), high.qubo_energy(&bits).unwrap());
            if satisfied {
                prop_assert!((e1 - e2).abs() < 1e-12);
            } else {
                prop_assert!(e2 > e1);
            }
        }
    }

    #[test]
    fn penalty_zero_set_is_exactly_the_satisfying_assignments(
        n in 1usize..=4,
        mask in any::<u8>(),
        beta in 0.1f64..10.0,
    ) {
        let alpha: Vec<f64> = (0..n).map(|i| ((mask >> i) & 1) as f64).collect();
        let inst = PortfolioInstance::new(vec![0.0; n], vec![vec![0.0; n]; n], alpha.clone(), n).unwrap();
        let program = build_slack_ancilla_qubo(&inst, beta).unwrap();
        for x in 0..1usize << (2 * n) {
            let bits = index_to_bits(x, 2 * n);
            let satisfied = (0..n).all(|i| bits[i] as f64 + bits[n + i] as f64 == alpha[i]);
            let e = program.qubo_energy(&bits).unwrap();
            prop_assert_eq!(e.abs() < 1e-12, satisfied, "x={:?} e={}", bits, e);
        }
    }
}

#[test]
fn single_asset_without_threshold_forces_zero() {
    let inst = PortfolioInstance::new(vec![0.0], vec![vec![0.0]], vec![0.0], 1).unwrap();
    let program = build_slack_ancilla_qubo(&inst, 1.0).unwrap();
    let (x, e) = exhaustive_qubo_minimum(&program);
    assert_eq!(x, vec![0, 0]);
    assert_eq!(e, 0.0);
    assert_eq!(program.qubo_energy(&[1, 0]).unwrap(), 1.0);
}

#[test]
fn serialized_programs_round_trip() {
    let inst = generate_instance(3, 1, 9).unwrap();
    let program = build_slack_ancilla_qubo(&inst, 100.0).unwrap();
    let back: QuboProgram = serde_json::from_str(&program.to_json()).unwrap();
    assert_eq!(back, program);
    let h = to_ising(&program);
    let back: qmarko::IsingHamiltonian = serde_json::from_str(&h.to_json()).unwrap();
    assert_eq!(back, h);
}
