use qmarko::bits::index_to_bits;
use qmarko::encode::{build_penalty_qubo, build_slack_ancilla_qubo};
use qmarko::oracle::exhaustive_portfolio_optimum;
use qmarko::qaoa::{
    optimize_angles, run_ansatz, run_baseline_penalty_qaoa, run_schedule, Mixer, MixerKind, QaoaParams,
    ScheduleConfig, Selection,
};
use qmarko::{generate_instance, to_ising, EnergyTable, IsingHamiltonian, Optimizer, PortfolioInstance};

fn infeasible_mass(inst: &PortfolioInstance, asset_probs: &[f64]) -> f64 {
    asset_probs
        .iter()
        .enumerate()
        .filter(|&(x, _)| !inst.is_feasible(&index_to_bits(x, inst.n)).unwrap())
        .map(|(_, p)| p)
        .sum()
}

#[test]
fn single_qubit_angles_match_grid_search() {
    let mut h = IsingHamiltonian::zero(1);
    h.fields[0] = 0.8;
    h.offset = 0.1;
    let table = EnergyTable::from_hamiltonian(&h).unwrap();
    let steps = 400;
    let mut grid_best = f64::INFINITY;
    for i in 0..steps {
        for j in 0..steps {
            let g = std::f64::consts::PI * i as f64 / steps as f64;
            let b = std::f64::consts::PI * j as f64 / steps as f64;
            let params = QaoaParams::new(vec![g], vec![b]).unwrap();
            let e = run_ansatz(&h, &params, &Mixer::Standard).unwrap().expectation(&table).unwrap();
            grid_best = grid_best.min(e);
        }
    }
    for optimizer in [Optimizer::Cobyla, Optimizer::NelderMead] {
        for seed in 0..3 {
            let search = optimize_angles(&h, 1, &Mixer::Standard, optimizer, 200, seed).unwrap();
            assert!(
                (search.best_expectation - grid_best).abs() < 1e-3,
                "{optimizer} seed {seed}: {} vs grid {grid_best}",
                search.best_expectation
            );
            assert_eq!(search.trace.len(), 200);
        }
    }
}

#[test]
fn schedule_records_are_self_consistent() {
    let config = ScheduleConfig::default();
    for seed in 1..=5 {
        let inst = generate_instance(3, 1, seed).unwrap();
        let record = run_schedule(&inst, &config, 2, MixerKind::Conditional, seed).unwrap();
        assert_eq!(record.reported, Selection::BestFeasible);
        let total: f64 = record.histogram.values().sum();
        assert!((total - 1.0).abs() < 1e-9);
        let pick = record.best_feasible.as_ref().expect("feasible pick");
        let bits: Vec<u8> = pick.bitstring.bytes().map(|b| b - b'0').collect();
        assert!(inst.is_feasible(&bits).unwrap());
        assert_eq!(pick.value, inst.classical_objective(&bits).unwrap());

        assert_eq!(record.trace.len(), record.iterations_used);

        let again = run_schedule(&inst, &config, 2, MixerKind::Conditional, seed).unwrap();
        assert_eq!(again, record);
    }
}

// Not a theorem: with raw angles the landscape at the final penalty differs
// from the one at the initial penalty, and seeds 7, 8, 9 end with slightly more
// infeasible mass than the same angles give at the initial weight.
#[test]
#[ignore = "fails on 3 of 15 seeds; kept runnable to reproduce the measurement"]
fn larger_penalty_leaves_no_more_infeasible_mass() {
    let config = ScheduleConfig::default();
    let mut violations = Vec::new();
    for seed in 1..=15 {
        let inst = generate_instance(3, 1, seed).unwrap();
        let record = run_schedule(&inst, &config, 2, MixerKind::Conditional, seed).unwrap();
        let final_mass = 1.0 - record.feasible_fraction;

        let program = build_slack_ancilla_qubo(&inst, config.beta_penalty_init).unwrap();
        let mixer = Mixer::for_program(MixerKind::Conditional, &program);
        let state = run_ansatz(&to_ising(&program), &record.final_params, &mixer).unwrap();
        let initial_mass = infeasible_mass(&inst, &state.marginal(&program.asset_qubits()).unwrap());
        if final_mass > initial_mass + 1e-12 {
            violations.push((seed, final_mass, initial_mass));
        }
    }
    assert!(violations.is_empty(), "final vs initial-penalty infeasible mass: {violations:?}");
}

// With a_card = 1e6 the phase gamma * E wraps many times per optimizer step,
// so the optimized state is usually worse than at a_card = 1 (9 of 15 seeds).
#[test]
#[ignore = "fails on 9 of 15 seeds; kept runnable to reproduce the measurement"]
fn heavy_cardinality_penalty_concentrates_on_k_assets() {
    let mut fails = Vec::new();
    for seed in 1..=15 {
        let inst = generate_instance(3, 1, seed).unwrap();
        let off_k = |a_card: f64| {
            let record = run_baseline_penalty_qaoa(&inst, a_card, 2, 200, Optimizer::Cobyla, seed).unwrap();
            record
                .asset_histogram
                .iter()
                .filter(|(s, _)| s.bytes().filter(|&b| b == b'1').count() != inst.k)
                .map(|(_, p)| p)
                .sum::<f64>()
        };
        let (light, heavy) = (off_k(1.0), off_k(1e6));
        if heavy >= light {
            fails.push((seed, heavy, light));
        }
    }
    assert!(fails.is_empty(), "{} of 15: {fails:?}", fails.len());
}

#[test]
fn baseline_reports_most_probable_with_honest_flag() {
    for seed in 1..=15 {
        let inst = generate_instance(3, 1, seed).unwrap();
        let record = run_baseline_penalty_qaoa(&inst, 1e3, 2, 200, Optimizer::Cobyla, seed).unwrap();
        assert_eq!(record.reported, Selection::MostProbable);
        let pick = record.reported_portfolio().unwrap();
        let bits: Vec<u8> = pick.bitstring.bytes().map(|b| b - b'0').collect();
        assert_eq!(pick.feasible, inst.is_feasible(&bits).unwrap());
        let top = record.asset_histogram.values().cloned().fold(0.0, f64::max);
        assert_eq!(pick.probability, top);
        let (_, optimum) = exhaustive_portfolio_optimum(&inst);
        assert!(!pick.feasible || pick.value >= optimum);
    }
}

#[test]
fn penalty_program_used_by_baseline_has_no_ancillas() {
    let inst = generate_instance(3, 1, 4).unwrap();
    let program = build_penalty_qubo(&inst, 1e3).unwrap();
    assert_eq!(program.num_vars(), 3);
    let record = run_baseline_penalty_qaoa(&inst, 1e3, 2, 10, Optimizer::NelderMead, 4).unwrap();
    assert_eq!(record.num_qubits, 3);
    assert_eq!(record.mixer, MixerKind::Standard);
}
