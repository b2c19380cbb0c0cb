use mfqec::gadgets::*;
use mfqec::noise::{enumerate_configs, NoiseModel};
use mfqec::statevec::gates;
use mfqec::steane::TestState;
use mfqec::tomography::*;

/// One data block and two auxiliaries coupled by three CZ gates; ideally the
/// identity, with failures needing two faults.
fn toy() -> Circuit {
    let mut roles = vec![Role::Data; 7];
    roles.extend([Role::Aux, Role::Aux]);
    let block = [0, 1, 2, 3, 4, 5, 6];
    Circuit {
        name: "toy".into(),
        layout: Layout::AllToAll,
        n_qubits: 9,
        ops: vec![
            Op::Gate(gates::cz(7, 0)),
            Op::Gate(gates::cz(7, 1)),
            Op::Gate(gates::cz(8, 2)),
        ],
        roles,
        inputs: vec![block],
        outputs: vec![block],
        logical: LogicalOp::Identity,
    }
}

fn exact_failure(circuit: &Circuit, model: &NoiseModel, test: TestState, k_min: usize) -> f64 {
    let locs = circuit.fault_locations(model);
    assert_eq!(locs.len(), 3);
    let (input, ideal) = circuit.test_io(test).unwrap();
    let ev = Evaluator::new(circuit, &ideal).unwrap();
    let mut rng = rand::rngs::mock::StepRng::new(0, 0);
    enumerate_configs(&locs, model, k_min, 3)
        .iter()
        .map(|cfg| {
            let b = run(
                circuit,
                &locs,
                cfg,
                input.as_ref(),
                ResetMode::branch(),
                &mut rng,
            )
            .unwrap();
            cfg.weight * ev.evaluate(b).unwrap().aggregated().failure()
        })
        .sum()
}

#[test]
fn toy_estimator_matches_enumeration() {
    let c = toy();
    let model = NoiseModel::new(0.3, 0.0, 0.5).unwrap();
    for k_min in [0, 1, 2] {
        // Configurations below k_min are outside the estimator by design.
        let exact = exact_failure(&c, &model, TestState::Single, k_min);
        assert!(exact > 0.01, "{exact}");
        let est = estimate_circuit_rates(&c, &model, k_min, 20_000, TestState::Single, 7).unwrap();
        let z = (est.failure - exact).abs() / est.failure_stderr;
        assert!(z < 4.0, "k_min={k_min}: {} vs {exact} ({z}σ)", est.failure);
    }
}

#[test]
fn noiseless_rates_vanish() {
    let m = NoiseModel::biased(0.0).unwrap();
    let est = estimate_logical_rates(&GadgetId::Rqec, &m, 0, 100, TestState::Single, 1).unwrap();
    assert!(est.rates.is_empty());
    assert_eq!(est.failure, 0.0);
}

#[test]
fn seeds_reproduce() {
    let m = NoiseModel::biased(1e-2).unwrap();
    let a = estimate_logical_rates(&GadgetId::Rqec, &m, 2, 300, TestState::Single, 99).unwrap();
    let b = estimate_logical_rates(&GadgetId::Rqec, &m, 2, 300, TestState::Single, 99).unwrap();
    assert_eq!(a, b);
    let c = estimate_logical_rates(&GadgetId::Rqec, &m, 2, 300, TestState::Single, 100).unwrap();
    assert_ne!(a.rates, c.rates);
}

#[test]
fn bare_cz_only_shows_z_labels() {
    let m = NoiseModel::biased(1e-2).unwrap();
    let est =
        estimate_logical_rates(&GadgetId::LogicalCz, &m, 2, 500, TestState::Double, 3).unwrap();
    assert_eq!(est.non_z_samples, 0);
    assert!(est
        .rates
        .keys()
        .all(|l| !l.contains('X') && !l.contains('Y')));
    assert!(est.failure > 0.0);
}
