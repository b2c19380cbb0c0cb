use mfqec::gadgets::{build_default, gate_counts, is_basis_kind, Evaluator, GadgetId, ResetMode};
use mfqec::noise::FaultConfig;
use mfqec::steane::{LogicalLabel, TestState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn reference_counts_match() {
    for id in GadgetId::all() {
        let c = build_default(&id).unwrap();
        if let Some(expected) = id.table_counts() {
            assert_eq!(gate_counts(&c), expected, "{id}");
        }
    }
}

#[test]
fn only_basis_gates() {
    for id in GadgetId::all() {
        let c = build_default(&id).unwrap();
        assert!(c.gates().all(|g| is_basis_kind(g.kind)), "{id}");
    }
}

#[test]
fn noiseless_gadgets_act_ideally() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for id in GadgetId::all() {
        let c = build_default(&id).unwrap();
        let tests: Vec<TestState> = if c.logical.input_blocks() == 0 {
            vec![TestState::Single]
        } else if c.default_test() == TestState::Double {
            vec![TestState::Double, TestState::Zero, TestState::Plus]
        } else {
            vec![
                TestState::Single,
                TestState::Zero,
                TestState::Plus,
                TestState::Magic,
            ]
        };
        for test in tests {
            let (input, ideal) = c.test_io(test).unwrap();
            let ev = Evaluator::new(&c, &ideal).unwrap();
            let branches = mfqec::gadgets::run(
                &c,
                &[],
                &FaultConfig::empty(),
                input.as_ref(),
                ResetMode::branch(),
                &mut rng,
            )
            .unwrap();
            let w = ev.evaluate(branches).unwrap();
            let ok = vec![LogicalLabel::I; c.outputs.len()];
            assert!((w.get(&ok) - 1.0).abs() < 1e-8, "{id} {test:?}: {w:?}");
        }
    }
}
