//! Exhaustive single-fault verification.
//!
//! Every operator of every fault location is injected on its own, resets are
//! enumerated rather than sampled, and the output is recovered and classified
//! against the noiseless result. The noiseless prefix is simulated once and
//! shared by all faults that act after it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gadgets::{
    build_default, initial_register, run_segment, Branch, Circuit, Evaluator, GadgetId,
    LabelWeights, PlacedFault, ResetMode,
};
use crate::noise::{fault_support, FaultLocation, LocationClass, NoiseModel, PauliString};
use crate::steane::{label_string, LogicalLabel, TestState};

/// Label weights left by one injected fault.
#[derive(Debug, Clone)]
pub struct SingleFaultOutcome {
    pub location: usize,
    pub pauli: PauliString,
    /// Probability of this operator given that the location is faulty.
    pub probability: f64,
    pub labels: LabelWeights,
}

/// Every single-fault outcome of `circuit` under `model`, ordered by location.
pub fn enumerate_single_faults(
    circuit: &Circuit,
    locations: &[FaultLocation],
    model: &NoiseModel,
    test: TestState,
) -> Result<Vec<SingleFaultOutcome>> {
    let (input, ideal) = circuit.test_io(test)?;
    let evaluator = Evaluator::new(circuit, &ideal)?;
    let mode = ResetMode::branch();
    let mut dummy = rand::rngs::mock::StepRng::new(0, 0);
    let end = circuit.ops.len() + 1;

    let mut cursor = vec![Branch {
        weight: 1.0,
        register: initial_register(circuit, input.as_ref())?,
    }];
    let mut cursor_pos = 0;
    let mut out = Vec::new();
    let mut i = 0;
    while i < locations.len() {
        let slot = locations[i].slot;
        let mut j = i;
        while j < locations.len() && locations[j].slot == slot {
            j += 1;
        }
        cursor = run_segment(circuit, cursor, cursor_pos, slot, &[], mode, &mut dummy)?;
        cursor_pos = slot;
        let jobs: Vec<(usize, PauliString, f64)> = (i..j)
            .flat_map(|l| {
                fault_support(locations[l].class, model)
                    .into_iter()
                    .map(move |(p, w)| (l, p, w))
            })
            .collect();
        let results: Vec<Result<SingleFaultOutcome>> = jobs
            .par_iter()
            .map(|&(l, pauli, probability)| {
                let fault = [PlacedFault {
                    slot,
                    qubits: locations[l].qubits.clone(),
                    pauli,
                }];
                let mut rng = rand::rngs::mock::StepRng::new(0, 0);
                let branches =
                    run_segment(circuit, cursor.clone(), slot, end, &fault, mode, &mut rng)?;
                Ok(SingleFaultOutcome {
                    location: l,
                    pauli,
                    probability,
                    labels: evaluator.evaluate(branches)?,
                })
            })
            .collect();
        for r in results {
            out.push(r?);
        }
        i = j;
    }
    Ok(out)
}

/// Label weights of the fault-free circuit.
pub fn noiseless_outcome(circuit: &Circuit, test: TestState) -> Result<LabelWeights> {
    let (input, ideal) = circuit.test_io(test)?;
    let evaluator = Evaluator::new(circuit, &ideal)?;
    let mut rng = rand::rngs::mock::StepRng::new(0, 0);
    let branches = run_segment(
        circuit,
        vec![Branch {
            weight: 1.0,
            register: initial_register(circuit, input.as_ref())?,
        }],
        0,
        usize::MAX,
        &[],
        ResetMode::branch(),
        &mut rng,
    )?;
    evaluator.evaluate(branches)
}

/// A single fault that left a logical error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FtFailure {
    pub location: usize,
    pub slot: usize,
    pub class: LocationClass,
    pub qubits: Vec<usize>,
    pub pauli: String,
    /// Non-identity labels with their branch weights.
    pub labels: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FtReport {
    pub gadget: String,
    pub model: NoiseModel,
    pub test: TestState,
    pub locations_checked: usize,
    pub trajectories: usize,
    pub noiseless_ok: bool,
    pub failures: Vec<FtFailure>,
    pub pass: bool,
}

/// Weight below which a label is treated as numerical noise.
pub const LABEL_TOLERANCE: f64 = 1e-9;

fn identity_weight(w: &LabelWeights) -> f64 {
    w.entries
        .iter()
        .filter(|(l, _)| l.iter().all(|&x| x == LogicalLabel::I))
        .map(|(_, w)| w)
        .sum()
}

/// Checks a built circuit.
pub fn verify_circuit(circuit: &Circuit, model: &NoiseModel, test: TestState) -> Result<FtReport> {
    let locations = circuit.fault_locations(model);
    let noiseless = noiseless_outcome(circuit, test)?;
    let noiseless_ok = identity_weight(&noiseless) >= 1.0 - LABEL_TOLERANCE;
    let outcomes = enumerate_single_faults(circuit, &locations, model, test)?;
    let mut failures = Vec::new();
    for o in &outcomes {
        if identity_weight(&o.labels) < 1.0 - LABEL_TOLERANCE {
            let loc = &locations[o.location];
            failures.push(FtFailure {
                location: o.location,
                slot: loc.slot,
                class: loc.class,
                qubits: loc.qubits.clone(),
                pauli: o.pauli.to_string_len(loc.qubits.len()),
                labels: o
                    .labels
                    .entries
                    .iter()
                    .filter(|(l, w)| {
                        **w > LABEL_TOLERANCE && l.iter().any(|&x| x != LogicalLabel::I)
                    })
                    .map(|(l, w)| (label_string(l), *w))
                    .collect(),
            });
        }
    }
    Ok(FtReport {
        gadget: circuit.name.clone(),
        model: *model,
        test,
        locations_checked: locations.len(),
        trajectories: outcomes.len(),
        noiseless_ok,
        pass: noiseless_ok && failures.is_empty(),
        failures,
    })
}

/// Builds `id` and checks it on `test`.
pub fn verify_fault_tolerance(
    id: &GadgetId,
    model: &NoiseModel,
    test: TestState,
) -> Result<FtReport> {
    let circuit = build_default(id)?;
    verify_circuit(&circuit, model, test)
}

/// Linear coefficient `c` in `p_L ≈ c·ε·p` from exhaustive non-Z single faults.
///
/// Each non-Z operator at a multi-qubit location carries probability
/// `ε·p/(4^l − 2^l)`; `S`-type labels count half towards failure.
pub fn count_malignant_single_faults(id: &GadgetId, test: TestState) -> Result<f64> {
    let circuit = build_default(id)?;
    let model = NoiseModel::new(0.0, 0.0, 1.0)?;
    let locations = circuit.fault_locations(&model);
    let outcomes = enumerate_single_faults(&circuit, &locations, &model, test)?;
    Ok(outcomes
        .iter()
        .map(|o| o.probability * o.labels.aggregated().failure())
        .sum())
}
