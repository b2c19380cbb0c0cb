use std::collections::BTreeMap;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::noise::{FaultConfig, FaultLocation, PauliString};
use crate::register::Register;
use crate::statevec::{GateKind, PureState, DEFAULT_BRANCH_THRESHOLD};
use crate::steane::{self, Classifier, LogicalLabel, BLOCK};

use super::{Circuit, Op};

pub const DEFAULT_BRANCH_CAP: usize = 64;

/// How mid-circuit resets are resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResetMode {
    /// One outcome per reset, drawn with its Born probability.
    Sample,
    /// Every outcome above `threshold`, failing beyond `cap` live branches.
    Branch { threshold: f64, cap: usize },
}

impl ResetMode {
    pub fn branch() -> ResetMode {
        ResetMode::Branch {
            threshold: DEFAULT_BRANCH_THRESHOLD,
            cap: DEFAULT_BRANCH_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub weight: f64,
    pub register: Register,
}

/// A fault resolved to its circuit position.
#[derive(Debug, Clone)]
pub(crate) struct PlacedFault {
    pub slot: usize,
    pub qubits: Vec<usize>,
    pub pauli: PauliString,
}

pub(crate) fn place_faults(
    circuit: &Circuit,
    locations: &[FaultLocation],
    config: &FaultConfig,
) -> Result<Vec<PlacedFault>> {
    let mut out = Vec::with_capacity(config.assignments.len());
    for &(idx, pauli) in &config.assignments {
        let loc = locations.get(idx).ok_or_else(|| {
            Error::ConfigMismatch(format!("location {idx} of {}", locations.len()))
        })?;
        let width = loc.qubits.len();
        if loc.slot > circuit.ops.len()
            || loc.qubits.iter().any(|&q| q >= circuit.n_qubits)
            || (pauli.xs | pauli.zs) as usize >= 1 << width
            || pauli.is_identity()
        {
            return Err(Error::ConfigMismatch(format!(
                "assignment {} at location {idx}",
                pauli.to_string_len(width.max(1))
            )));
        }
        out.push(PlacedFault {
            slot: loc.slot,
            qubits: loc.qubits.clone(),
            pauli,
        });
    }
    out.sort_by_key(|f| f.slot);
    Ok(out)
}

fn apply_pauli(reg: &mut Register, fault: &PlacedFault) -> Result<()> {
    for (j, &q) in fault.qubits.iter().enumerate() {
        if (fault.pauli.zs >> j) & 1 == 1 {
            reg.apply(GateKind::PauliZ, &[q])?;
        }
        if (fault.pauli.xs >> j) & 1 == 1 {
            reg.apply(GateKind::PauliX, &[q])?;
        }
    }
    Ok(())
}

/// Merges branches whose states coincide up to phase.
pub(crate) fn dedupe(branches: Vec<Branch>) -> Vec<Branch> {
    if branches.len() < 2 {
        return branches;
    }
    let mut out: Vec<Branch> = Vec::with_capacity(branches.len());
    'next: for b in branches {
        for o in out.iter_mut() {
            if let Some(ov) = o.register.overlap_same_layout(&b.register) {
                if ov.norm() >= 1.0 - 1e-9 {
                    o.weight += b.weight;
                    continue 'next;
                }
            }
        }
        out.push(b);
    }
    out
}

fn reset_branches(
    branches: Vec<Branch>,
    q: usize,
    mode: ResetMode,
    rng: &mut dyn RngCore,
    context: &str,
) -> Result<Vec<Branch>> {
    match mode {
        ResetMode::Sample => {
            let mut out = branches;
            for b in out.iter_mut() {
                let p1 = b.register.prob_one(q);
                let one = rng.gen::<f64>() < p1;
                let p = if one { p1 } else { 1.0 - p1 };
                if p <= 0.0 {
                    return Err(Error::CorruptedState(q));
                }
                b.register.collapse(q, one, p);
            }
            Ok(out)
        }
        ResetMode::Branch { threshold, cap } => {
            let mut out = Vec::with_capacity(branches.len() * 2);
            for b in branches {
                let p1 = b.register.prob_one(q);
                let p0 = 1.0 - p1;
                let keep0 = p0 > threshold;
                let keep1 = p1 > threshold;
                match (keep0, keep1) {
                    (false, false) => return Err(Error::CorruptedState(q)),
                    (true, true) => {
                        let mut r1 = b.register.clone();
                        r1.collapse(q, true, p1);
                        let mut r0 = b.register;
                        r0.collapse(q, false, p0);
                        out.push(Branch {
                            weight: b.weight * p0,
                            register: r0,
                        });
                        out.push(Branch {
                            weight: b.weight * p1,
                            register: r1,
                        });
                    }
                    (one_only, _) => {
                        let one = !one_only;
                        let p = if one { p1 } else { p0 };
                        let mut r = b.register;
                        r.collapse(q, one, p);
                        out.push(Branch {
                            weight: b.weight * p,
                            register: r,
                        });
                    }
                }
            }
            let out = dedupe(out);
            if out.len() > cap {
                return Err(Error::BranchCap {
                    cap,
                    context: context.to_string(),
                });
            }
            Ok(out)
        }
    }
}

/// Executes steps `start..end`, where step `i` first applies the faults of
/// slot `i` and then operation `i` (step `ops.len()` has no operation).
pub(crate) fn run_segment(
    circuit: &Circuit,
    mut branches: Vec<Branch>,
    start: usize,
    end: usize,
    faults: &[PlacedFault],
    mode: ResetMode,
    rng: &mut dyn RngCore,
) -> Result<Vec<Branch>> {
    let retire = match mode {
        ResetMode::Sample => retirements(circuit),
        ResetMode::Branch { .. } => Vec::new(),
    };
    let mut fi = faults.partition_point(|f| f.slot < start);
    for i in start..end.min(circuit.ops.len() + 1) {
        while fi < faults.len() && faults[fi].slot == i {
            for b in branches.iter_mut() {
                apply_pauli(&mut b.register, &faults[fi])?;
            }
            fi += 1;
        }
        let Some(op) = circuit.ops.get(i) else { break };
        match op {
            Op::Gate(g) => {
                for b in branches.iter_mut() {
                    b.register.apply(g.kind, &g.targets)?;
                }
            }
            Op::Reset(q) => {
                branches = reset_branches(branches, *q, mode, rng, &circuit.name)?;
            }
        }
        for &q in retire.get(i).map(Vec::as_slice).unwrap_or(&[]) {
            branches = reset_branches(branches, q, mode, rng, &circuit.name)?;
        }
    }
    Ok(branches)
}

/// Non-output qubits to measure out after their last operation.
///
/// Sampling their value there leaves the output statistics unchanged and
/// keeps factors small.
fn retirements(circuit: &Circuit) -> Vec<Vec<usize>> {
    let mut last = vec![None; circuit.n_qubits];
    for (i, op) in circuit.ops.iter().enumerate() {
        match op {
            Op::Gate(g) => g.targets.iter().for_each(|&q| last[q] = Some(i)),
            Op::Reset(q) => last[*q] = None,
        }
    }
    for &q in circuit.outputs.iter().flatten() {
        last[q] = None;
    }
    let mut out = vec![Vec::new(); circuit.ops.len()];
    for (q, l) in last.into_iter().enumerate() {
        if let Some(i) = l {
            out[i].push(q);
        }
    }
    out
}

/// Fresh register holding `initial` on the circuit's input blocks.
pub(crate) fn initial_register(circuit: &Circuit, initial: Option<&PureState>) -> Result<Register> {
    let mut reg = Register::new(circuit.n_qubits);
    let inputs: Vec<usize> = circuit.inputs.iter().flatten().copied().collect();
    match initial {
        Some(state) => {
            if inputs.is_empty() {
                return Err(Error::InvalidRequest(format!(
                    "{} takes no input state",
                    circuit.name
                )));
            }
            reg.load(&inputs, state)?;
        }
        None => {
            if !inputs.is_empty() {
                return Err(Error::InvalidRequest(format!(
                    "{} needs an input state",
                    circuit.name
                )));
            }
        }
    }
    Ok(reg)
}

/// Runs `circuit` on `initial` with the faults of `config`.
///
/// Each assigned Pauli is applied right after its location's operation.
/// Returns the weighted branches left by the resets.
pub fn run(
    circuit: &Circuit,
    locations: &[FaultLocation],
    config: &FaultConfig,
    initial: Option<&PureState>,
    mode: ResetMode,
    rng: &mut dyn RngCore,
) -> Result<Vec<Branch>> {
    let faults = place_faults(circuit, locations, config)?;
    let reg = initial_register(circuit, initial)?;
    run_segment(
        circuit,
        vec![Branch {
            weight: 1.0,
            register: reg,
        }],
        0,
        usize::MAX,
        &faults,
        mode,
        rng,
    )
}

/// Weighted per-block logical labels.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabelWeights {
    pub entries: BTreeMap<Vec<LogicalLabel>, f64>,
}

impl LabelWeights {
    pub fn add(&mut self, labels: Vec<LogicalLabel>, w: f64) {
        *self.entries.entry(labels).or_insert(0.0) += w;
    }

    pub fn merge_scaled(&mut self, other: &LabelWeights, scale: f64) {
        for (l, w) in &other.entries {
            self.add(l.clone(), w * scale);
        }
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Weight of outcomes where some block is not `I`.
    pub fn failure(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(l, _)| l.iter().any(|&x| x != LogicalLabel::I))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn get(&self, labels: &[LogicalLabel]) -> f64 {
        self.entries.get(labels).copied().unwrap_or(0.0)
    }

    /// Replaces every `S`/`Sdg` block label by `I` and `Z` at weight 1/2 each.
    pub fn aggregated(&self) -> LabelWeights {
        let mut out = LabelWeights::default();
        for (labels, &w) in &self.entries {
            let mut parts: Vec<(Vec<LogicalLabel>, f64)> = vec![(Vec::new(), w)];
            for &l in labels {
                let choices: &[(LogicalLabel, f64)] = match l {
                    LogicalLabel::S | LogicalLabel::Sdg => {
                        &[(LogicalLabel::I, 0.5), (LogicalLabel::Z, 0.5)]
                    }
                    _ => &[(l, 1.0)][..],
                };
                parts = parts
                    .into_iter()
                    .flat_map(|(prefix, pw)| {
                        choices.iter().map(move |&(c, cw)| {
                            let mut v = prefix.clone();
                            v.push(c);
                            (v, pw * cw)
                        })
                    })
                    .collect();
            }
            for (l, pw) in parts {
                out.add(l, pw);
            }
        }
        out
    }

    fn normalized(mut self) -> LabelWeights {
        let t = self.total();
        if t > 0.0 {
            for w in self.entries.values_mut() {
                *w /= t;
            }
        }
        self
    }
}

/// Turns final branches into a label distribution: auxiliary qubits are
/// discarded, each output block is ideally recovered, and the result is
/// compared with the noiseless output.
#[derive(Debug, Clone)]
pub struct Evaluator {
    order: Vec<usize>,
    keep: Vec<bool>,
    n_blocks: usize,
    ideal: PureState,
    classifier: Classifier,
}

impl Evaluator {
    pub fn new(circuit: &Circuit, ideal: &PureState) -> Result<Evaluator> {
        let order: Vec<usize> = circuit.outputs.iter().flatten().copied().collect();
        let mut keep = vec![false; circuit.n_qubits];
        for &q in &order {
            keep[q] = true;
        }
        let n_blocks = circuit.outputs.len();
        Ok(Evaluator {
            order,
            keep,
            n_blocks,
            ideal: ideal.clone(),
            classifier: Classifier::new(ideal, n_blocks)?,
        })
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    /// Weighted output-block states, with every other qubit traced out by
    /// branching over its outcomes.
    pub fn output_states(&self, branches: Vec<Branch>) -> Result<Vec<(f64, PureState)>> {
        let mut rng = rand::rngs::mock::StepRng::new(0, 0);
        let mut pending = Vec::new();
        for mut b in branches {
            b.register.discard_factors_outside(&self.keep);
            pending.push(b);
        }
        loop {
            let extra = pending
                .iter()
                .find_map(|b| b.register.live_list().into_iter().find(|&q| !self.keep[q]));
            let Some(q) = extra else { break };
            pending = reset_branches(
                pending,
                q,
                ResetMode::Branch {
                    threshold: DEFAULT_BRANCH_THRESHOLD,
                    cap: usize::MAX,
                },
                &mut rng,
                "final discard",
            )?;
            for b in pending.iter_mut() {
                b.register.discard_factors_outside(&self.keep);
            }
        }
        pending
            .into_iter()
            .map(|b| Ok((b.weight, b.register.to_state(&self.order)?)))
            .collect()
    }

    /// Smallest `|⟨ideal|output⟩|` over the output branches, before recovery.
    pub fn ideal_overlap(&self, branches: Vec<Branch>) -> Result<f64> {
        let mut worst = f64::INFINITY;
        for (_, s) in self.output_states(branches)? {
            worst = worst.min(self.ideal.overlap(&s)?.norm());
        }
        Ok(worst)
    }

    pub fn evaluate(&self, branches: Vec<Branch>) -> Result<LabelWeights> {
        let mut out = LabelWeights::default();
        for (weight, state) in self.output_states(branches)? {
            let mut recovered = vec![(weight, state)];
            for j in 0..self.n_blocks {
                let block: Vec<usize> = (j * BLOCK..(j + 1) * BLOCK).collect();
                let mut next = Vec::new();
                for (w, s) in recovered {
                    for (w2, s2) in steane::ideal_recover(&s, &block)? {
                        next.push((w * w2, s2));
                    }
                }
                recovered = next;
            }
            for (w, s) in recovered {
                out.add(self.classifier.classify(&s)?, w);
            }
        }
        Ok(out.normalized())
    }
}
