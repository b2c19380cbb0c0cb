//! The `[[7,1,3]]` Steane code.
//!
//! Stabilizer supports are shared by the X and Z generators. Within a block
//! the data qubits are numbered 0..7 as in the usual triangle drawing; qubit
//! 0 sits in the center and belongs to all three generators.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{self, gates, phase, Gate, GateKind, PureState};

/// Supports of the three generators (used for both X and Z type).
pub const STABILIZERS: [[usize; 4]; 3] = [[0, 1, 2, 3], [0, 3, 4, 5], [0, 1, 5, 6]];
/// Redundant fourth generator, the product of the other three.
pub const EXTRA_STABILIZER: [usize; 4] = [0, 2, 4, 6];
/// Support of both `X_L` and `Z_L`.
pub const LOGICAL: [usize; 3] = [1, 2, 6];
/// Alternative `Z_L` support read out by the injection gadget.
pub const ALT_LOGICAL_Z: [usize; 3] = [4, 5, 6];

pub const BLOCK: usize = 7;

/// Bitmask of a support within a block.
pub const fn support_mask(support: &[usize]) -> u8 {
    let mut m = 0u8;
    let mut i = 0;
    while i < support.len() {
        m |= 1 << support[i];
        i += 1;
    }
    m
}

pub const STABILIZER_MASKS: [u8; 3] = [
    support_mask(&STABILIZERS[0]),
    support_mask(&STABILIZERS[1]),
    support_mask(&STABILIZERS[2]),
];
pub const EXTRA_MASK: u8 = support_mask(&EXTRA_STABILIZER);
pub const LOGICAL_MASK: u8 = support_mask(&LOGICAL);

/// Syndrome bits flipped by an X (or Z) error on data qubit `q`.
pub fn syndrome_of(q: usize) -> [bool; 3] {
    let bit = 1u8 << q;
    [
        STABILIZER_MASKS[0] & bit != 0,
        STABILIZER_MASKS[1] & bit != 0,
        STABILIZER_MASKS[2] & bit != 0,
    ]
}

/// Four-bit syndrome including the redundant generator.
pub fn overcomplete_syndrome_of(q: usize) -> [bool; 4] {
    let s = syndrome_of(q);
    [s[0], s[1], s[2], EXTRA_MASK & (1 << q) != 0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoded {
    NoError,
    Qubit(usize),
    Invalid,
}

/// Lookup decoder for three- or four-bit syndromes.
pub fn decode_syndrome(bits: &[bool]) -> Result<Decoded> {
    match bits.len() {
        3 | 4 => {}
        n => return Err(Error::SyndromeLength(n)),
    }
    if bits.iter().all(|b| !b) {
        return Ok(Decoded::NoError);
    }
    for q in 0..BLOCK {
        let matches = if bits.len() == 3 {
            syndrome_of(q)[..] == bits[..]
        } else {
            overcomplete_syndrome_of(q)[..] == bits[..]
        };
        if matches {
            return Ok(Decoded::Qubit(q));
        }
    }
    Ok(Decoded::Invalid)
}

/// Non-fault-tolerant encoder of `|0_L⟩` on `block`, in the native gate set.
pub fn encoder_gates(block: &[usize]) -> Vec<Gate> {
    let b = |i: usize| block[i];
    let mut out = vec![gates::h(b(2)), gates::h(b(4)), gates::h(b(6))];
    for (c, t) in [
        (2, 1),
        (6, 1),
        (2, 3),
        (4, 3),
        (4, 5),
        (6, 5),
        (1, 0),
        (4, 0),
    ] {
        out.extend([gates::h(b(t)), gates::cz(b(c), b(t)), gates::h(b(t))]);
    }
    out
}

/// Logical single-block operators acting on a codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum LogicalLabel {
    I,
    X,
    Z,
    Y,
    S,
    Sdg,
    Other,
}

impl LogicalLabel {
    pub const CANDIDATES: [LogicalLabel; 6] = [
        LogicalLabel::I,
        LogicalLabel::X,
        LogicalLabel::Z,
        LogicalLabel::Y,
        LogicalLabel::S,
        LogicalLabel::Sdg,
    ];

    /// Physical transversal gates realizing this operator on one block.
    fn physical(self) -> &'static [GateKind] {
        match self {
            LogicalLabel::I | LogicalLabel::Other => &[],
            LogicalLabel::X => &[GateKind::PauliX],
            LogicalLabel::Z => &[GateKind::PauliZ],
            LogicalLabel::Y => &[GateKind::PauliX, GateKind::PauliZ],
            // transversal S† is logical S
            LogicalLabel::S => &[GateKind::Sdg],
            LogicalLabel::Sdg => &[GateKind::S],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogicalLabel::I => "I",
            LogicalLabel::X => "X",
            LogicalLabel::Z => "Z",
            LogicalLabel::Y => "Y",
            LogicalLabel::S => "S",
            LogicalLabel::Sdg => "Sdg",
            LogicalLabel::Other => "OTHER",
        }
    }
}

impl fmt::Display for LogicalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Joins per-block labels, e.g. `ZI` for a Z on the first of two blocks.
pub fn label_string(labels: &[LogicalLabel]) -> String {
    if labels.contains(&LogicalLabel::Other) {
        return "OTHER".into();
    }
    labels
        .iter()
        .map(|l| l.as_str())
        .collect::<Vec<_>>()
        .join("")
}

/// Applies a per-block logical operator to a state whose block `j` sits on qubits `7j..7j+7`.
pub fn apply_logical(state: &mut PureState, block: usize, label: LogicalLabel) {
    for &kind in label.physical() {
        for q in 0..BLOCK {
            statevec::apply_kind(state.amplitudes_mut(), kind, &[block * BLOCK + q]);
        }
    }
}

fn codeword(bit: bool) -> Vec<Complex64> {
    let mut s = PureState::new(BLOCK).expect("7 qubits");
    for g in encoder_gates(&[0, 1, 2, 3, 4, 5, 6]) {
        s.apply_gate(&g).expect("valid encoder");
    }
    if bit {
        for q in LOGICAL {
            s.apply_gate(&gates::x(q)).expect("valid");
        }
    }
    s.into_amplitudes()
}

/// `Σ_k coeffs[k] |k_L⟩`, with bit `j` of `k` the logical value of block `j`.
pub fn logical_state(coeffs: &[Complex64]) -> Result<PureState> {
    let len = coeffs.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let blocks = len.trailing_zeros() as usize;
    let words = [codeword(false), codeword(true)];
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << (BLOCK * blocks)];
    for (k, c) in coeffs.iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let mut term = vec![*c];
        for j in 0..blocks {
            term = statevec::kron(&term, &words[(k >> j) & 1]);
        }
        for (o, t) in out.iter_mut().zip(term) {
            *o += t;
        }
    }
    PureState::from_amplitudes(out)
}

/// Logical test inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestState {
    Single,
    Double,
    Zero,
    Plus,
    Magic,
}

impl TestState {
    pub fn n_blocks(self) -> usize {
        match self {
            TestState::Double => 2,
            _ => 1,
        }
    }

    /// Logical amplitudes of the test state.
    pub fn coefficients(self) -> Vec<Complex64> {
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self {
            TestState::Single => vec![r, r * phase(FRAC_PI_8)],
            TestState::Double => {
                let w = phase(FRAC_PI_8);
                vec![one * 0.5, w * 0.5, w * 0.5, -phase(FRAC_PI_4) * 0.5]
            }
            TestState::Zero => vec![one, Complex64::new(0.0, 0.0)],
            TestState::Plus => vec![r, r],
            TestState::Magic => vec![r, r * phase(FRAC_PI_4)],
        }
    }

    pub fn parse(s: &str) -> Option<TestState> {
        Some(match s {
            "single" => TestState::Single,
            "double" => TestState::Double,
            "zero" => TestState::Zero,
            "plus" => TestState::Plus,
            "magic" => TestState::Magic,
            _ => return None,
        })
    }
}

/// Noiseless logical state for a test kind.
pub fn prepare_test_state(kind: TestState) -> PureState {
    logical_state(&kind.coefficients()).expect("valid coefficients")
}

fn block_qubit_masks(block: &[usize]) -> [usize; 3] {
    let mut out = [0usize; 3];
    for (k, stab) in STABILIZERS.iter().enumerate() {
        for &q in stab {
            out[k] |= 1 << block[q];
        }
    }
    out
}

/// Splits `amps` by Z-type syndrome on `block` and X-corrects each branch.
fn correct_x(amps: &[Complex64], block: &[usize], threshold: f64) -> Vec<(f64, Vec<Complex64>)> {
    let masks = block_qubit_masks(block);
    let syn = |i: usize| -> usize {
        masks
            .iter()
            .enumerate()
            .map(|(k, m)| (((i & m).count_ones() & 1) as usize) << k)
            .sum()
    };
    let mut weights = [0.0f64; 8];
    for (i, a) in amps.iter().enumerate() {
        weights[syn(i)] += a.norm_sqr();
    }
    let mut out = Vec::new();
    for (s, &w) in weights.iter().enumerate() {
        if w <= threshold {
            continue;
        }
        let norm = 1.0 / w.sqrt();
        let mut branch: Vec<Complex64> = amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if syn(i) == s {
                    a * norm
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let bits = [s & 1 != 0, s & 2 != 0, s & 4 != 0];
        if let Ok(Decoded::Qubit(q)) = decode_syndrome(&bits) {
            statevec::apply_kind(&mut branch, GateKind::X, &[block[q]]);
        }
        out.push((w, branch));
    }
    out
}

fn dedupe(branches: Vec<(f64, Vec<Complex64>)>) -> Vec<(f64, Vec<Complex64>)> {
    let mut out: Vec<(f64, Vec<Complex64>)> = Vec::new();
    'next: for (w, amps) in branches {
        for (ow, o) in out.iter_mut() {
            if statevec::inner(o, &amps).norm() >= 1.0 - 1e-9 {
                *ow += w;
                continue 'next;
            }
        }
        out.push((w, amps));
    }
    out
}

/// Noiseless recovery of the codeword on `block`.
///
/// The three Z-type generators are projected out and the decoded X flip is
/// undone; the same is repeated in the Hadamard frame for Z flips. Returns
/// the distinct weighted branches, each inside the code space.
pub fn ideal_recover(state: &PureState, block: &[usize]) -> Result<Vec<(f64, PureState)>> {
    if block.len() != BLOCK {
        return Err(Error::DimensionMismatch(block.len(), BLOCK));
    }
    for &q in block {
        if q >= state.n_qubits() {
            return Err(Error::TargetOutOfRange {
                qubit: q,
                n_qubits: state.n_qubits(),
            });
        }
    }
    let thr = statevec::DEFAULT_BRANCH_THRESHOLD;
    let first = correct_x(state.amplitudes(), block, thr);
    let mut second = Vec::new();
    for (w, mut amps) in first {
        for &q in block {
            statevec::apply_kind(&mut amps, GateKind::H, &[q]);
        }
        for (w2, mut b) in correct_x(&amps, block, thr) {
            for &q in block {
                statevec::apply_kind(&mut b, GateKind::H, &[q]);
            }
            second.push((w * w2, b));
        }
    }
    let mut out = Vec::new();
    for (w, amps) in dedupe(second) {
        let s = PureState::from_raw(amps);
        check_code_space(&s, block)?;
        out.push((w, s));
    }
    Ok(out)
}

/// Smallest Z-generator expectation, also in the Hadamard frame.
fn check_code_space(state: &PureState, block: &[usize]) -> Result<()> {
    let masks = block_qubit_masks(block);
    let mut worst = masks
        .iter()
        .map(|&m| state.z_parity_expectation(m))
        .fold(f64::INFINITY, f64::min);
    let mut h = state.clone();
    for &q in block {
        statevec::apply_kind(h.amplitudes_mut(), GateKind::H, &[q]);
    }
    for &m in &masks {
        worst = worst.min(h.z_parity_expectation(m));
    }
    if worst < 1.0 - 1e-8 {
        return Err(Error::UncorrectableResidual(worst));
    }
    Ok(())
}

/// Expectation of every generator (Z-type then X-type) on `block`.
pub fn stabilizer_expectations(state: &PureState, block: &[usize]) -> Vec<f64> {
    let masks = block_qubit_masks(block);
    let mut out: Vec<f64> = masks
        .iter()
        .map(|&m| state.z_parity_expectation(m))
        .collect();
    let mut h = state.clone();
    for &q in block {
        statevec::apply_kind(h.amplitudes_mut(), GateKind::H, &[q]);
    }
    out.extend(masks.iter().map(|&m| h.z_parity_expectation(m)));
    out
}

/// Expectation of `Z_L` on `block` using `support`.
pub fn logical_z_expectation(state: &PureState, block: &[usize], support: &[usize]) -> f64 {
    let mask = support.iter().fold(0usize, |m, &q| m | (1 << block[q]));
    state.z_parity_expectation(mask)
}

pub const CLASSIFY_THRESHOLD: f64 = 1.0 - 1e-6;

/// Logical-error classifier for a fixed ideal output.
///
/// Candidate images `L·ideal` are computed once; candidates whose image
/// coincides with a higher-priority one are dropped.
#[derive(Debug, Clone)]
pub struct Classifier {
    n_blocks: usize,
    candidates: Vec<(Vec<LogicalLabel>, PureState)>,
}

impl Classifier {
    pub fn new(ideal: &PureState, n_blocks: usize) -> Result<Classifier> {
        if ideal.n_qubits() != n_blocks * BLOCK {
            return Err(Error::DimensionMismatch(ideal.n_qubits(), n_blocks * BLOCK));
        }
        let mut candidates: Vec<(Vec<LogicalLabel>, PureState)> = Vec::new();
        let total = 6usize.pow(n_blocks as u32);
        for code in 0..total {
            let labels: Vec<LogicalLabel> = (0..n_blocks)
                .map(|j| LogicalLabel::CANDIDATES[(code / 6usize.pow(j as u32)) % 6])
                .collect();
            let mut img = ideal.clone();
            for (j, &l) in labels.iter().enumerate() {
                apply_logical(&mut img, j, l);
            }
            let duplicate = candidates.iter().any(|(_, c)| {
                statevec::inner(c.amplitudes(), img.amplitudes()).norm() >= CLASSIFY_THRESHOLD
            });
            if !duplicate {
                candidates.push((labels, img));
            }
        }
        Ok(Classifier {
            n_blocks,
            candidates,
        })
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn candidate_labels(&self) -> impl Iterator<Item = &[LogicalLabel]> {
        self.candidates.iter().map(|(l, _)| l.as_slice())
    }

    /// Per-block label of a recovered state.
    pub fn classify(&self, faulty: &PureState) -> Result<Vec<LogicalLabel>> {
        if faulty.n_qubits() != self.n_blocks * BLOCK {
            return Err(Error::DimensionMismatch(
                faulty.n_qubits(),
                self.n_blocks * BLOCK,
            ));
        }
        let mut found: Option<&Vec<LogicalLabel>> = None;
        for (labels, img) in &self.candidates {
            let ov = statevec::inner(img.amplitudes(), faulty.amplitudes()).norm();
            if ov >= CLASSIFY_THRESHOLD {
                if let Some(prev) = found {
                    return Err(Error::AmbiguousClassification(
                        label_string(prev),
                        label_string(labels),
                    ));
                }
                found = Some(labels);
            }
        }
        Ok(match found {
            Some(l) => l.clone(),
            None => vec![LogicalLabel::Other; self.n_blocks],
        })
    }
}

/// One-shot form of [`Classifier::classify`].
pub fn classify_logical(
    faulty: &PureState,
    ideal: &PureState,
    n_blocks: usize,
) -> Result<Vec<LogicalLabel>> {
    Classifier::new(ideal, n_blocks)?.classify(faulty)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block0() -> [usize; 7] {
        [0, 1, 2, 3, 4, 5, 6]
    }

    #[test]
    fn generators_commute_and_logicals_anticommute() {
        for a in STABILIZER_MASKS {
            for b in STABILIZER_MASKS {
                assert_eq!((a & b).count_ones() % 2, 0);
            }
            assert_eq!((a & LOGICAL_MASK).count_ones() % 2, 0);
            assert_eq!((a & EXTRA_MASK).count_ones() % 2, 0);
        }
        // X_L and Z_L share three qubits
        assert_eq!((LOGICAL_MASK & LOGICAL_MASK).count_ones() % 2, 1);
        assert_eq!(
            STABILIZER_MASKS[0] ^ STABILIZER_MASKS[1] ^ STABILIZER_MASKS[2],
            EXTRA_MASK
        );
        let alt = support_mask(&ALT_LOGICAL_Z);
        // the two Z_L supports differ by a stabilizer
        let group: Vec<u8> = (0..8u8)
            .map(|k| {
                (0..3)
                    .filter(|j| k >> j & 1 == 1)
                    .fold(0, |m, j| m ^ STABILIZER_MASKS[j])
            })
            .collect();
        assert!(group.contains(&(alt ^ LOGICAL_MASK)));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(
            decode_syndrome(&[false, false, false]).unwrap(),
            Decoded::NoError
        );
        assert_eq!(
            decode_syndrome(&[true, false, false]).unwrap(),
            Decoded::Qubit(2)
        );
        assert_eq!(
            decode_syndrome(&[true, true, true]).unwrap(),
            Decoded::Qubit(0)
        );
        assert_eq!(
            decode_syndrome(&[true, false, false, false]).unwrap(),
            Decoded::Invalid
        );
        assert_eq!(decode_syndrome(&[true]), Err(Error::SyndromeLength(1)));
    }

    #[test]
    fn zero_is_codeword() {
        let z = prepare_test_state(TestState::Zero);
        for e in stabilizer_expectations(&z, &block0()) {
            assert!((e - 1.0).abs() < 1e-12);
        }
        assert!((logical_z_expectation(&z, &block0(), &LOGICAL) - 1.0).abs() < 1e-12);
        assert!((logical_z_expectation(&z, &block0(), &ALT_LOGICAL_Z) - 1.0).abs() < 1e-12);
        let m = prepare_test_state(TestState::Magic);
        assert!(logical_z_expectation(&m, &block0(), &LOGICAL).abs() < 1e-12);
    }

    #[test]
    fn recover_examples() {
        let zero = prepare_test_state(TestState::Zero);
        let mut e = zero.clone();
        e.apply_gate(&gates::x(3)).unwrap();
        let r = ideal_recover(&e, &block0()).unwrap();
        assert_eq!(r.len(), 1);
        assert!((zero.overlap(&r[0].1).unwrap().norm() - 1.0).abs() < 1e-10);

        let mut e = zero.clone();
        e.apply_gate(&gates::x(1)).unwrap();
        e.apply_gate(&gates::x(2)).unwrap();
        let r = ideal_recover(&e, &block0()).unwrap();
        let c = classify_logical(&r[0].1, &zero, 1).unwrap();
        assert_eq!(c, vec![LogicalLabel::X]);
    }

    #[test]
    fn classify_examples() {
        let single = prepare_test_state(TestState::Single);
        assert_eq!(
            classify_logical(&single, &single, 1).unwrap(),
            vec![LogicalLabel::I]
        );
        let mut z = single.clone();
        apply_logical(&mut z, 0, LogicalLabel::Z);
        assert_eq!(
            classify_logical(&z, &single, 1).unwrap(),
            vec![LogicalLabel::Z]
        );
        let mut s = single.clone();
        apply_logical(&mut s, 0, LogicalLabel::S);
        assert_eq!(
            classify_logical(&s, &single, 1).unwrap(),
            vec![LogicalLabel::S]
        );
    }

    #[test]
    fn logical_s_matches_amplitudes() {
        let single = prepare_test_state(TestState::Single);
        let mut s = single.clone();
        apply_logical(&mut s, 0, LogicalLabel::S);
        let c = TestState::Single.coefficients();
        let expected = logical_state(&[c[0], c[1] * Complex64::new(0.0, 1.0)]).unwrap();
        assert!((expected.overlap(&s).unwrap().norm() - 1.0).abs() < 1e-12);
    }
}
