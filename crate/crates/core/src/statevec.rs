//! Exact pure-state simulation.
//!
//! Qubit `q` of an `n`-qubit register is bit `q` of the amplitude index, so
//! qubit 0 is the least significant bit. Diagonal gates only touch the phases
//! of amplitudes whose index contains the full control mask; `H` and `X` are
//! stride-wise butterflies and swaps. Global phase carries no meaning: states
//! are compared through [`PureState::overlap`] magnitudes.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register accepted by [`PureState::new`].
pub const MAX_QUBITS: usize = 26;

/// Default probability below which a reset outcome is dropped in branch mode.
pub const DEFAULT_BRANCH_THRESHOLD: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Gate kinds of the native basis plus the Pauli operators used for error injection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    S,
    Sdg,
    T,
    Tdg,
    CZ,
    CS,
    CSdg,
    /// Controlled phase `diag(1, 1, 1, e^{iθ})`, θ in radians.
    CP(f64),
    CCZ,
    CCCZ,
    PauliX,
    PauliY,
    PauliZ,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::CZ | GateKind::CS | GateKind::CSdg | GateKind::CP(_) => 2,
            GateKind::CCZ => 3,
            GateKind::CCCZ => 4,
            _ => 1,
        }
    }

    pub fn is_diagonal(self) -> bool {
        !matches!(
            self,
            GateKind::H | GateKind::X | GateKind::PauliX | GateKind::PauliY
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::S => "S",
            GateKind::Sdg => "Sdg",
            GateKind::T => "T",
            GateKind::Tdg => "Tdg",
            GateKind::CZ => "CZ",
            GateKind::CS => "CS",
            GateKind::CSdg => "CSdg",
            GateKind::CP(_) => "CP",
            GateKind::CCZ => "CCZ",
            GateKind::CCCZ => "CCCZ",
            GateKind::PauliX => "PauliX",
            GateKind::PauliY => "PauliY",
            GateKind::PauliZ => "PauliZ",
        }
    }

    /// The inverse kind (every kind here is closed under inversion).
    pub fn inverse(self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::CS => GateKind::CSdg,
            GateKind::CSdg => GateKind::CS,
            GateKind::CP(theta) => {
                if theta == PI {
                    GateKind::CP(PI)
                } else {
                    GateKind::CP(-theta)
                }
            }
            other => other,
        }
    }

    /// Phase applied to the amplitudes selected by a diagonal kind.
    fn phase(self) -> Complex64 {
        match self {
            GateKind::S => Complex64::new(0.0, 1.0),
            GateKind::Sdg => Complex64::new(0.0, -1.0),
            GateKind::T => Complex64::from_polar(1.0, FRAC_PI_4),
            GateKind::Tdg => Complex64::from_polar(1.0, -FRAC_PI_4),
            GateKind::CS => Complex64::new(0.0, 1.0),
            GateKind::CSdg => Complex64::new(0.0, -1.0),
            GateKind::CP(theta) => Complex64::from_polar(1.0, theta),
            _ => Complex64::new(-1.0, 0.0),
        }
    }

    /// Parses the textual names produced by [`GateKind::name`]; `CP` takes an angle.
    pub fn parse(name: &str, angle: Option<f64>) -> Option<GateKind> {
        Some(match name {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "S" => GateKind::S,
            "Sdg" => GateKind::Sdg,
            "T" => GateKind::T,
            "Tdg" => GateKind::Tdg,
            "CZ" => GateKind::CZ,
            "CS" => GateKind::CS,
            "CSdg" => GateKind::CSdg,
            "CP" => GateKind::CP(angle?),
            "CCZ" => GateKind::CCZ,
            "CCCZ" => GateKind::CCCZ,
            "PauliX" => GateKind::PauliX,
            "PauliY" => GateKind::PauliY,
            "PauliZ" => GateKind::PauliZ,
            _ => return None,
        })
    }
}

/// A gate acting on an ordered list of qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl Gate {
    /// Validated constructor: arity must match the kind, targets must be
    /// distinct and a `CP` angle must lie in `(-π, π]`.
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Gate> {
        if targets.len() != kind.arity() {
            return Err(Error::Arity {
                kind: kind.name(),
                expected: kind.arity(),
                got: targets.len(),
            });
        }
        for (i, &a) in targets.iter().enumerate() {
            if targets[..i].contains(&a) {
                return Err(Error::DuplicateTarget(a));
            }
        }
        if let GateKind::CP(theta) = kind {
            if !(theta > -PI && theta <= PI) || !theta.is_finite() {
                return Err(Error::AngleOutOfRange(theta));
            }
        }
        Ok(Gate { kind, targets })
    }

    pub fn inverse(&self) -> Gate {
        Gate {
            kind: self.kind.inverse(),
            targets: self.targets.clone(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.kind.is_diagonal()
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GateKind::CP(theta) => write!(f, "CP({theta})")?,
            k => write!(f, "{}", k.name())?,
        }
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// kernels over raw amplitude slices

/// Calls `f` on every index `< len` containing all bits of `mask`.
#[inline]
fn for_each_superset(len: usize, mask: usize, mut f: impl FnMut(usize)) {
    let mut i = mask;
    while i < len {
        f(i);
        i = (i + 1) | mask;
    }
}

pub(crate) fn apply_kind(amps: &mut [Complex64], kind: GateKind, targets: &[usize]) {
    let len = amps.len();
    match kind {
        GateKind::H => {
            let bit = 1usize << targets[0];
            let s = FRAC_1_SQRT_2;
            let mut base = 0;
            while base < len {
                for i in base..base + bit {
                    let a = amps[i];
                    let b = amps[i + bit];
                    amps[i] = (a + b) * s;
                    amps[i + bit] = (a - b) * s;
                }
                base += bit << 1;
            }
        }
        GateKind::X | GateKind::PauliX => {
            let bit = 1usize << targets[0];
            let mut base = 0;
            while base < len {
                for i in base..base + bit {
                    amps.swap(i, i + bit);
                }
                base += bit << 1;
            }
        }
        GateKind::PauliY => {
            let bit = 1usize << targets[0];
            let mut base = 0;
            while base < len {
                for i in base..base + bit {
                    let a = amps[i];
                    let b = amps[i + bit];
                    amps[i] = Complex64::new(b.im, -b.re);
                    amps[i + bit] = Complex64::new(-a.im, a.re);
                }
                base += bit << 1;
            }
        }
        GateKind::PauliZ | GateKind::CZ | GateKind::CCZ | GateKind::CCCZ => {
            let mask = targets.iter().fold(0usize, |m, &q| m | (1 << q));
            for_each_superset(len, mask, |i| amps[i] = -amps[i]);
        }
        diag => {
            let mask = targets.iter().fold(0usize, |m, &q| m | (1 << q));
            let phase = diag.phase();
            for_each_superset(len, mask, |i| amps[i] *= phase);
        }
    }
}

pub(crate) fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Probability that qubit `pos` reads 1.
pub(crate) fn prob_one(amps: &[Complex64], pos: usize) -> f64 {
    let bit = 1usize << pos;
    let mut p = 0.0;
    let mut base = bit;
    while base < amps.len() {
        p += norm_sqr(&amps[base..base + bit]);
        base += bit << 1;
    }
    p
}

/// Keeps the half of `amps` where bit `pos` equals `outcome`, removing that bit.
pub(crate) fn extract_bit(amps: &[Complex64], pos: usize, outcome: bool) -> Vec<Complex64> {
    let bit = 1usize << pos;
    let offset = if outcome { bit } else { 0 };
    let mut out = Vec::with_capacity(amps.len() / 2);
    let mut base = 0;
    while base < amps.len() {
        out.extend_from_slice(&amps[base + offset..base + offset + bit]);
        base += bit << 1;
    }
    out
}

pub(crate) fn scale(amps: &mut [Complex64], factor: f64) {
    for a in amps {
        *a *= factor;
    }
}

/// `low ⊗ high`: the qubits of `low` keep their positions, `high` is shifted up.
pub(crate) fn kron(low: &[Complex64], high: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(low.len() * high.len());
    for h in high {
        out.extend(low.iter().map(|l| l * h));
    }
    out
}

// ---------------------------------------------------------------------------

/// Reset outcome handling.
pub enum ResetPolicy<'a> {
    /// Pick one outcome with its Born probability.
    Sample(&'a mut dyn RngCore),
    /// Return every outcome whose probability exceeds the threshold.
    Branch(f64),
}

/// A normalized state vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<PureState> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::Capacity(n_qubits));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(PureState { n_qubits, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<PureState> {
        let mut s = PureState::new(n_qubits)?;
        if index >= s.amps.len() {
            return Err(Error::TargetOutOfRange {
                qubit: index,
                n_qubits,
            });
        }
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    /// Wraps an amplitude vector, normalizing it.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<PureState> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(n_qubits));
        }
        let mut s = PureState { n_qubits, amps };
        s.normalize();
        Ok(s)
    }

    pub(crate) fn from_raw(amps: Vec<Complex64>) -> PureState {
        let n_qubits = amps.len().trailing_zeros() as usize;
        PureState { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    pub(crate) fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            scale(&mut self.amps, 1.0 / n);
        }
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &q) in targets.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::TargetOutOfRange {
                    qubit: q,
                    n_qubits: self.n_qubits,
                });
            }
            if targets[..i].contains(&q) {
                return Err(Error::DuplicateTarget(q));
            }
        }
        Ok(())
    }

    /// Applies `gate` in place.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        if gate.targets.len() != gate.kind.arity() {
            return Err(Error::Arity {
                kind: gate.kind.name(),
                expected: gate.kind.arity(),
                got: gate.targets.len(),
            });
        }
        self.check_targets(&gate.targets)?;
        apply_kind(&mut self.amps, gate.kind, &gate.targets);
        Ok(())
    }

    /// Builder-style variant of [`PureState::apply_gate`].
    pub fn with_gate(mut self, gate: &Gate) -> Result<PureState> {
        self.apply_gate(gate)?;
        Ok(self)
    }

    /// Projects `qubit` onto a definite value and re-prepares it in `|0⟩`.
    ///
    /// Returns `(weight, state)` pairs; weights are Born probabilities.
    pub fn apply_reset(
        &self,
        qubit: usize,
        policy: ResetPolicy<'_>,
    ) -> Result<Vec<(f64, PureState)>> {
        self.check_targets(&[qubit])?;
        let p1 = prob_one(&self.amps, qubit).clamp(0.0, 1.0);
        let p0 = 1.0 - p1;
        let project = |outcome: bool, p: f64| {
            let bit = 1usize << qubit;
            let mut amps = vec![ZERO; self.amps.len()];
            let norm = 1.0 / p.sqrt();
            for (i, a) in self.amps.iter().enumerate() {
                if (i & bit != 0) == outcome {
                    amps[i & !bit] = a * norm;
                }
            }
            PureState {
                n_qubits: self.n_qubits,
                amps,
            }
        };
        match policy {
            ResetPolicy::Sample(rng) => {
                let outcome = rng.gen::<f64>() < p1;
                let p = if outcome { p1 } else { p0 };
                if p <= 0.0 {
                    return Err(Error::CorruptedState(qubit));
                }
                Ok(vec![(p, project(outcome, p))])
            }
            ResetPolicy::Branch(threshold) => {
                let mut out = Vec::with_capacity(2);
                for (outcome, p) in [(false, p0), (true, p1)] {
                    if p > threshold {
                        out.push((p, project(outcome, p)));
                    }
                }
                if out.is_empty() {
                    return Err(Error::CorruptedState(qubit));
                }
                Ok(out)
            }
        }
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// `self ⊗ high`, with `high` occupying the upper qubit indices.
    pub fn tensor(&self, high: &PureState) -> Result<PureState> {
        let n = self.n_qubits + high.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::Capacity(n));
        }
        Ok(PureState {
            n_qubits: n,
            amps: kron(&self.amps, &high.amps),
        })
    }

    /// Reorders qubits so that new qubit `j` is old qubit `order[j]`.
    pub fn permuted(&self, order: &[usize]) -> Result<PureState> {
        if order.len() != self.n_qubits {
            return Err(Error::DimensionMismatch(order.len(), self.n_qubits));
        }
        let mut seen = vec![false; self.n_qubits];
        for &o in order {
            if o >= self.n_qubits {
                return Err(Error::TargetOutOfRange {
                    qubit: o,
                    n_qubits: self.n_qubits,
                });
            }
            if std::mem::replace(&mut seen[o], true) {
                return Err(Error::DuplicateTarget(o));
            }
        }
        Ok(PureState {
            n_qubits: self.n_qubits,
            amps: permute_amps(&self.amps, order),
        })
    }

    /// Expectation value of the Pauli-Z product on `mask`.
    pub fn z_parity_expectation(&self, mask: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let s = if (i & mask).count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                s * a.norm_sqr()
            })
            .sum()
    }
}

pub(crate) fn permute_amps(amps: &[Complex64], order: &[usize]) -> Vec<Complex64> {
    if order.iter().enumerate().all(|(j, &o)| j == o) {
        return amps.to_vec();
    }
    let mut out = vec![ZERO; amps.len()];
    for (i, a) in amps.iter().enumerate() {
        let mut j = 0usize;
        for (new, &old) in order.iter().enumerate() {
            j |= ((i >> old) & 1) << new;
        }
        out[j] = *a;
    }
    out
}

/// Phase factor `e^{iθ}`; shorthand used across the crate.
pub fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Convenience constructors; they cannot fail for distinct targets.
pub mod gates {
    use super::*;

    fn g(kind: GateKind, targets: Vec<usize>) -> Gate {
        Gate::new(kind, targets).expect("valid gate")
    }

    pub fn h(q: usize) -> Gate {
        g(GateKind::H, vec![q])
    }
    pub fn x(q: usize) -> Gate {
        g(GateKind::X, vec![q])
    }
    pub fn s(q: usize) -> Gate {
        g(GateKind::S, vec![q])
    }
    pub fn sdg(q: usize) -> Gate {
        g(GateKind::Sdg, vec![q])
    }
    pub fn t(q: usize) -> Gate {
        g(GateKind::T, vec![q])
    }
    pub fn tdg(q: usize) -> Gate {
        g(GateKind::Tdg, vec![q])
    }
    pub fn cz(a: usize, b: usize) -> Gate {
        g(GateKind::CZ, vec![a, b])
    }
    pub fn cs(a: usize, b: usize) -> Gate {
        g(GateKind::CS, vec![a, b])
    }
    pub fn csdg(a: usize, b: usize) -> Gate {
        g(GateKind::CSdg, vec![a, b])
    }
    pub fn cp(theta: f64, a: usize, b: usize) -> Gate {
        g(GateKind::CP(theta), vec![a, b])
    }
    pub fn ccz(a: usize, b: usize, c: usize) -> Gate {
        g(GateKind::CCZ, vec![a, b, c])
    }
    pub fn cccz(a: usize, b: usize, c: usize, d: usize) -> Gate {
        g(GateKind::CCCZ, vec![a, b, c, d])
    }
    pub fn pauli_x(q: usize) -> Gate {
        g(GateKind::PauliX, vec![q])
    }
    pub fn pauli_y(q: usize) -> Gate {
        g(GateKind::PauliY, vec![q])
    }
    pub fn pauli_z(q: usize) -> Gate {
        g(GateKind::PauliZ, vec![q])
    }

    /// `CS ≡ CP(π/2)`.
    pub fn cs_as_cp(a: usize, b: usize) -> Gate {
        cp(FRAC_PI_2, a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_amps(a: &[Complex64], b: &[Complex64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn ground_states() {
        assert_eq!(PureState::new(1).unwrap().amplitudes(), &[ONE, ZERO]);
        assert_eq!(
            PureState::new(2).unwrap().amplitudes(),
            &[ONE, ZERO, ZERO, ZERO]
        );
        let big = PureState::new(22).unwrap();
        assert_eq!(big.amplitudes().len(), 4_194_304);
        assert_eq!(big.amplitudes()[0], ONE);
    }

    #[test]
    fn capacity_limits() {
        assert_eq!(PureState::new(0), Err(Error::Capacity(0)));
        assert_eq!(PureState::new(27), Err(Error::Capacity(27)));
    }

    #[test]
    fn hadamard_on_zero() {
        let s = PureState::new(1).unwrap().with_gate(&h(0)).unwrap();
        assert_amps(
            s.amplitudes(),
            &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            1e-15,
        );
    }

    #[test]
    fn cccz_only_flips_all_ones() {
        for idx in 0..16 {
            let s = PureState::basis(4, idx)
                .unwrap()
                .with_gate(&cccz(0, 1, 2, 3))
                .unwrap();
            let expected = if idx == 15 { -1.0 } else { 1.0 };
            assert_abs_diff_eq!(s.amplitudes()[idx].re, expected, epsilon = 1e-15);
        }
    }

    #[test]
    fn t_x_tdg_identity_on_plus() {
        // 2x2 oracle: T X T† = e^{iπ/4} X S† (as matrices).
        let w = phase(FRAC_PI_4);
        let t_m = [[ONE, ZERO], [ZERO, w]];
        let tdg_m = [[ONE, ZERO], [ZERO, w.conj()]];
        let x_m = [[ZERO, ONE], [ONE, ZERO]];
        let sdg_m = [[ONE, ZERO], [ZERO, c(0.0, -1.0)]];
        let mul = |a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]| {
            let mut r = [[ZERO; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
                }
            }
            r
        };
        let lhs = mul(mul(t_m, x_m), tdg_m);
        let rhs = mul(x_m, sdg_m);
        for i in 0..2 {
            for j in 0..2 {
                assert!((lhs[i][j] - w * rhs[i][j]).norm() < 1e-14);
            }
        }
        // Circuit side: apply Tdg, X, T (rightmost first) to |+⟩ and compare with e^{iπ/4} X S† |+⟩.
        let plus = PureState::new(1).unwrap().with_gate(&h(0)).unwrap();
        let a = plus
            .clone()
            .with_gate(&tdg(0))
            .unwrap()
            .with_gate(&x(0))
            .unwrap()
            .with_gate(&t(0))
            .unwrap();
        let b = plus.with_gate(&sdg(0)).unwrap().with_gate(&x(0)).unwrap();
        let b_amps: Vec<_> = b.amplitudes().iter().map(|z| z * w).collect();
        assert_amps(a.amplitudes(), &b_amps, 1e-14);
    }

    #[test]
    fn reset_examples() {
        let zero = PureState::new(1).unwrap();
        let r = zero.apply_reset(0, ResetPolicy::Branch(1e-12)).unwrap();
        assert_eq!(r.len(), 1);
        assert_abs_diff_eq!(r[0].0, 1.0, epsilon = 1e-15);

        let plus = zero.clone().with_gate(&h(0)).unwrap();
        let r = plus.apply_reset(0, ResetPolicy::Branch(1e-12)).unwrap();
        assert_eq!(r.len(), 2);
        for (w, s) in &r {
            assert_abs_diff_eq!(*w, 0.5, epsilon = 1e-12);
            assert_amps(s.amplitudes(), zero.amplitudes(), 1e-12);
        }

        let one = PureState::basis(1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = one.apply_reset(0, ResetPolicy::Sample(&mut rng)).unwrap();
        assert_eq!(r.len(), 1);
        assert_abs_diff_eq!(r[0].0, 1.0, epsilon = 1e-15);
        assert_amps(r[0].1.amplitudes(), zero.amplitudes(), 1e-15);
    }

    #[test]
    fn overlap_examples() {
        let zero = PureState::new(1).unwrap();
        let one = PureState::basis(1, 1).unwrap();
        assert_abs_diff_eq!(zero.overlap(&zero).unwrap().re, 1.0);
        assert_abs_diff_eq!(zero.overlap(&one).unwrap().norm(), 0.0);
        let plus = zero.with_gate(&h(0)).unwrap();
        let tplus = plus.clone().with_gate(&t(0)).unwrap();
        // direct two-amplitude computation: (1 + e^{iπ/4}) / 2
        let expected = (ONE + phase(FRAC_PI_4)) / 2.0;
        assert!((plus.overlap(&tplus).unwrap() - expected).norm() < 1e-15);
        assert!(matches!(
            plus.overlap(&PureState::new(2).unwrap()),
            Err(Error::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn gate_validation() {
        assert!(matches!(
            Gate::new(GateKind::CZ, vec![0]),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(
            Gate::new(GateKind::CCZ, vec![0, 1, 1]),
            Err(Error::DuplicateTarget(1))
        ));
        assert!(matches!(
            Gate::new(GateKind::CP(-PI), vec![0, 1]),
            Err(Error::AngleOutOfRange(_))
        ));
        assert!(Gate::new(GateKind::CP(PI), vec![0, 1]).is_ok());
        let mut s = PureState::new(2).unwrap();
        assert!(matches!(
            s.apply_gate(&cz(0, 2)),
            Err(Error::TargetOutOfRange { qubit: 2, .. })
        ));
    }

    #[test]
    fn cs_matches_cp_half_pi() {
        let mut a = PureState::new(2).unwrap();
        a.apply_gate(&h(0)).unwrap();
        a.apply_gate(&h(1)).unwrap();
        let b = a.clone().with_gate(&cs(0, 1)).unwrap();
        let c = a.with_gate(&cs_as_cp(0, 1)).unwrap();
        assert_amps(b.amplitudes(), c.amplitudes(), 1e-15);
    }

    #[test]
    fn permute_and_tensor() {
        let a = PureState::basis(1, 1).unwrap();
        let b = PureState::new(1).unwrap();
        let ab = a.tensor(&b).unwrap(); // qubit0 = 1, qubit1 = 0
        assert_eq!(ab.amplitudes()[1], ONE);
        let ba = ab.permuted(&[1, 0]).unwrap();
        assert_eq!(ba.amplitudes()[2], ONE);
    }
}
