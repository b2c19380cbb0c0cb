//! Factorized lazy register used by the circuit runner.
//!
//! A circuit qubit lives in no factor until it is first touched (it is then
//! `|0⟩`), joins other factors only when a gate spans them, and leaves its
//! factor again when it is reset. Gadgets reset auxiliaries constantly, so
//! the live dimension stays far below `2^n_qubits`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevec::{self, GateKind, PureState, MAX_QUBITS};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Factor {
    /// `qubits[j]` is the circuit qubit stored at bit `j` of `amps`.
    qubits: Vec<usize>,
    amps: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct Register {
    factors: Vec<Factor>,
    owner: Vec<usize>,
}

impl Register {
    pub fn new(n_qubits: usize) -> Register {
        Register {
            factors: Vec::new(),
            owner: vec![NONE; n_qubits],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.owner.len()
    }

    /// Number of qubits currently held in factors.
    pub fn live_qubits(&self) -> usize {
        self.factors.iter().map(|f| f.qubits.len()).sum()
    }

    pub fn is_live(&self, q: usize) -> bool {
        self.owner[q] != NONE
    }

    /// Places `state` on `qubits` (qubit `j` of the state goes to `qubits[j]`).
    pub fn load(&mut self, qubits: &[usize], state: &PureState) -> Result<()> {
        if qubits.len() != state.n_qubits() {
            return Err(Error::DimensionMismatch(qubits.len(), state.n_qubits()));
        }
        for &q in qubits {
            self.check(q)?;
            if self.owner[q] != NONE {
                return Err(Error::DuplicateTarget(q));
            }
        }
        let idx = self.factors.len();
        for &q in qubits {
            self.owner[q] = idx;
        }
        self.factors.push(Factor {
            qubits: qubits.to_vec(),
            amps: state.amplitudes().to_vec(),
        });
        Ok(())
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.owner.len() {
            return Err(Error::TargetOutOfRange {
                qubit: q,
                n_qubits: self.owner.len(),
            });
        }
        Ok(())
    }

    fn allocate(&mut self, q: usize) {
        let idx = self.factors.len();
        self.owner[q] = idx;
        self.factors.push(Factor {
            qubits: vec![q],
            amps: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        });
    }

    fn remove_factor(&mut self, idx: usize) {
        self.factors.swap_remove(idx);
        if idx < self.factors.len() {
            for &q in &self.factors[idx].qubits {
                self.owner[q] = idx;
            }
        }
    }

    /// Merges the factors holding `qs` into one and returns its index.
    fn merge(&mut self, qs: &[usize]) -> Result<usize> {
        let mut ids: Vec<usize> = qs.iter().map(|&q| self.owner[q]).collect();
        ids.sort_unstable();
        ids.dedup();
        let base = ids[0];
        let mut total = self.factors[base].qubits.len();
        for &i in &ids[1..] {
            total += self.factors[i].qubits.len();
        }
        if total > MAX_QUBITS {
            return Err(Error::Capacity(total));
        }
        // Remove from the highest index down so earlier indices stay valid.
        for &i in ids[1..].iter().rev() {
            let other = self.factors.swap_remove(i);
            if i < self.factors.len() {
                for &q in &self.factors[i].qubits {
                    self.owner[q] = i;
                }
            }
            let f = &mut self.factors[base];
            f.amps = statevec::kron(&f.amps, &other.amps);
            f.qubits.extend_from_slice(&other.qubits);
        }
        for &q in &self.factors[base].qubits {
            self.owner[q] = base;
        }
        Ok(base)
    }

    fn position(&self, f: usize, q: usize) -> usize {
        self.factors[f]
            .qubits
            .iter()
            .position(|&x| x == q)
            .expect("qubit in its owning factor")
    }

    /// Applies a gate kind on circuit qubits.
    pub fn apply(&mut self, kind: GateKind, targets: &[usize]) -> Result<()> {
        for &q in targets {
            self.check(q)?;
        }
        // A diagonal gate acts only where every target reads 1, so a target
        // still in |0⟩ makes it the identity.
        if kind.is_diagonal() && targets.iter().any(|&q| self.owner[q] == NONE) {
            return Ok(());
        }
        for &q in targets {
            if self.owner[q] == NONE {
                self.allocate(q);
            }
        }
        let f = if targets.len() == 1 {
            self.owner[targets[0]]
        } else {
            self.merge(targets)?
        };
        let mut pos = [0usize; 4];
        for (j, &q) in targets.iter().enumerate() {
            pos[j] = self.position(f, q);
        }
        statevec::apply_kind(&mut self.factors[f].amps, kind, &pos[..targets.len()]);
        Ok(())
    }

    /// Probability that qubit `q` reads 1.
    pub fn prob_one(&self, q: usize) -> f64 {
        let f = self.owner[q];
        if f == NONE {
            return 0.0;
        }
        statevec::prob_one(&self.factors[f].amps, self.position(f, q)).clamp(0.0, 1.0)
    }

    /// Projects `q` onto `outcome` (which must have probability `p > 0`) and
    /// returns it to the untouched `|0⟩` pool.
    pub fn collapse(&mut self, q: usize, outcome: bool, p: f64) {
        let f = self.owner[q];
        if f == NONE {
            return;
        }
        let pos = self.position(f, q);
        self.owner[q] = NONE;
        if self.factors[f].qubits.len() == 1 {
            self.remove_factor(f);
            return;
        }
        let factor = &mut self.factors[f];
        let mut amps = statevec::extract_bit(&factor.amps, pos, outcome);
        statevec::scale(&mut amps, 1.0 / p.sqrt());
        factor.amps = amps;
        factor.qubits.remove(pos);
    }

    /// Drops every factor that holds none of the `keep` qubits.
    pub fn discard_factors_outside(&mut self, keep: &[bool]) {
        let mut i = 0;
        while i < self.factors.len() {
            if self.factors[i].qubits.iter().all(|&q| !keep[q]) {
                for q in std::mem::take(&mut self.factors[i].qubits) {
                    self.owner[q] = NONE;
                }
                self.remove_factor(i);
            } else {
                i += 1;
            }
        }
    }

    /// Live qubits in ascending order.
    pub fn live_list(&self) -> Vec<usize> {
        (0..self.owner.len())
            .filter(|&q| self.owner[q] != NONE)
            .collect()
    }

    /// Renormalizes every factor (guards against drift over long circuits).
    pub fn renormalize(&mut self) {
        for f in &mut self.factors {
            let n = statevec::norm_sqr(&f.amps).sqrt();
            if n > 0.0 {
                statevec::scale(&mut f.amps, 1.0 / n);
            }
        }
    }

    /// Dense state over `order` (new qubit `j` = circuit qubit `order[j]`).
    ///
    /// Every live qubit must appear in `order`; untouched ones are `|0⟩`.
    pub fn to_state(&self, order: &[usize]) -> Result<PureState> {
        if order.len() > MAX_QUBITS || order.is_empty() {
            return Err(Error::Capacity(order.len()));
        }
        for &q in order {
            self.check(q)?;
        }
        for f in &self.factors {
            for q in &f.qubits {
                if !order.contains(q) {
                    return Err(Error::InvalidRequest(format!(
                        "live qubit {q} missing from the requested order"
                    )));
                }
            }
        }
        let mut qubits: Vec<usize> = Vec::with_capacity(order.len());
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for f in &self.factors {
            amps = statevec::kron(&amps, &f.amps);
            qubits.extend_from_slice(&f.qubits);
        }
        for &q in order {
            if self.owner[q] == NONE {
                let mut pad = vec![Complex64::new(0.0, 0.0); amps.len() * 2];
                pad[..amps.len()].copy_from_slice(&amps);
                amps = pad;
                qubits.push(q);
            }
        }
        let perm: Vec<usize> = order
            .iter()
            .map(|q| qubits.iter().position(|x| x == q).expect("present"))
            .collect();
        Ok(PureState::from_raw(statevec::permute_amps(&amps, &perm)))
    }

    /// `⟨self|other⟩` when both registers share the same factor layout.
    pub fn overlap_same_layout(&self, other: &Register) -> Option<Complex64> {
        if self.factors.len() != other.factors.len() || self.owner != other.owner {
            return None;
        }
        let mut acc = Complex64::new(1.0, 0.0);
        for (a, b) in self.factors.iter().zip(&other.factors) {
            if a.qubits != b.qubits {
                return None;
            }
            acc *= statevec::inner(&a.amps, &b.amps);
        }
        Some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::gates::*;
    use crate::statevec::Gate;

    fn dense_run(n: usize, gates: &[Gate]) -> PureState {
        let mut s = PureState::new(n).unwrap();
        for g in gates {
            s.apply_gate(g).unwrap();
        }
        s
    }

    #[test]
    fn factorized_matches_dense() {
        let gates = vec![
            h(0),
            t(0),
            h(3),
            cz(0, 3),
            h(1),
            ccz(1, 3, 0),
            x(4),
            cs(4, 1),
            h(2),
            cccz(0, 1, 2, 4),
            h(0),
            pauli_y(2),
        ];
        let dense = dense_run(5, &gates);
        let mut reg = Register::new(5);
        for g in &gates {
            reg.apply(g.kind, &g.targets).unwrap();
        }
        let fact = reg.to_state(&[0, 1, 2, 3, 4]).unwrap();
        let ov = dense.overlap(&fact).unwrap();
        assert!((ov.norm() - 1.0).abs() < 1e-12);
        assert!((ov - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_on_fresh_qubit_is_skipped() {
        let mut reg = Register::new(3);
        reg.apply(GateKind::H, &[0]).unwrap();
        reg.apply(GateKind::CZ, &[0, 2]).unwrap();
        assert!(!reg.is_live(2));
        assert_eq!(reg.live_qubits(), 1);
    }

    #[test]
    fn collapse_removes_qubit() {
        let mut reg = Register::new(2);
        reg.apply(GateKind::H, &[0]).unwrap();
        reg.apply(GateKind::H, &[1]).unwrap();
        reg.apply(GateKind::CZ, &[0, 1]).unwrap();
        let p = reg.prob_one(1);
        assert!((p - 0.5).abs() < 1e-12);
        reg.collapse(1, true, p);
        assert!(!reg.is_live(1));
        let s = reg.to_state(&[0, 1]).unwrap();
        // qubit 0 is now |->
        let a = s.amplitudes();
        assert!((a[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((a[1].re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }
}
