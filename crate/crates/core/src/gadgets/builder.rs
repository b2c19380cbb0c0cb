use crate::statevec::{gates, Gate};

use super::{Block, Circuit, Layout, LogicalOp, Op, Role};

/// Incremental circuit construction with the compiled `CX`/`CCX` helpers.
pub(crate) struct Builder {
    ops: Vec<Op>,
    roles: Vec<Role>,
}

impl Builder {
    pub fn new() -> Builder {
        Builder {
            ops: Vec::new(),
            roles: Vec::new(),
        }
    }

    /// Reserves `n` qubits of `role`, returning the first index.
    pub fn alloc(&mut self, n: usize, role: Role) -> usize {
        let first = self.roles.len();
        self.roles.extend(std::iter::repeat_n(role, n));
        first
    }

    pub fn block(&mut self, role: Role) -> Block {
        let first = self.alloc(7, role);
        std::array::from_fn(|i| first + i)
    }

    fn g(&mut self, gate: Gate) {
        self.ops.push(Op::Gate(gate));
    }

    pub fn h(&mut self, q: usize) {
        self.g(gates::h(q));
    }
    pub fn x(&mut self, q: usize) {
        self.g(gates::x(q));
    }
    pub fn t(&mut self, q: usize) {
        self.g(gates::t(q));
    }
    pub fn tdg(&mut self, q: usize) {
        self.g(gates::tdg(q));
    }
    pub fn cz(&mut self, a: usize, b: usize) {
        self.g(gates::cz(a, b));
    }
    pub fn ccz(&mut self, a: usize, b: usize, c: usize) {
        self.g(gates::ccz(a, b, c));
    }
    pub fn cccz(&mut self, a: usize, b: usize, c: usize, d: usize) {
        self.g(gates::cccz(a, b, c, d));
    }
    pub fn csdg(&mut self, a: usize, b: usize) {
        self.g(gates::csdg(a, b));
    }
    pub fn gate(&mut self, gate: Gate) {
        self.g(gate);
    }

    pub fn reset(&mut self, q: usize) {
        self.ops.push(Op::Reset(q));
    }

    pub fn reset_all(&mut self, qs: &[usize]) {
        for &q in qs {
            self.reset(q);
        }
    }

    pub fn cx(&mut self, c: usize, t: usize) {
        self.h(t);
        self.cz(c, t);
        self.h(t);
    }

    pub fn ccx(&mut self, c1: usize, c2: usize, t: usize) {
        self.h(t);
        self.ccz(c1, c2, t);
        self.h(t);
    }

    /// `X` on every control whose required value is 0.
    pub fn flip_zero_controls(&mut self, controls: &[(usize, bool)]) {
        for &(q, v) in controls {
            if !v {
                self.x(q);
            }
        }
    }

    /// Flips `target` iff every control holds its required value.
    pub fn controlled_x(&mut self, controls: &[(usize, bool)], target: usize) {
        self.flip_zero_controls(controls);
        self.h(target);
        match controls {
            [a] => self.cz(a.0, target),
            [a, b] => self.ccz(a.0, b.0, target),
            [a, b, c] => self.cccz(a.0, b.0, c.0, target),
            _ => panic!("unsupported control count"),
        }
        self.h(target);
        self.flip_zero_controls(controls);
    }

    /// Copies the Z parity of `support` onto the `|0⟩` qubit `s`.
    pub fn extract_z(&mut self, s: usize, support: &[usize]) {
        self.h(s);
        for &d in support {
            self.cz(s, d);
        }
        self.h(s);
    }

    pub fn append(&mut self, other: &Circuit, map: &[usize]) {
        for op in &other.ops {
            match op {
                Op::Gate(g) => self.g(Gate {
                    kind: g.kind,
                    targets: g.targets.iter().map(|&q| map[q]).collect(),
                }),
                Op::Reset(q) => self.reset(map[*q]),
            }
        }
    }

    pub fn finish(
        self,
        name: &str,
        layout: Layout,
        inputs: Vec<Block>,
        outputs: Vec<Block>,
        logical: LogicalOp,
    ) -> Circuit {
        Circuit {
            name: name.to_string(),
            layout,
            n_qubits: self.roles.len(),
            ops: self.ops,
            roles: self.roles,
            inputs,
            outputs,
            logical,
        }
    }
}
