//! Next-nearest-neighbor variants: no four-qubit gates, distant qubits are
//! reached through relay auxiliaries.

use crate::steane::{self, EXTRA_STABILIZER, LOGICAL, STABILIZERS};

use super::builder::Builder;
use super::{Block, Circuit, Layout, LogicalOp, Role};

/// Round-robin pool of auxiliaries, each reset after use.
struct Pool {
    qubits: Vec<usize>,
    next: usize,
}

impl Pool {
    fn take(&mut self) -> usize {
        let q = self.qubits[self.next % self.qubits.len()];
        self.next += 1;
        q
    }
}

/// `CX(c → t)` routed through the `|0⟩` auxiliary `r`.
fn relayed_cx(b: &mut Builder, c: usize, t: usize, r: usize) {
    b.cx(c, r);
    b.cx(r, t);
    b.cx(c, r);
    b.reset(r);
}

/// Z-parity extraction where the qubits in `far` are reached through `relay`.
fn extract_relayed(b: &mut Builder, s: usize, near: &[usize], far: &[usize], relay: &mut Pool) {
    b.h(s);
    for &d in near {
        b.cz(s, d);
    }
    for &d in far {
        let r = relay.take();
        b.cx(d, r);
        b.cz(s, r);
        b.cx(d, r);
        b.reset(r);
    }
    b.h(s);
}

fn swap(b: &mut Builder, a: usize, c: usize) {
    b.cx(a, c);
    b.cx(c, a);
    b.cx(a, c);
}

/// Index of the syndrome next to data qubit `q`.
fn near_syndrome(q: usize) -> usize {
    match q {
        1..=3 => 0,
        0 | 4 | 5 => 1,
        _ => 2,
    }
}

fn needs_swap(q: usize) -> bool {
    !matches!(q, 0 | 2)
}

fn nnn_half(
    b: &mut Builder,
    data: &Block,
    syn: &[usize; 3],
    helper: &mut Pool,
    and_aux: &mut Pool,
    x: usize,
) {
    let relayed = [Some(2usize), None, Some(6)];
    for (k, &s) in syn.iter().enumerate() {
        let near: Vec<usize> = STABILIZERS[k]
            .iter()
            .filter(|&&q| Some(q) != relayed[k])
            .map(|&q| data[q])
            .collect();
        let far: Vec<usize> = relayed[k].iter().map(|&q| data[q]).collect();
        extract_relayed(b, s, &near, &far, helper);
    }
    for q in 0..7 {
        let pattern = steane::syndrome_of(q);
        let n = near_syndrome(q);
        let far: Vec<(usize, bool)> = (0..3)
            .filter(|&k| k != n)
            .map(|k| (syn[k], pattern[k]))
            .collect();
        let a = and_aux.take();
        b.controlled_x(&far, a);
        let near_q = if needs_swap(q) {
            swap(b, syn[n], x);
            x
        } else {
            syn[n]
        };
        b.controlled_x(&[(a, true), (near_q, pattern[n])], data[q]);
        if needs_swap(q) {
            swap(b, x, syn[n]);
            b.reset(x);
        }
        b.controlled_x(&far, a);
        b.reset(a);
    }
}

pub(crate) fn nnn_rqec() -> Circuit {
    let mut b = Builder::new();
    let data = b.block(Role::Data);
    let s0 = b.alloc(3, Role::Syndrome);
    let syn = [s0, s0 + 1, s0 + 2];
    let helper = b.alloc(1, Role::Aux);
    let a0 = b.alloc(5, Role::Aux);
    let x = b.alloc(1, Role::Aux);
    let mut helper = Pool {
        qubits: vec![helper],
        next: 0,
    };
    let mut and_aux = Pool {
        qubits: (a0..a0 + 5).collect(),
        next: 0,
    };
    nnn_half(&mut b, &data, &syn, &mut helper, &mut and_aux, x);
    b.reset_all(&syn);
    for &d in &data {
        b.h(d);
    }
    nnn_half(&mut b, &data, &syn, &mut helper, &mut and_aux, x);
    for &d in &data {
        b.h(d);
    }
    b.finish(
        "nnn_rqec",
        Layout::Nnn,
        vec![data],
        vec![data],
        LogicalOp::Identity,
    )
}

pub(crate) fn nnn_encode_zero() -> Circuit {
    let mut b = Builder::new();
    let data = b.block(Role::Data);
    let fl = b.alloc(1, Role::Flag);
    let fs = b.alloc(1, Role::Flag);
    let r0 = b.alloc(4, Role::Aux);
    let mut relay = Pool {
        qubits: (r0..r0 + 4).collect(),
        next: 0,
    };
    for c in [2, 4, 6] {
        b.h(data[c]);
    }
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
        if matches!((c, t), (2, 3) | (6, 5) | (4, 0)) {
            let r = relay.take();
            relayed_cx(&mut b, data[c], data[t], r);
        } else {
            b.cx(data[c], data[t]);
        }
    }
    let direct_logical: Vec<usize> = LOGICAL
        .iter()
        .filter(|&&q| q != 6)
        .map(|&q| data[q])
        .collect();
    extract_relayed(&mut b, fl, &direct_logical, &[data[6]], &mut relay);
    let far_extra: Vec<usize> = EXTRA_STABILIZER[1..].iter().map(|&q| data[q]).collect();
    extract_relayed(&mut b, fs, &[data[0]], &far_extra, &mut relay);
    b.controlled_x(&[(fl, true), (fs, true)], data[0]);
    b.finish(
        "nnn_encode_zero",
        Layout::Nnn,
        vec![],
        vec![data],
        LogicalOp::PrepareZero,
    )
}
