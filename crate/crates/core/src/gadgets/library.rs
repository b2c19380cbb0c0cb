use crate::statevec::{Gate, GateKind};
use crate::steane::{self, ALT_LOGICAL_Z, EXTRA_STABILIZER, LOGICAL, STABILIZERS};

use super::builder::Builder;
use super::{Block, Circuit, EcKind, Layout, LogicalOp, Role};

fn support(block: &Block, idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|&i| block[i]).collect()
}

fn extract_generators(b: &mut Builder, data: &Block, syn: &[usize]) {
    for (k, &s) in syn.iter().take(3).enumerate() {
        b.extract_z(s, &support(data, &STABILIZERS[k]));
    }
}

/// Extraction plus coherent X correction from three syndromes.
fn reduced_half(b: &mut Builder, data: &Block, syn: &[usize; 3]) {
    extract_generators(b, data, syn);
    for (q, &d) in data.iter().enumerate() {
        let pattern = steane::syndrome_of(q);
        let controls: Vec<(usize, bool)> = syn.iter().copied().zip(pattern).collect();
        b.controlled_x(&controls, d);
    }
}

/// Which three of the four overcomplete syndromes gate the correction of `q`,
/// with their required values.
pub(crate) fn overcomplete_triple(q: usize) -> [(usize, bool); 3] {
    let pattern = steane::overcomplete_syndrome_of(q);
    let ones: Vec<usize> = (0..4).filter(|&k| pattern[k]).collect();
    let mut idx: Vec<usize> = if ones.len() >= 3 {
        ones[..3].to_vec()
    } else {
        let zero = (0..4)
            .find(|&k| !pattern[k])
            .expect("weight-2 pattern has a zero");
        vec![ones[0], ones[1], zero]
    };
    idx.sort_unstable();
    [
        (idx[0], pattern[idx[0]]),
        (idx[1], pattern[idx[1]]),
        (idx[2], pattern[idx[2]]),
    ]
}

fn overcomplete_half(b: &mut Builder, data: &Block, syn: &[usize; 4]) {
    extract_generators(b, data, syn);
    b.extract_z(syn[3], &support(data, &EXTRA_STABILIZER));
    for (q, &d) in data.iter().enumerate() {
        let controls: Vec<(usize, bool)> = overcomplete_triple(q)
            .iter()
            .map(|&(k, v)| (syn[k], v))
            .collect();
        b.controlled_x(&controls, d);
    }
}

fn transversal_h(b: &mut Builder, data: &Block) {
    for &d in data {
        b.h(d);
    }
}

pub(crate) fn rqec() -> Circuit {
    let mut b = Builder::new();
    let data = b.block(Role::Data);
    let s0 = b.alloc(3, Role::Syndrome);
    let syn = [s0, s0 + 1, s0 + 2];
    reduced_half(&mut b, &data, &syn);
    b.reset_all(&syn);
    transversal_h(&mut b, &data);
    reduced_half(&mut b, &data, &syn);
    transversal_h(&mut b, &data);
    b.finish(
        "rqec",
        Layout::AllToAll,
        vec![data],
        vec![data],
        LogicalOp::Identity,
    )
}

pub(crate) fn qec_overcomplete() -> Circuit {
    let mut b = Builder::new();
    let data = b.block(Role::Data);
    let s0 = b.alloc(4, Role::Syndrome);
    let syn = [s0, s0 + 1, s0 + 2, s0 + 3];
    reduced_half(&mut b, &data, &[syn[0], syn[1], syn[2]]);
    b.reset_all(&syn[..3]);
    transversal_h(&mut b, &data);
    overcomplete_half(&mut b, &data, &syn);
    transversal_h(&mut b, &data);
    b.finish(
        "qec_overcomplete",
        Layout::AllToAll,
        vec![data],
        vec![data],
        LogicalOp::Identity,
    )
}

pub(crate) fn encode_zero() -> Circuit {
    let mut b = Builder::new();
    let data = b.block(Role::Data);
    let fl = b.alloc(1, Role::Flag);
    let fs = b.alloc(1, Role::Flag);
    for g in steane::encoder_gates(&data) {
        b.gate(g);
    }
    b.extract_z(fl, &support(&data, &LOGICAL));
    b.extract_z(fs, &support(&data, &EXTRA_STABILIZER));
    b.controlled_x(&[(fl, true), (fs, true)], data[0]);
    b.finish(
        "encode_zero",
        Layout::AllToAll,
        vec![],
        vec![data],
        LogicalOp::PrepareZero,
    )
}

/// Non-fault-tolerant magic-state encoder.
fn magic_encoder(b: &mut Builder, m: &Block) {
    b.h(m[1]);
    b.t(m[1]);
    // Each target is rotated once around all of its CZs.
    for q in [0, 2, 3, 4, 5, 6] {
        b.h(m[q]);
    }
    b.cz(m[1], m[3]);
    b.cz(m[1], m[5]);
    b.h(m[1]);
    for (c, targets) in [(2, [0, 1, 3]), (4, [0, 3, 5]), (6, [0, 1, 5])] {
        for t in targets {
            b.cz(m[c], m[t]);
        }
    }
    for q in [0, 1, 3, 5] {
        b.h(m[q]);
    }
}

/// Magic-state preparation on `m1` using `w` and flag `f`.
fn magic_body(b: &mut Builder, m1: &Block, w: &Block, f: usize) {
    magic_encoder(b, m1);
    let syn = [w[0], w[1], w[2]];
    extract_generators(b, m1, &syn);
    let v = w[3];
    b.h(v);
    for &q in m1 {
        b.t(q);
        b.cx(v, q);
        b.tdg(q);
    }
    b.h(v);
    let fs = w[4];
    b.controlled_x(&[(syn[0], false), (syn[1], false), (syn[2], false)], fs);
    b.x(fs);
    b.controlled_x(&[(fs, false), (v, false)], f);
    b.x(f);
    b.reset_all(&w[..5]);
    magic_encoder(b, w);
    for q in 0..7 {
        b.ccx(f, m1[q], w[q]);
        b.ccx(f, w[q], m1[q]);
        b.ccx(f, m1[q], w[q]);
    }
}

pub(crate) fn magic_encode() -> Circuit {
    let mut b = Builder::new();
    let m1 = b.block(Role::Magic);
    let w = b.block(Role::Aux);
    let f = b.alloc(1, Role::Flag);
    magic_body(&mut b, &m1, &w, f);
    b.finish(
        "magic_encode",
        Layout::AllToAll,
        vec![],
        vec![m1],
        LogicalOp::PrepareMagic,
    )
}

/// Flagged readout of the magic block's `Z_L` controlling logical S on `d`.
fn cs_body(b: &mut Builder, d: &Block, m: &Block, aux: &[usize; 5]) {
    let syn = [aux[0], aux[1], aux[2]];
    for flag in [aux[3], aux[4]] {
        extract_generators(b, m, &syn);
        b.cx(syn[0], flag);
        b.x(flag);
        b.controlled_x(&[(syn[0], false), (syn[1], false), (syn[2], false)], flag);
        b.reset_all(&syn);
    }
    let a = aux[0];
    for &dq in d {
        b.extract_z(a, &support(m, &ALT_LOGICAL_Z));
        b.ccx(aux[3], aux[4], a);
        b.csdg(a, dq);
        b.reset(a);
    }
}

pub(crate) fn cs_with_reset() -> Circuit {
    let mut b = Builder::new();
    let d = b.block(Role::Data);
    let m = b.block(Role::Magic);
    let a0 = b.alloc(5, Role::Aux);
    let aux = [a0, a0 + 1, a0 + 2, a0 + 3, a0 + 4];
    cs_body(&mut b, &d, &m, &aux);
    b.finish(
        "cs_with_reset",
        Layout::AllToAll,
        vec![d, m],
        vec![d],
        LogicalOp::CsInjection,
    )
}

pub(crate) fn t_gate() -> Circuit {
    let mut b = Builder::new();
    let d = b.block(Role::Data);
    let m1 = b.block(Role::Magic);
    let w = b.block(Role::Aux);
    let f = b.alloc(1, Role::Flag);
    magic_body(&mut b, &m1, &w, f);
    b.reset_all(&w);
    b.reset(f);
    for q in 0..7 {
        b.cx(d[q], m1[q]);
    }
    cs_body(&mut b, &d, &m1, &[w[0], w[1], w[2], w[3], w[4]]);
    b.finish("t_gate", Layout::AllToAll, vec![d], vec![d], LogicalOp::T)
}

pub(crate) fn logical_cz() -> Circuit {
    let mut b = Builder::new();
    let a = b.block(Role::Data);
    let c = b.block(Role::Data);
    for q in 0..7 {
        b.cz(a[q], c[q]);
    }
    b.finish(
        "logical_cz",
        Layout::AllToAll,
        vec![a, c],
        vec![a, c],
        LogicalOp::Cz,
    )
}

pub(crate) fn transversal(kind: GateKind, name: &str, op: LogicalOp) -> Circuit {
    let mut b = Builder::new();
    let d = b.block(Role::Data);
    for &q in &d {
        b.gate(Gate::new(kind, vec![q]).expect("single-qubit kind"));
    }
    b.finish(name, Layout::AllToAll, vec![d], vec![d], op)
}

fn ec_circuit(kind: EcKind) -> Circuit {
    match kind {
        EcKind::Rqec => rqec(),
        EcKind::QecOvercomplete => qec_overcomplete(),
    }
}

/// `inner` framed by error correction on each input and output block.
pub(crate) fn ext_rect(inner: &Circuit, pre: EcKind, post: EcKind) -> Circuit {
    let mut b = Builder::new();
    for &r in &inner.roles {
        b.alloc(1, r);
    }
    let uses_overcomplete = (!inner.inputs.is_empty() && pre == EcKind::QecOvercomplete)
        || post == EcKind::QecOvercomplete;
    let n_anc = if uses_overcomplete { 4 } else { 3 };
    let anc0 = b.alloc(n_anc, Role::Syndrome);
    let ancillas: Vec<usize> = (anc0..anc0 + n_anc).collect();
    let mut dirty = false;
    let mut cycle = |b: &mut Builder, kind: EcKind, block: &Block| {
        if dirty {
            b.reset_all(&ancillas);
        }
        let ec = ec_circuit(kind);
        let mut map: Vec<usize> = block.to_vec();
        map.extend_from_slice(&ancillas[..ec.n_qubits - 7]);
        b.append(&ec, &map);
        dirty = true;
    };
    for blk in &inner.inputs {
        cycle(&mut b, pre, blk);
    }
    let identity: Vec<usize> = (0..inner.n_qubits).collect();
    b.append(inner, &identity);
    for blk in &inner.outputs {
        cycle(&mut b, post, blk);
    }
    b.finish(
        &inner.name,
        inner.layout,
        inner.inputs.clone(),
        inner.outputs.clone(),
        inner.logical,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fires(q: usize, bits: [bool; 4]) -> bool {
        overcomplete_triple(q).iter().all(|&(k, v)| bits[k] == v)
    }

    #[test]
    fn overcomplete_triples_are_selective() {
        for s in 0u8..16 {
            let bits = [s & 1 != 0, s & 2 != 0, s & 4 != 0, s & 8 != 0];
            let firing: Vec<usize> = (0..7).filter(|&q| fires(q, bits)).collect();
            if s.count_ones() <= 1 {
                assert!(firing.is_empty(), "{bits:?}");
            }
            if let Some(q) = (0..7).find(|&q| steane::overcomplete_syndrome_of(q) == bits) {
                assert_eq!(firing, vec![q]);
            }
        }
    }
}
