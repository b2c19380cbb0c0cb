//! Plain-text gate list: one operation per line, `KIND targets... [@loc]`.
//!
//! ```text
//! # rqec qubits=10 layout=all_to_all
//! H 7
//! CZ 7 0 @0
//! RESET 7
//! ```
//! `@n` is the id of the fault location attached to the operation under the
//! given noise model; lines starting with `#` are comments.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::statevec::{Gate, GateKind};

use super::{Circuit, Op};

pub fn export_circuit(circuit: &Circuit, model: &NoiseModel) -> String {
    let locations = circuit.fault_locations(model);
    let mut by_slot: Vec<Option<usize>> = vec![None; circuit.ops.len() + 1];
    let mut init = Vec::new();
    for (id, loc) in locations.iter().enumerate() {
        if loc.slot == 0 {
            init.push((id, loc.qubits[0]));
        } else {
            by_slot[loc.slot] = Some(id);
        }
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} qubits={} layout={}",
        circuit.name, circuit.n_qubits, circuit.layout
    );
    for (id, q) in init {
        let _ = writeln!(out, "# init {q} @{id}");
    }
    for (i, op) in circuit.ops.iter().enumerate() {
        match op {
            Op::Gate(g) => {
                let _ = write!(out, "{g}");
            }
            Op::Reset(q) => {
                let _ = write!(out, "RESET {q}");
            }
        }
        if let Some(id) = by_slot[i + 1] {
            let _ = write!(out, " @{id}");
        }
        out.push('\n');
    }
    out
}

/// Reads back the operations of an exported gate list.
pub fn parse_circuit(text: &str) -> Result<Vec<Op>> {
    let mut ops = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::InvalidRequest(format!("line {}: cannot parse `{line}`", n + 1));
        let mut words = line.split_whitespace().filter(|w| !w.starts_with('@'));
        let head = words.next().ok_or_else(bad)?;
        let targets: Vec<usize> = words
            .map(|w| w.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if head == "RESET" {
            if targets.len() != 1 {
                return Err(bad());
            }
            ops.push(Op::Reset(targets[0]));
            continue;
        }
        let kind = match head.strip_prefix("CP(").and_then(|r| r.strip_suffix(')')) {
            Some(angle) => GateKind::CP(angle.parse().map_err(|_| bad())?),
            None => GateKind::parse(head, None).ok_or_else(bad)?,
        };
        ops.push(Op::Gate(Gate::new(kind, targets)?));
    }
    Ok(ops)
}
