//! Circuit builders for every gadget, gate counting, export and execution.

mod builder;
mod export;
mod library;
mod nnn;
mod run;

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{FaultLocation, LocationClass, NoiseModel};
use crate::statevec::{phase, Gate, GateKind, PureState};
use crate::steane::{self, TestState};

pub use export::{export_circuit, parse_circuit};
pub(crate) use run::{initial_register, run_segment, PlacedFault};
pub use run::{run, Branch, Evaluator, LabelWeights, ResetMode, DEFAULT_BRANCH_CAP};

/// One circuit step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Op {
    Gate(Gate),
    /// Projects the qubit and re-prepares it in `|0⟩`.
    Reset(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Data,
    Syndrome,
    Flag,
    Magic,
    Aux,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    AllToAll,
    Nnn,
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::AllToAll => "all_to_all",
            Layout::Nnn => "nnn",
        })
    }
}

pub type Block = [usize; steane::BLOCK];

/// Ideal logical action of a gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogicalOp {
    Identity,
    H,
    S,
    X,
    Cz,
    T,
    /// Input `CX_{D→M}(ψ ⊗ |M_L⟩)` on (data, magic); output `Tψ` on data.
    CsInjection,
    PrepareZero,
    PrepareMagic,
}

impl LogicalOp {
    pub fn input_blocks(self) -> usize {
        match self {
            LogicalOp::PrepareZero | LogicalOp::PrepareMagic => 0,
            LogicalOp::Cz | LogicalOp::CsInjection => 2,
            _ => 1,
        }
    }

    pub fn output_blocks(self) -> usize {
        match self {
            LogicalOp::Cz => 2,
            _ => 1,
        }
    }
}

fn magic_coefficients() -> Vec<Complex64> {
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    vec![r, r * phase(FRAC_PI_4)]
}

/// An executable gadget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    pub layout: Layout,
    pub n_qubits: usize,
    pub ops: Vec<Op>,
    pub roles: Vec<Role>,
    pub inputs: Vec<Block>,
    pub outputs: Vec<Block>,
    pub logical: LogicalOp,
}

impl Circuit {
    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.ops.iter().filter_map(|o| match o {
            Op::Gate(g) => Some(g),
            Op::Reset(_) => None,
        })
    }

    fn input_qubits(&self) -> BTreeSet<usize> {
        self.inputs.iter().flatten().copied().collect()
    }

    /// Fault locations enabled by the model's channel flags, ordered by slot.
    ///
    /// Slot 0 is before the first operation; slot `i + 1` follows operation `i`.
    pub fn fault_locations(&self, model: &NoiseModel) -> Vec<FaultLocation> {
        let mut out = Vec::new();
        if model.initialization {
            let inputs = self.input_qubits();
            for q in 0..self.n_qubits {
                if !inputs.contains(&q) {
                    out.push(FaultLocation {
                        slot: 0,
                        class: LocationClass::Initialization,
                        qubits: vec![q],
                    });
                }
            }
        }
        for (i, op) in self.ops.iter().enumerate() {
            match op {
                Op::Gate(g) => {
                    let l = g.targets.len();
                    if l >= 2 {
                        if model.multi_qubit {
                            out.push(FaultLocation {
                                slot: i + 1,
                                class: LocationClass::MultiQubit(l),
                                qubits: g.targets.clone(),
                            });
                        }
                    } else if model.single_qubit && is_native_single(g.kind) {
                        out.push(FaultLocation {
                            slot: i + 1,
                            class: LocationClass::SingleQubit,
                            qubits: g.targets.clone(),
                        });
                    }
                }
                Op::Reset(q) => {
                    if model.initialization && model.reset_is_init {
                        out.push(FaultLocation {
                            slot: i + 1,
                            class: LocationClass::Initialization,
                            qubits: vec![*q],
                        });
                    }
                }
            }
        }
        out
    }

    /// Input state and ideal output for a test kind.
    ///
    /// Single-block kinds are repeated on every block of a two-block gadget.
    pub fn test_io(&self, test: TestState) -> Result<(Option<PureState>, PureState)> {
        let base = test.coefficients();
        let per_block = |blocks: usize| -> Result<Vec<Complex64>> {
            if test.n_blocks() == blocks {
                return Ok(base.clone());
            }
            if test.n_blocks() == 1 {
                let mut c = vec![Complex64::new(1.0, 0.0)];
                for _ in 0..blocks {
                    c = crate::statevec::kron(&c, &base);
                }
                return Ok(c);
            }
            Err(Error::InvalidRequest(format!(
                "test state {test:?} does not fit a {blocks}-block gadget"
            )))
        };
        let (input, output) = match self.logical {
            LogicalOp::PrepareZero => (
                None,
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            ),
            LogicalOp::PrepareMagic => (None, magic_coefficients()),
            LogicalOp::CsInjection => {
                let c = per_block(1)?;
                let m = magic_coefficients();
                let mut joint = vec![Complex64::new(0.0, 0.0); 4];
                for d in 0..2 {
                    for k in 0..2 {
                        joint[d | ((k ^ d) << 1)] += c[d] * m[k];
                    }
                }
                (Some(joint), vec![c[0], c[1] * phase(FRAC_PI_4)])
            }
            op => {
                let c = per_block(op.input_blocks())?;
                let r = FRAC_1_SQRT_2;
                let out = match op {
                    LogicalOp::Identity => c.clone(),
                    LogicalOp::H => vec![(c[0] + c[1]) * r, (c[0] - c[1]) * r],
                    LogicalOp::S => vec![c[0], c[1] * Complex64::new(0.0, 1.0)],
                    LogicalOp::X => vec![c[1], c[0]],
                    LogicalOp::T => vec![c[0], c[1] * phase(FRAC_PI_4)],
                    LogicalOp::Cz => vec![c[0], c[1], c[2], -c[3]],
                    _ => unreachable!(),
                };
                (Some(c), out)
            }
        };
        let input = match input {
            Some(c) => Some(steane::logical_state(&c)?),
            None => None,
        };
        Ok((input, steane::logical_state(&output)?))
    }

    /// Default single-block or two-block test kind for this gadget.
    pub fn default_test(&self) -> TestState {
        if self.logical.input_blocks() == 2 && self.logical != LogicalOp::CsInjection {
            TestState::Double
        } else {
            TestState::Single
        }
    }

    /// Rewrites the circuit so that every reset is replaced by a fresh qubit.
    pub fn without_resets(&self) -> Circuit {
        let mut map: Vec<usize> = (0..self.n_qubits).collect();
        let mut roles = self.roles.clone();
        let mut ops = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            match op {
                Op::Gate(g) => ops.push(Op::Gate(Gate {
                    kind: g.kind,
                    targets: g.targets.iter().map(|&q| map[q]).collect(),
                })),
                Op::Reset(q) => {
                    let role = roles[map[*q]];
                    map[*q] = roles.len();
                    roles.push(role);
                }
            }
        }
        let remap = |b: &Block| -> Block {
            let mut o = *b;
            for q in &mut o {
                *q = map[*q];
            }
            o
        };
        Circuit {
            name: self.name.clone(),
            layout: self.layout,
            n_qubits: roles.len(),
            ops,
            roles,
            inputs: self.inputs.clone(),
            outputs: self.outputs.iter().map(remap).collect(),
            logical: self.logical,
        }
    }
}

fn is_native_single(kind: GateKind) -> bool {
    matches!(
        kind,
        GateKind::H | GateKind::X | GateKind::S | GateKind::Sdg | GateKind::T | GateKind::Tdg
    )
}

/// Kinds allowed in a gadget.
pub fn is_basis_kind(kind: GateKind) -> bool {
    is_native_single(kind)
        || matches!(
            kind,
            GateKind::CZ
                | GateKind::CS
                | GateKind::CSdg
                | GateKind::CP(_)
                | GateKind::CCZ
                | GateKind::CCCZ
        )
}

/// Two- and multi-qubit gate tallies plus the qubit count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub cz: usize,
    pub ccz: usize,
    pub cccz: usize,
    pub cp: usize,
    pub qubits: usize,
}

impl fmt::Display for GateCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, {}, {}, {}, {}",
            self.cz, self.ccz, self.cccz, self.cp, self.qubits
        )
    }
}

/// Counts gates by kind; controlled-S variants count as `CP`.
pub fn gate_counts(circuit: &Circuit) -> GateCounts {
    let mut c = GateCounts {
        qubits: circuit.n_qubits,
        ..GateCounts::default()
    };
    for g in circuit.gates() {
        match g.kind {
            GateKind::CZ => c.cz += 1,
            GateKind::CCZ => c.ccz += 1,
            GateKind::CCCZ => c.cccz += 1,
            GateKind::CS | GateKind::CSdg | GateKind::CP(_) => c.cp += 1,
            _ => {}
        }
    }
    c
}

/// Error-correction cycles that may frame an extended rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EcKind {
    Rqec,
    QecOvercomplete,
}

impl EcKind {
    pub fn gadget(self) -> GadgetId {
        match self {
            EcKind::Rqec => GadgetId::Rqec,
            EcKind::QecOvercomplete => GadgetId::QecOvercomplete,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GadgetId {
    EncodeZero,
    Rqec,
    QecOvercomplete,
    MagicEncode,
    CsWithReset,
    TGate,
    LogicalCz,
    LogicalH,
    LogicalS,
    LogicalX,
    NnnRqec,
    NnnEncodeZero,
    ExtRect {
        inner: Box<GadgetId>,
        pre: EcKind,
        post: EcKind,
    },
}

impl GadgetId {
    /// Every named gadget, including the three standard extended rectangles.
    pub fn all() -> Vec<GadgetId> {
        vec![
            GadgetId::EncodeZero,
            GadgetId::Rqec,
            GadgetId::QecOvercomplete,
            GadgetId::MagicEncode,
            GadgetId::CsWithReset,
            GadgetId::TGate,
            GadgetId::LogicalCz,
            GadgetId::LogicalH,
            GadgetId::LogicalS,
            GadgetId::LogicalX,
            GadgetId::NnnRqec,
            GadgetId::NnnEncodeZero,
            GadgetId::ext_encode(),
            GadgetId::ext_cz(),
            GadgetId::ext_t(),
        ]
    }

    pub fn ext_encode() -> GadgetId {
        GadgetId::ExtRect {
            inner: Box::new(GadgetId::EncodeZero),
            pre: EcKind::Rqec,
            post: EcKind::Rqec,
        }
    }

    pub fn ext_cz() -> GadgetId {
        GadgetId::ExtRect {
            inner: Box::new(GadgetId::LogicalCz),
            pre: EcKind::Rqec,
            post: EcKind::Rqec,
        }
    }

    pub fn ext_t() -> GadgetId {
        GadgetId::ExtRect {
            inner: Box::new(GadgetId::TGate),
            pre: EcKind::QecOvercomplete,
            post: EcKind::Rqec,
        }
    }

    pub fn name(&self) -> String {
        match self {
            GadgetId::EncodeZero => "encode_zero".into(),
            GadgetId::Rqec => "rqec".into(),
            GadgetId::QecOvercomplete => "qec_overcomplete".into(),
            GadgetId::MagicEncode => "magic_encode".into(),
            GadgetId::CsWithReset => "cs_with_reset".into(),
            GadgetId::TGate => "t_gate".into(),
            GadgetId::LogicalCz => "logical_cz".into(),
            GadgetId::LogicalH => "logical_h".into(),
            GadgetId::LogicalS => "logical_s".into(),
            GadgetId::LogicalX => "logical_x".into(),
            GadgetId::NnnRqec => "nnn_rqec".into(),
            GadgetId::NnnEncodeZero => "nnn_encode_zero".into(),
            ext if *ext == GadgetId::ext_encode() => "ext_encode".into(),
            ext if *ext == GadgetId::ext_cz() => "ext_cz".into(),
            ext if *ext == GadgetId::ext_t() => "ext_t".into(),
            GadgetId::ExtRect { inner, pre, post } => format!(
                "ext({},{},{})",
                inner.name(),
                pre.gadget().name(),
                post.gadget().name()
            ),
        }
    }

    pub fn layout(&self) -> Layout {
        match self {
            GadgetId::NnnRqec | GadgetId::NnnEncodeZero => Layout::Nnn,
            GadgetId::ExtRect { inner, .. } => inner.layout(),
            _ => Layout::AllToAll,
        }
    }

    /// Reference resource counts, where one exists.
    pub fn table_counts(&self) -> Option<GateCounts> {
        let row = |cz, ccz, cccz, cp, qubits| {
            Some(GateCounts {
                cz,
                ccz,
                cccz,
                cp,
                qubits,
            })
        };
        match self {
            GadgetId::Rqec => row(24, 0, 14, 0, 10),
            GadgetId::QecOvercomplete => row(28, 0, 14, 0, 11),
            GadgetId::TGate => row(95, 29, 3, 7, 22),
            GadgetId::MagicEncode => row(41, 22, 1, 0, 15),
            GadgetId::CsWithReset => row(47, 7, 2, 7, 19),
            GadgetId::NnnRqec => row(92, 42, 0, 0, 17),
            GadgetId::NnnEncodeZero => row(29, 1, 0, 0, 13),
            _ => None,
        }
    }

    /// The gadgets whose single-fault tolerance is claimed.
    pub fn fault_tolerant_set() -> Vec<GadgetId> {
        vec![
            GadgetId::EncodeZero,
            GadgetId::Rqec,
            GadgetId::QecOvercomplete,
            GadgetId::MagicEncode,
            GadgetId::CsWithReset,
            GadgetId::TGate,
            GadgetId::NnnRqec,
            GadgetId::NnnEncodeZero,
        ]
    }
}

impl fmt::Display for GadgetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for GadgetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<GadgetId> {
        let s = s.trim();
        Ok(match s {
            "encode_zero" => GadgetId::EncodeZero,
            "rqec" => GadgetId::Rqec,
            "qec_overcomplete" => GadgetId::QecOvercomplete,
            "magic_encode" => GadgetId::MagicEncode,
            "cs_with_reset" => GadgetId::CsWithReset,
            "t_gate" => GadgetId::TGate,
            "logical_cz" => GadgetId::LogicalCz,
            "logical_h" => GadgetId::LogicalH,
            "logical_s" => GadgetId::LogicalS,
            "logical_x" => GadgetId::LogicalX,
            "nnn_rqec" => GadgetId::NnnRqec,
            "nnn_encode_zero" => GadgetId::NnnEncodeZero,
            "ext_encode" => GadgetId::ext_encode(),
            "ext_cz" => GadgetId::ext_cz(),
            "ext_t" => GadgetId::ext_t(),
            _ => {
                let body = s
                    .strip_prefix("ext(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::UnknownGadget(s.to_string()))?;
                let parts: Vec<&str> = body.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(Error::UnknownGadget(s.to_string()));
                }
                let ec = |name: &str| match name {
                    "rqec" => Ok(EcKind::Rqec),
                    "qec_overcomplete" => Ok(EcKind::QecOvercomplete),
                    _ => Err(Error::UnknownGadget(s.to_string())),
                };
                GadgetId::ExtRect {
                    inner: Box::new(parts[0].parse()?),
                    pre: ec(parts[1])?,
                    post: ec(parts[2])?,
                }
            }
        })
    }
}

/// Ancilla policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Replace every reset auxiliary by a fresh qubit.
    pub fresh_ancillas: bool,
    /// Reuse auxiliaries after resetting them.
    pub reuse_via_reset: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            fresh_ancillas: false,
            reuse_via_reset: true,
        }
    }
}

/// Builds a gadget.
pub fn build(id: &GadgetId, options: BuildOptions) -> Result<Circuit> {
    match (options.fresh_ancillas, options.reuse_via_reset) {
        (false, false) => {
            return Err(Error::InconsistentOptions(
                "auxiliaries must be either fresh or reset".into(),
            ))
        }
        (true, true) => {
            return Err(Error::InconsistentOptions(
                "fresh auxiliaries and reuse via reset are exclusive".into(),
            ))
        }
        _ => {}
    }
    if options.fresh_ancillas && id.layout() == Layout::Nnn {
        return Err(Error::InconsistentOptions(
            "nnn layouts allow a single shuttle, so auxiliaries are reused via reset".into(),
        ));
    }
    let circuit = match id {
        GadgetId::EncodeZero => library::encode_zero(),
        GadgetId::Rqec => library::rqec(),
        GadgetId::QecOvercomplete => library::qec_overcomplete(),
        GadgetId::MagicEncode => library::magic_encode(),
        GadgetId::CsWithReset => library::cs_with_reset(),
        GadgetId::TGate => library::t_gate(),
        GadgetId::LogicalCz => library::logical_cz(),
        GadgetId::LogicalH => library::transversal(GateKind::H, "logical_h", LogicalOp::H),
        GadgetId::LogicalS => library::transversal(GateKind::Sdg, "logical_s", LogicalOp::S),
        GadgetId::LogicalX => library::transversal(GateKind::X, "logical_x", LogicalOp::X),
        GadgetId::NnnRqec => nnn::nnn_rqec(),
        GadgetId::NnnEncodeZero => nnn::nnn_encode_zero(),
        GadgetId::ExtRect { inner, pre, post } => {
            let inner_c = build(inner, BuildOptions::default())?;
            let mut c = library::ext_rect(&inner_c, *pre, *post);
            c.name = id.name();
            c
        }
    };
    Ok(if options.fresh_ancillas {
        circuit.without_resets()
    } else {
        circuit
    })
}

/// Builds with default options.
pub fn build_default(id: &GadgetId) -> Result<Circuit> {
    build(id, BuildOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for id in GadgetId::all() {
            let parsed: GadgetId = id.name().parse().unwrap();
            assert_eq!(parsed, id);
        }
        let custom: GadgetId = "ext(logical_h, qec_overcomplete, rqec)".parse().unwrap();
        assert_eq!(custom.name(), "ext(logical_h,qec_overcomplete,rqec)");
        assert!(matches!(
            "bogus".parse::<GadgetId>(),
            Err(Error::UnknownGadget(_))
        ));
    }

    #[test]
    fn empty_counts() {
        let c = Circuit {
            name: "empty".into(),
            layout: Layout::AllToAll,
            n_qubits: 0,
            ops: vec![],
            roles: vec![],
            inputs: vec![],
            outputs: vec![],
            logical: LogicalOp::Identity,
        };
        assert_eq!(gate_counts(&c), GateCounts::default());
    }

    #[test]
    fn option_validation() {
        let bad = BuildOptions {
            fresh_ancillas: false,
            reuse_via_reset: false,
        };
        assert!(matches!(
            build(&GadgetId::Rqec, bad),
            Err(Error::InconsistentOptions(_))
        ));
        let fresh = BuildOptions {
            fresh_ancillas: true,
            reuse_via_reset: false,
        };
        assert!(matches!(
            build(&GadgetId::NnnRqec, fresh),
            Err(Error::InconsistentOptions(_))
        ));
        let c = build(&GadgetId::Rqec, fresh).unwrap();
        assert!(c.ops.iter().all(|o| matches!(o, Op::Gate(_))));
        assert_eq!(c.n_qubits, 13);
        let counts = gate_counts(&c);
        assert_eq!((counts.cz, counts.cccz), (24, 14));
    }
}
