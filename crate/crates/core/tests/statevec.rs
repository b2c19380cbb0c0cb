use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use mfqec::statevec::{Gate, GateKind, PureState};

const N: usize = 4;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2×2 matrix of a single-qubit kind, written out by hand.
fn single(kind: GateKind) -> [[Complex64; 2]; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    match kind {
        GateKind::H => [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]],
        GateKind::X | GateKind::PauliX => [[z, o], [o, z]],
        GateKind::PauliY => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
        GateKind::PauliZ => [[o, z], [z, -o]],
        GateKind::S => [[o, z], [z, c(0.0, 1.0)]],
        GateKind::Sdg => [[o, z], [z, c(0.0, -1.0)]],
        GateKind::T => [[o, z], [z, c(r, r)]],
        GateKind::Tdg => [[o, z], [z, c(r, -r)]],
        _ => unreachable!(),
    }
}

/// Dense `2^N` matrix of a gate on the given targets.
fn dense(kind: GateKind, targets: &[usize]) -> DMatrix<Complex64> {
    let dim = 1 << N;
    let mut m = DMatrix::zeros(dim, dim);
    if targets.len() == 1 {
        let u = single(kind);
        let t = targets[0];
        for col in 0..dim {
            let b = (col >> t) & 1;
            for a in 0..2 {
                let row = (col & !(1 << t)) | (a << t);
                m[(row, col)] += u[a][b];
            }
        }
        return m;
    }
    let last = match kind {
        GateKind::CZ | GateKind::CCZ | GateKind::CCCZ => c(-1.0, 0.0),
        GateKind::CS => c(0.0, 1.0),
        GateKind::CSdg => c(0.0, -1.0),
        GateKind::CP(theta) => Complex64::from_polar(1.0, theta),
        _ => unreachable!(),
    };
    for i in 0..dim {
        let all = targets.iter().all(|&t| (i >> t) & 1 == 1);
        m[(i, i)] = if all { last } else { c(1.0, 0.0) };
    }
    m
}

fn kind_strategy() -> impl Strategy<Value = GateKind> {
    prop_oneof![
        Just(GateKind::H),
        Just(GateKind::X),
        Just(GateKind::S),
        Just(GateKind::Sdg),
        Just(GateKind::T),
        Just(GateKind::Tdg),
        Just(GateKind::PauliY),
        Just(GateKind::PauliZ),
        Just(GateKind::CZ),
        Just(GateKind::CS),
        Just(GateKind::CSdg),
        (-3.0f64..3.0).prop_map(GateKind::CP),
        Just(GateKind::CCZ),
        Just(GateKind::CCCZ),
    ]
}

fn gate_strategy() -> impl Strategy<Value = Gate> {
    (
        kind_strategy(),
        Just((0..N).collect::<Vec<_>>()).prop_shuffle(),
    )
        .prop_map(|(k, qs)| Gate::new(k, qs[..k.arity()].to_vec()).unwrap())
}

fn state_strategy() -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << N)
        .prop_filter("nonzero", |v| {
            v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(|v| {
            let amps: Vec<Complex64> = v.into_iter().map(|(a, b)| c(a, b)).collect();
            let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            PureState::from_amplitudes(amps.into_iter().map(|a| a / n).collect()).unwrap()
        })
}

fn close(a: &[Complex64], b: &[Complex64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-10)
}

proptest! {
    #[test]
    fn matches_dense_matrix(g in gate_strategy(), s in state_strategy()) {
        let got = s.clone().with_gate(&g).unwrap();
        let v = nalgebra::DVector::from_column_slice(s.amplitudes());
        let want = dense(g.kind, &g.targets) * v;
        prop_assert!(close(got.amplitudes(), want.as_slice()));
    }

    #[test]
    fn gate_then_inverse_is_identity(g in gate_strategy(), s in state_strategy()) {
        let back = s.clone().with_gate(&g).unwrap().with_gate(&g.inverse()).unwrap();
        prop_assert!(close(back.amplitudes(), s.amplitudes()));
    }

    #[test]
    fn diagonal_gates_commute(a in gate_strategy(), b in gate_strategy(), s in state_strategy()) {
        prop_assume!(a.is_diagonal() && b.is_diagonal());
        let ab = s.clone().with_gate(&a).unwrap().with_gate(&b).unwrap();
        let ba = s.clone().with_gate(&b).unwrap().with_gate(&a).unwrap();
        prop_assert!(close(ab.amplitudes(), ba.amplitudes()));
    }

    #[test]
    fn gates_preserve_norm(g in gate_strategy(), s in state_strategy()) {
        let out = s.with_gate(&g).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
    }
}
