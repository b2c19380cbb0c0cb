//! Exact state-vector laboratory for measurement-free error correction on
//! the Steane code under biased Pauli noise.
//!
//! The crate builds every gadget from a small native gate set, injects
//! faults drawn from parameterized Pauli channels, checks single-fault
//! tolerance exhaustively, estimates logical error rates by conditioned
//! Monte Carlo and compares them with closed-form predictions.
//!
//! ```
//! use mfqec::gadgets::{build_default, gate_counts, GadgetId};
//!
//! let rqec = build_default(&GadgetId::Rqec).unwrap();
//! let counts = gate_counts(&rqec);
//! assert_eq!((counts.cz, counts.cccz, counts.qubits), (24, 14, 10));
//! ```

pub mod analytic;
pub mod error;
pub mod ftcheck;
pub mod gadgets;
pub mod noise;
pub mod register;
pub mod statevec;
pub mod steane;
pub mod tomography;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/state_vectors.md")]
    mod state_vectors {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
    #[doc = include_str!("../../../book/src/steane.md")]
    mod steane {}
    #[doc = include_str!("../../../book/src/gadgets.md")]
    mod gadgets {}
    #[doc = include_str!("../../../book/src/fault_tolerance.md")]
    mod fault_tolerance {}
    #[doc = include_str!("../../../book/src/tomography.md")]
    mod tomography {}
    #[doc = include_str!("../../../book/src/analytic.md")]
    mod analytic {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
