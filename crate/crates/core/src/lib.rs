//! Trapped ions dispersively coupled to a single cavity mode.
//!
//! The crate builds the full, Bessel-approximated and effective Hamiltonians
//! of a cluster of trapped two-level ions interacting with a quantized field,
//! evolves states on truncated Fock spaces, evaluates the closed-form
//! cross-Kerr entanglement dynamics, and runs the post-selected motional cat
//! state protocol.
//!
//! Units: frequencies in units of `g_1`, time in units of `1/g_1`; entropy
//! dynamics are reported against `λ_1 t`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod fockspace;
pub mod hamiltonian;
pub mod nlms;

pub use error::{Result, SimError};
