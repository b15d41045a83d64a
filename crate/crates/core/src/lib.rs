//! Conditional Rényi entropies and information combining.
//!
//! * [`numerics`]: dense Hermitian kernel, Rényi orders, binary entropy helpers.
//! * [`classical`]: Hayashi and Arimoto conditional entropies, the tilting
//!   transform relating them, check/variable node combining, BSC/BEC bounds.
//! * [`quantum`]: hybrid classical-quantum states, sandwiched and Petz-type
//!   conditional entropies, cq channels, duals, closed forms at α = 2 and 1/2.
//! * [`extremal`]: BSC/BEC/PSC families, conjectured quantum bounds, curves.
//! * [`harness`]: random channels, scatter experiments and verification suites.
//!
//! All entropies are in nats.

// `!(x <= tol)` is used on purpose so that NaN counts as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod error;
pub mod extremal;
pub mod harness;
pub mod numerics;
pub mod quantum;

pub use error::{Error, Result};
