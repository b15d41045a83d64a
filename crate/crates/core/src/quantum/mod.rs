//! Classical-quantum states and channels, the quantum conditional Rényi
//! entropies and the combining operations built on them.

mod channel;
mod entropy;
mod precise;
mod state;

pub use channel::{
    check_entropy, combine_cq, cq_channel_transform, dual_channel, dual_channel_unverified,
    pretty_good_guess, pretty_good_measurement, prop8_alpha2_formula, prop9_half_formula,
    symmetry_check, variable_entropy, CQChannel, DUALITY_SELF_TEST_TOL,
};
pub use entropy::{
    bar_down_entropy, bar_up_entropy, quantum_chain_transform, tilde_down_entropy, QEntropyKind,
};
pub use state::{Block, HybridState, Register, RegisterRef, STATE_TOL};
