//! Linear-algebra kernel and scalar entropy helpers.

mod alpha;
mod binary;
pub(crate) mod extended;
mod linalg;

pub use alpha::{Alpha, Regime, ALPHA_ONE_THRESHOLD};
pub(crate) use binary::binary_renyi_unchecked;
pub use binary::{
    binary_renyi_entropy, clamp_binary_entropy, inverse_binary_renyi, star, ENTROPY_CLAMP_TOL,
};
pub use linalg::{
    eig_hermitian, matrix_power_on_support, partial_trace, Eigen, HermitianMatrix, Subsystem, C64,
    HERMITIAN_TOL, MAX_DIM, POSITIVE_POWER_CUTOFF, PSD_TOL, SUPPORT_CUTOFF,
};
