//! Seeded random instances. Every sample is drawn from its own ChaCha20
//! stream `(seed, index)`, so results do not depend on evaluation order.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::classical::JointDistribution;
use crate::numerics::{HermitianMatrix, C64};
use crate::quantum::{CQChannel, HybridState, Register};

/// Generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Hilbert–Schmidt random density matrix `GG†/Tr GG†` with `G` a square
/// complex Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let m = HermitianMatrix::symmetrized(&g * g.adjoint());
    let t = m.trace();
    m.scale(1.0 / t)
}

/// Haar random unit vector.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| complex_normal(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Channel with independent Hilbert–Schmidt outputs and uniform prior.
pub fn sample_random_channel<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CQChannel {
    let s0 = random_density_matrix(rng, dim);
    let s1 = random_density_matrix(rng, dim);
    CQChannel::new(s0, s1).expect("Ginibre outputs are density matrices")
}

/// `sample_random_channel` on the stream `(seed, index)`.
pub fn channel_at(seed: u64, index: u64, dim: usize) -> CQChannel {
    sample_random_channel(&mut sample_rng(seed, index), dim)
}

fn simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let t: f64 = w.iter().sum();
    w.into_iter().map(|x| x / t).collect()
}

/// Uniformly random joint distribution of a binary `X` and `y_arity` outputs.
pub fn random_joint<R: Rng + ?Sized>(rng: &mut R, y_arity: usize) -> JointDistribution {
    JointDistribution::new(2, y_arity, simplex(rng, 2 * y_arity)).expect("simplex point")
}

/// Binary-input channel with uniform input and uniformly random rows `W(·|x)`.
pub fn random_classical_channel<R: Rng + ?Sized>(rng: &mut R, y_arity: usize) -> JointDistribution {
    let mut probs = simplex(rng, y_arity);
    probs.extend(simplex(rng, y_arity));
    JointDistribution::from_weights(2, y_arity, probs).expect("two simplex rows")
}

/// Full-rank random state on quantum registers `A`, `B`, `C`.
pub fn random_tripartite<R: Rng + ?Sized>(rng: &mut R, dims: [usize; 3]) -> HybridState {
    let rho = random_density_matrix(rng, dims.iter().product());
    HybridState::quantum_only(
        vec![
            Register::new("A", dims[0]),
            Register::new("B", dims[1]),
            Register::new("C", dims[2]),
        ],
        rho,
    )
    .expect("random density matrix is a valid state")
}

/// Random pure state on `A`, `B`, `C`.
pub fn random_pure_tripartite<R: Rng + ?Sized>(rng: &mut R, dims: [usize; 3]) -> HybridState {
    let psi = random_pure_state(rng, dims.iter().product());
    HybridState::quantum_only(
        vec![
            Register::new("A", dims[0]),
            Register::new("B", dims[1]),
            Register::new("C", dims[2]),
        ],
        HermitianMatrix::outer(&psi),
    )
    .expect("projector onto a unit vector is a valid state")
}
