//! Binary-input classical-quantum channels and their combinations.

use std::f64::consts::{FRAC_PI_4, LN_2};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::entropy::{bar_up_entropy, tilde_down_entropy, QEntropyKind};
use super::precise::{symmetry_gap, PreciseChannel};
use super::state::{HybridState, Register};
use crate::classical::JointDistribution;
use crate::error::{Error, Result};
use crate::numerics::{clamp_binary_entropy, Alpha, HermitianMatrix, C64};

/// Tolerance of the dual-channel self-test.
pub const DUALITY_SELF_TEST_TOL: f64 = 1e-9;

const CHANNEL_TOL: f64 = 1e-12;

/// A binary-input cq channel `x ↦ σₓ` together with its input distribution.
///
/// Channels handed to the combining operations normally have the uniform
/// prior. Tilting a channel with [`cq_channel_transform`] generally produces
/// a non-uniform one, which is kept here so that the transformed channel
/// reproduces the tilted state exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelJson", into = "ChannelJson")]
pub struct CQChannel {
    dim: usize,
    sigma: [HermitianMatrix; 2],
    prior: [f64; 2],
}

/// Wire format: `{"dim": d, "sigma0": [[re, im], ...], "sigma1": [...]}`
/// with row-major entries; `prior` is omitted when uniform.
#[derive(Serialize, Deserialize)]
struct ChannelJson {
    dim: usize,
    sigma0: Vec<[f64; 2]>,
    sigma1: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prior: Option<[f64; 2]>,
}

fn matrix_from_pairs(dim: usize, pairs: &[[f64; 2]]) -> Result<HermitianMatrix> {
    if pairs.len() != dim * dim {
        return Err(Error::Validation(format!(
            "expected {} complex entries for dimension {dim}, got {}",
            dim * dim,
            pairs.len()
        )));
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        let [re, im] = pairs[i * dim + j];
        C64::new(re, im)
    });
    HermitianMatrix::new(m)
}

fn matrix_to_pairs(m: &HermitianMatrix) -> Vec<[f64; 2]> {
    let d = m.dim();
    (0..d * d)
        .map(|k| {
            let z = m.get(k / d, k % d);
            [z.re, z.im]
        })
        .collect()
}

impl TryFrom<ChannelJson> for CQChannel {
    type Error = Error;

    fn try_from(raw: ChannelJson) -> Result<Self> {
        let s0 = matrix_from_pairs(raw.dim, &raw.sigma0)?;
        let s1 = matrix_from_pairs(raw.dim, &raw.sigma1)?;
        CQChannel::with_prior(s0, s1, raw.prior.unwrap_or([0.5, 0.5]))
    }
}

impl From<CQChannel> for ChannelJson {
    fn from(w: CQChannel) -> Self {
        ChannelJson {
            dim: w.dim,
            sigma0: matrix_to_pairs(&w.sigma[0]),
            sigma1: matrix_to_pairs(&w.sigma[1]),
            prior: (!w.has_uniform_prior()).then_some(w.prior),
        }
    }
}

fn check_density(m: &HermitianMatrix, which: &str) -> Result<()> {
    if (m.trace() - 1.0).abs() > CHANNEL_TOL {
        return Err(Error::Validation(format!(
            "{which} has trace {}, expected 1",
            m.trace()
        )));
    }
    m.psd_eig().map(|_| ())
}

impl CQChannel {
    /// Uniform-prior channel.
    pub fn new(sigma0: HermitianMatrix, sigma1: HermitianMatrix) -> Result<Self> {
        Self::with_prior(sigma0, sigma1, [0.5, 0.5])
    }

    pub fn with_prior(
        sigma0: HermitianMatrix,
        sigma1: HermitianMatrix,
        prior: [f64; 2],
    ) -> Result<Self> {
        if sigma0.dim() != sigma1.dim() {
            return Err(Error::Validation(format!(
                "output states have different dimensions {} and {}",
                sigma0.dim(),
                sigma1.dim()
            )));
        }
        check_density(&sigma0, "sigma0")?;
        check_density(&sigma1, "sigma1")?;
        if prior.iter().any(|p| !(0.0..=1.0).contains(p))
            || (prior[0] + prior[1] - 1.0).abs() > CHANNEL_TOL
        {
            return Err(Error::Validation(format!("invalid input prior {prior:?}")));
        }
        Ok(CQChannel {
            dim: sigma0.dim(),
            sigma: [sigma0, sigma1],
            prior,
        })
    }

    /// Diagonal embedding of a classical channel; the prior is `p(x)`.
    pub fn from_joint(p: &JointDistribution) -> Result<Self> {
        if p.x_arity() != 2 {
            return Err(Error::Validation("cq channels have binary input".into()));
        }
        let px = p.marginal_x();
        let ny = p.y_arity();
        let sigma = |x: usize| {
            let diag: Vec<f64> = if px[x] > 0.0 {
                (0..ny).map(|y| p.get(x, y) / px[x]).collect()
            } else {
                vec![1.0 / ny as f64; ny]
            };
            HermitianMatrix::from_real_diagonal(&diag)
        };
        Self::with_prior(sigma(0)?, sigma(1)?, [px[0], px[1]])
    }

    pub fn bsc(p: f64) -> Result<Self> {
        Self::from_joint(&JointDistribution::bsc(p)?)
    }

    pub fn bec(eps: f64) -> Result<Self> {
        Self::from_joint(&JointDistribution::bec(eps)?)
    }

    /// Pure-state channel with overlap `f = |⟨ψ₀|ψ₁⟩|`, realized as
    /// `ψ₀,₁ = (cos θ, ±sin θ)` with `cos 2θ = f`.
    pub fn psc(f: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Domain(format!("overlap {f} outside [0, 1]")));
        }
        Self::psc_from_angle(0.5 * f.acos())
    }

    /// Pure-state channel `ψ₀,₁ = (cos θ, ±sin θ)` for `θ ∈ [0, π/4]`, i.e.
    /// overlap `cos 2θ`. Keeps full precision for overlaps close to 1.
    pub fn psc_from_angle(theta: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_4).contains(&theta) {
            return Err(Error::Domain(format!("angle {theta} outside [0, pi/4]")));
        }
        let (c, s) = (theta.cos(), theta.sin());
        let psi = |sign: f64| DVector::from_vec(vec![C64::new(c, 0.0), C64::new(sign * s, 0.0)]);
        let project = |v: DVector<C64>| {
            let m = HermitianMatrix::outer(&v);
            let t = m.trace();
            m.scale(1.0 / t)
        };
        Self::new(project(psi(1.0)), project(psi(-1.0)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self, x: usize) -> &HermitianMatrix {
        &self.sigma[x]
    }

    pub fn prior(&self) -> [f64; 2] {
        self.prior
    }

    pub fn has_uniform_prior(&self) -> bool {
        self.prior == [0.5, 0.5]
    }

    /// `ρ_B = Σₓ p(x) σₓ`.
    pub fn output_state(&self) -> HermitianMatrix {
        self.sigma[0]
            .scale(self.prior[0])
            .add(&self.sigma[1].scale(self.prior[1]))
    }

    /// `ρ_XB = Σₓ p(x) |x⟩⟨x| ⊗ σₓ` with registers `X` and `B`.
    pub fn state(&self) -> HybridState {
        HybridState::new(
            vec![Register::new("X", 2)],
            vec![Register::new("B", self.dim)],
            (0..2).map(|x| (vec![x], self.prior[x], self.sigma[x].clone())),
        )
        .expect("a validated channel yields a valid state")
    }

    /// `H(X|B)` of the channel state.
    pub fn entropy(&self, kind: QEntropyKind, alpha: Alpha) -> Result<f64> {
        kind.evaluate(&self.state(), &["X"], alpha)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        let p = (self.prior[0] - other.prior[0]).abs();
        (0..2)
            .map(|x| self.sigma[x].max_abs_diff(&other.sigma[x]))
            .fold(p, f64::max)
    }
}

/// Tilted channel `σ̄ₓ ∝ (ρ_B^{(1−α)/2α} σₓ ρ_B^{(1−α)/2α})^α` with prior
/// `q(x) ∝ p(x)^α Tr(ρ_B^{(1−α)/2α} σₓ ρ_B^{(1−α)/2α})^α`, so that
/// `H̃↓_α(W) = H̄↑_{1/α}(W′)`.
pub fn cq_channel_transform(w: &CQChannel, alpha: Alpha) -> Result<CQChannel> {
    if alpha.is_one() {
        return Ok(w.clone());
    }
    let a = alpha.value();
    let outer = w.output_state().power_on_support((1.0 - a) / (2.0 * a))?;
    let mut sigma = Vec::with_capacity(2);
    let mut weights = [0.0; 2];
    for (x, weight) in weights.iter_mut().enumerate() {
        let tilted = outer.sandwich(w.sigma(x)).power_of_positive(a);
        let t = tilted.trace();
        if w.prior[x] > 0.0 && t > 0.0 {
            *weight = w.prior[x].powf(a) * t;
            sigma.push(tilted.scale(1.0 / t));
        } else {
            sigma.push(w.sigma(x).clone());
        }
    }
    let total = weights[0] + weights[1];
    let s1 = sigma.pop().expect("two outputs");
    let s0 = sigma.pop().expect("two outputs");
    CQChannel::with_prior(s0, s1, [weights[0] / total, weights[1] / total])
}

/// The state after a CNOT on the inputs of `W₁ ⊗ W₂`: classical registers
/// `Z = X₁ ⊕ X₂` and `X2`, quantum registers `B1`, `B2`. The block at
/// `(z, x₂)` is `σ¹_{z⊕x₂} ⊗ σ²_{x₂}` with weight `p₁(z⊕x₂) p₂(x₂)`.
pub fn combine_cq(w1: &CQChannel, w2: &CQChannel) -> Result<HybridState> {
    let mut blocks = Vec::with_capacity(4);
    for z in 0..2 {
        for x2 in 0..2 {
            let x1 = z ^ x2;
            blocks.push((
                vec![z, x2],
                w1.prior[x1] * w2.prior[x2],
                w1.sigma(x1).kron(w2.sigma(x2)),
            ));
        }
    }
    HybridState::new(
        vec![Register::new("Z", 2), Register::new("X2", 2)],
        vec![Register::new("B1", w1.dim), Register::new("B2", w2.dim)],
        blocks,
    )
}

/// Check-node entropy `H(X₁ + X₂ | B₁B₂)`.
pub fn check_entropy(
    w1: &CQChannel,
    w2: &CQChannel,
    kind: QEntropyKind,
    alpha: Alpha,
) -> Result<f64> {
    let tau = combine_cq(w1, w2)?.trace_out(&["X2"])?;
    kind.evaluate(&tau, &["Z"], alpha)
}

/// Variable-node entropy `H(X₂ | X₁ + X₂, B₁B₂)`.
pub fn variable_entropy(
    w1: &CQChannel,
    w2: &CQChannel,
    kind: QEntropyKind,
    alpha: Alpha,
) -> Result<f64> {
    kind.evaluate(&combine_cq(w1, w2)?, &["X2"], alpha)
}

/// Pretty good measurement `Mₓ = ρ_B^{-1/2} p(x) σₓ ρ_B^{-1/2}` (inverse on
/// the support of `ρ_B`).
pub fn pretty_good_measurement(w: &CQChannel) -> Result<[HermitianMatrix; 2]> {
    let inv_sqrt = w.output_state().power_on_support(-0.5)?;
    Ok([0, 1].map(|x| inv_sqrt.sandwich(&w.sigma(x).scale(w.prior[x]))))
}

/// Success probability `Σₓ p(x) Tr σₓ Mₓ` of the pretty good measurement.
pub fn pretty_good_guess(w: &CQChannel) -> Result<f64> {
    let m = pretty_good_measurement(w)?;
    Ok((0..2)
        .map(|x| w.prior[x] * w.sigma(x).trace_product(&m[x]))
        .sum())
}

/// Closed form of `H̃↓₂(X₁ + X₂ | B₁B₂)` in terms of the single-channel
/// values: `−ln[2(½ − e^{−h₁})(½ − e^{−h₂}) + ½]`.
pub fn prop8_alpha2_formula(h1: f64, h2: f64) -> Result<f64> {
    let h1 = clamp_binary_entropy(h1)?;
    let h2 = clamp_binary_entropy(h2)?;
    Ok(-(2.0 * (0.5 - (-h1).exp()) * (0.5 - (-h2).exp()) + 0.5).ln())
}

/// Closed form of `H̄↑_{1/2}(X₂ | X₁ + X₂, B₁B₂)`:
/// `ln(1 + (e^{h₁} − 1)(e^{h₂} − 1))`.
pub fn prop9_half_formula(h1: f64, h2: f64) -> Result<f64> {
    let h1 = clamp_binary_entropy(h1)?;
    let h2 = clamp_binary_entropy(h2)?;
    Ok((1.0 + (h1.exp() - 1.0) * (h2.exp() - 1.0)).ln())
}

/// Complementary channel built from the square-root purification
/// `|φₓ⟩ = (√σₓ ⊗ 1)|Ω⟩` on `B ⊗ R`:
/// `|φ̃⟩ = Σₓ √p(x) |x⟩_C |φₓ⟩_{BR}`, `θ_z = Tr_B (Z^z ⊗ 1)|φ̃⟩⟨φ̃|(Z^z ⊗ 1)`
/// on `C ⊗ R`, uniform prior. No self-test; see [`dual_channel`].
pub fn dual_channel_unverified(w: &CQChannel) -> Result<CQChannel> {
    let d = w.dim;
    let mut phi = DVector::<C64>::zeros(2 * d * d);
    for x in 0..2 {
        let root = w.sigma(x).power_on_support(0.5)?;
        let amp = w.prior[x].sqrt();
        for i in 0..d {
            for j in 0..d {
                phi[x * d * d + i * d + j] = root.get(i, j) * amp;
            }
        }
    }
    let theta0 = HermitianMatrix::outer(&phi).partial_trace_keep(&[2, d, d], &[0, 2])?;
    let mut phase = DMatrix::<C64>::identity(2 * d, 2 * d);
    for j in d..2 * d {
        phase[(j, j)] = C64::new(-1.0, 0.0);
    }
    let theta1 = theta0.conjugate_by(&phase);
    let norm = |m: HermitianMatrix| {
        let t = m.trace();
        m.scale(1.0 / t)
    };
    CQChannel::new(norm(theta0), norm(theta1))
}

/// Dual channel `W⊥` with `H̃↓_α(W) + H̄↑_{1/α}(W⊥) = ln 2`.
///
/// The construction is checked against that identity at α = 2 and α = 1/2;
/// a mismatch beyond [`DUALITY_SELF_TEST_TOL`] is a construction error.
pub fn dual_channel(w: &CQChannel) -> Result<CQChannel> {
    let dual = dual_channel_unverified(w)?;
    for a in [2.0, 0.5] {
        let alpha = Alpha::new(a)?;
        let lhs = tilde_down_entropy(&w.state(), &["X"], alpha)?;
        let rhs = bar_up_entropy(&dual.state(), &["X"], alpha.inverse())?;
        let gap = (lhs + rhs - LN_2).abs();
        if !(gap <= DUALITY_SELF_TEST_TOL) {
            return Err(Error::Construction(format!(
                "dual channel violates the entropy complement at alpha={a}: gap {gap:e}"
            )));
        }
    }
    Ok(dual)
}

/// Both sides of the symmetry relation
/// `H̃↓_α(W₁⊞W₂) − ½(H̃↓_α(W₁) + H̃↓_α(W₂))` evaluated for `(W₁, W₂)` and for
/// `W̄ᵢ = (Wᵢ′)⊥`, the duals of the tilted channels.
///
/// The chain tilt → dual → combine is evaluated in double-double precision:
/// at large orders the tilted states are numerically singular in f64.
pub fn symmetry_check(w1: &CQChannel, w2: &CQChannel, alpha: Alpha) -> Result<(f64, f64)> {
    let (p1, p2) = (PreciseChannel::from(w1), PreciseChannel::from(w2));
    let lhs = symmetry_gap(&p1, &p2, alpha);
    let b1 = p1.transform(alpha).dual();
    let b2 = p2.transform(alpha).dual();
    let rhs = symmetry_gap(&b1, &b2, alpha);
    if !(lhs.is_finite() && rhs.is_finite()) {
        return Err(Error::Construction(format!(
            "symmetry relation evaluated to non-finite values ({lhs}, {rhs})"
        )));
    }
    Ok((lhs, rhs))
}
