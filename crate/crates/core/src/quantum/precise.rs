//! Double-double evaluation of the channel pipeline behind the symmetry
//! relation: tilting, dualizing and check-node combining.
//!
//! At large orders the tilted channel has eigenvalues far below f64
//! resolution, and its dual inherits them as tiny but decisive eigenvalues.
//! Carrying about 32 digits keeps the relation accurate to well below 1e-9.

use super::channel::CQChannel;
use crate::numerics::extended::{Dd, DdMatrix, Zd};
use crate::numerics::Alpha;

#[derive(Clone, Debug)]
pub(crate) struct PreciseChannel {
    sigma: [DdMatrix; 2],
    prior: [Dd; 2],
}

impl From<&CQChannel> for PreciseChannel {
    fn from(w: &CQChannel) -> Self {
        let p = w.prior();
        PreciseChannel {
            sigma: [0, 1].map(|x| DdMatrix::from_hermitian(w.sigma(x))),
            prior: p.map(Dd::from),
        }
    }
}

/// Conditional entropy `H(X|B)` of `Σₓ |x⟩⟨x| ⊗ Mₓ` for unnormalized blocks.
fn tilde_down_blocks(blocks: &[DdMatrix], alpha: Alpha) -> Dd {
    let rho = blocks[1..]
        .iter()
        .fold(blocks[0].clone(), |acc, b| acc.add(b));
    if alpha.is_one() {
        let entropy = |m: &DdMatrix| {
            let (values, _) = m.eigh();
            let max = values
                .iter()
                .fold(Dd::ZERO, |a, &v| if v > a { v } else { a });
            values
                .iter()
                .filter(|&&v| v > max * 1e-28)
                .fold(Dd::ZERO, |acc, &v| acc - v * v.ln())
        };
        return blocks
            .iter()
            .fold(-entropy(&rho), |acc, b| acc + entropy(b));
    }
    let a = Dd::from(alpha.value());
    let one_minus = Dd::ONE - a;
    let outer = rho.power_on_support(one_minus / (a * 2.0));
    let total = blocks
        .iter()
        .fold(Dd::ZERO, |acc, b| acc + outer.sandwich(b).trace_power(a));
    total.ln() / one_minus
}

impl PreciseChannel {
    fn blocks(&self) -> Vec<DdMatrix> {
        (0..2).map(|x| self.sigma[x].scale(self.prior[x])).collect()
    }

    pub(crate) fn tilde_down(&self, alpha: Alpha) -> Dd {
        tilde_down_blocks(&self.blocks(), alpha)
    }

    /// Tilted channel, as in `cq_channel_transform`.
    pub(crate) fn transform(&self, alpha: Alpha) -> Self {
        if alpha.is_one() {
            return self.clone();
        }
        let a = Dd::from(alpha.value());
        let rho = self
            .blocks()
            .iter()
            .fold(DdMatrix::zeros(self.dim()), |acc, b| acc.add(b));
        let outer = rho.power_on_support((Dd::ONE - a) / (a * 2.0));
        let mut sigma = self.sigma.clone();
        let mut weights = [Dd::ZERO; 2];
        for x in 0..2 {
            let tilted = outer.sandwich(&self.sigma[x]).power_on_support(a);
            let t = tilted.trace();
            if self.prior[x].to_f64() > 0.0 && t.to_f64() > 0.0 {
                weights[x] = self.prior[x].powf(a) * t;
                sigma[x] = tilted.scale(Dd::ONE / t);
            }
        }
        let total = weights[0] + weights[1];
        PreciseChannel {
            sigma,
            prior: weights.map(|w| w / total),
        }
    }

    /// Dual channel, as in `dual_channel_unverified`.
    pub(crate) fn dual(&self) -> Self {
        let d = self.dim();
        let roots: Vec<DdMatrix> = (0..2)
            .map(|x| {
                self.sigma[x]
                    .power_on_support(Dd::from(0.5))
                    .scale(self.prior[x].sqrt())
            })
            .collect();
        // θ₀[(x,j),(x',j')] = Σ_b φ_x[b,j] conj(φ_x'[b,j'])
        let theta0 = DdMatrix::from_fn(2 * d, |r, c| {
            let (x, j) = (r / d, r % d);
            let (x2, j2) = (c / d, c % d);
            (0..d).fold(Zd::ZERO, |acc, b| {
                acc + roots[x][(b, j)] * roots[x2][(b, j2)].conj()
            })
        });
        let theta1 = DdMatrix::from_fn(2 * d, |r, c| {
            let z = theta0[(r, c)];
            if (r < d) == (c < d) {
                z
            } else {
                Zd::ZERO - z
            }
        });
        let t = theta0.trace();
        PreciseChannel {
            sigma: [theta0.scale(Dd::ONE / t), theta1.scale(Dd::ONE / t)],
            prior: [Dd::from(0.5); 2],
        }
    }

    fn dim(&self) -> usize {
        self.sigma[0].dim()
    }
}

/// `H̃↓_α(X₁ + X₂ | B₁B₂)` of the CNOT-combined pair.
pub(crate) fn check_tilde_down(w1: &PreciseChannel, w2: &PreciseChannel, alpha: Alpha) -> Dd {
    let blocks: Vec<DdMatrix> = (0..2)
        .map(|z| {
            let term = |x2: usize| {
                let x1 = z ^ x2;
                w1.sigma[x1]
                    .kron(&w2.sigma[x2])
                    .scale(w1.prior[x1] * w2.prior[x2])
            };
            term(0).add(&term(1))
        })
        .collect();
    tilde_down_blocks(&blocks, alpha)
}

/// `H̃↓_α(W₁⊞W₂) − ½(H̃↓_α(W₁) + H̃↓_α(W₂))`.
pub(crate) fn symmetry_gap(w1: &PreciseChannel, w2: &PreciseChannel, alpha: Alpha) -> f64 {
    let own = (w1.tilde_down(alpha) + w2.tilde_down(alpha)) * 0.5;
    (check_tilde_down(w1, w2, alpha) - own).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::HermitianMatrix;
    use crate::numerics::C64;
    use crate::quantum::{check_entropy, cq_channel_transform, dual_channel, QEntropyKind};
    use nalgebra::DMatrix;

    fn channel() -> CQChannel {
        let s0 = HermitianMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.6, 0.0),
                C64::new(0.1, 0.2),
                C64::new(0.1, -0.2),
                C64::new(0.4, 0.0),
            ],
        ))
        .unwrap();
        let s1 = HermitianMatrix::from_real_diagonal(&[0.2, 0.8]).unwrap();
        CQChannel::new(s0, s1).unwrap()
    }

    #[test]
    fn agrees_with_f64_pipeline_at_moderate_order() {
        let w = channel();
        let v = CQChannel::psc(0.4).unwrap();
        for a in [0.7, 1.0, 1.3] {
            let alpha = Alpha::new(a).unwrap();
            let kind = QEntropyKind::TildeDown;
            let (pw, pv) = (PreciseChannel::from(&w), PreciseChannel::from(&v));
            let got = check_tilde_down(&pw, &pv, alpha).to_f64();
            assert!((got - check_entropy(&w, &v, kind, alpha).unwrap()).abs() < 1e-13);

            let dual = dual_channel(&cq_channel_transform(&w, alpha).unwrap()).unwrap();
            let got = pw.transform(alpha).dual().tilde_down(alpha).to_f64();
            assert!(
                (got - dual.entropy(kind, alpha).unwrap()).abs() < 1e-12,
                "α={a}"
            );
        }
    }
}
