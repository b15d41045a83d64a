//! Classical joint distributions `p(x, y)` with binary (or small) `X`,
//! the Hayashi and Arimoto conditional Rényi entropies, the tilting
//! transform that maps one into the other, check/variable node combining and
//! the extremal-channel bound formulas.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    binary_renyi_unchecked, clamp_binary_entropy, inverse_binary_renyi, star, Alpha,
};

/// Tolerance on `Σ p(x, y) = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Finite joint distribution of `X` (rows) and side information `Y` (columns).
///
/// Serialized as `{"x_arity": .., "y_arity": .., "probs": [..]}` with `probs`
/// in row-major order, i.e. `probs[x * y_arity + y]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint")]
pub struct JointDistribution {
    x_arity: usize,
    y_arity: usize,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawJoint {
    x_arity: usize,
    y_arity: usize,
    probs: Vec<f64>,
}

impl TryFrom<RawJoint> for JointDistribution {
    type Error = Error;

    fn try_from(raw: RawJoint) -> Result<Self> {
        JointDistribution::new(raw.x_arity, raw.y_arity, raw.probs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyKind {
    Hayashi,
    Arimoto,
}

impl EntropyKind {
    pub const ALL: [EntropyKind; 2] = [EntropyKind::Hayashi, EntropyKind::Arimoto];

    pub fn evaluate(self, p: &JointDistribution, alpha: Alpha) -> f64 {
        match self {
            EntropyKind::Hayashi => hayashi_entropy(p, alpha),
            EntropyKind::Arimoto => arimoto_entropy(p, alpha),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            EntropyKind::Hayashi => "hayashi",
            EntropyKind::Arimoto => "arimoto",
        }
    }
}

impl JointDistribution {
    pub fn new(x_arity: usize, y_arity: usize, probs: Vec<f64>) -> Result<Self> {
        if x_arity == 0 || y_arity == 0 {
            return Err(Error::Validation("arities must be positive".into()));
        }
        if probs.len() != x_arity * y_arity {
            return Err(Error::Validation(format!(
                "expected {} probabilities for a {x_arity}x{y_arity} table, got {}",
                x_arity * y_arity,
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::Validation(format!("invalid probability {bad}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Validation(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(JointDistribution {
            x_arity,
            y_arity,
            probs,
        })
    }

    /// Normalizes a nonnegative weight table.
    pub fn from_weights(x_arity: usize, y_arity: usize, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Validation(format!(
                "cannot normalize weights with sum {total}"
            )));
        }
        Self::new(
            x_arity,
            y_arity,
            weights.into_iter().map(|w| w / total).collect(),
        )
    }

    /// Binary symmetric channel with uniform input: `(1−p)/2` on matches and
    /// `p/2` on mismatches, `y_arity = 2`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "flip probability {p} outside [0, 1]"
            )));
        }
        let (a, b) = ((1.0 - p) / 2.0, p / 2.0);
        Self::new(2, 2, vec![a, b, b, a])
    }

    /// Binary erasure channel with uniform input, erasure symbol at index 2.
    pub fn bec(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Domain(format!(
                "erasure probability {eps} outside [0, 1]"
            )));
        }
        let (a, e) = ((1.0 - eps) / 2.0, eps / 2.0);
        Self::new(2, 3, vec![a, 0.0, e, 0.0, a, e])
    }

    /// Uniform `X` independent of a single-symbol `Y`.
    pub fn useless() -> Self {
        JointDistribution {
            x_arity: 2,
            y_arity: 1,
            probs: vec![0.5, 0.5],
        }
    }

    pub fn x_arity(&self) -> usize {
        self.x_arity
    }

    pub fn y_arity(&self) -> usize {
        self.y_arity
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.y_arity + y]
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.x_arity)
            .map(|x| (0..self.y_arity).map(|y| self.get(x, y)).sum())
            .collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        (0..self.y_arity)
            .map(|y| (0..self.x_arity).map(|x| self.get(x, y)).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.x_arity != other.x_arity || self.y_arity != other.y_arity {
            return f64::INFINITY;
        }
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn require_binary(&self, what: &str) -> Result<()> {
        if self.x_arity != 2 {
            return Err(Error::Validation(format!(
                "{what} requires a binary input, got x_arity {}",
                self.x_arity
            )));
        }
        Ok(())
    }

    /// Iterates `(p(y), [p(x|y)])` over symbols with `p(y) > 0`.
    fn conditionals(&self) -> impl Iterator<Item = (f64, Vec<f64>)> + '_ {
        (0..self.y_arity).filter_map(move |y| {
            let py: f64 = (0..self.x_arity).map(|x| self.get(x, y)).sum();
            (py > 0.0).then(|| (py, (0..self.x_arity).map(|x| self.get(x, y) / py).collect()))
        })
    }
}

fn pow0(x: f64, a: f64) -> f64 {
    if x > 0.0 {
        x.powf(a)
    } else {
        0.0
    }
}

fn shannon_conditional(p: &JointDistribution) -> f64 {
    p.conditionals()
        .map(|(py, cond)| {
            py * cond
                .iter()
                .filter(|&&c| c > 0.0)
                .map(|c| -c * c.ln())
                .sum::<f64>()
        })
        .sum()
}

/// `H^H_α(X|Y) = ln(Σ_y p(y) Σ_x p(x|y)^α) / (1 − α)`.
pub fn hayashi_entropy(p: &JointDistribution, alpha: Alpha) -> f64 {
    if alpha.is_one() {
        return shannon_conditional(p);
    }
    let a = alpha.value();
    let sum: f64 = p
        .conditionals()
        .map(|(py, cond)| py * cond.iter().map(|&c| pow0(c, a)).sum::<f64>())
        .sum();
    sum.ln() / (1.0 - a)
}

/// `H^A_α(X|Y) = α/(1 − α) · ln Σ_y p(y) (Σ_x p(x|y)^α)^{1/α}`.
pub fn arimoto_entropy(p: &JointDistribution, alpha: Alpha) -> f64 {
    if alpha.is_one() {
        return shannon_conditional(p);
    }
    let a = alpha.value();
    let sum: f64 = p
        .conditionals()
        .map(|(py, cond)| py * cond.iter().map(|&c| pow0(c, a)).sum::<f64>().powf(1.0 / a))
        .sum();
    a / (1.0 - a) * sum.ln()
}

/// Tilts `p` into `p̄(x, y) ∝ p(x|y)^α p(y)`, which satisfies
/// `H^H_α(X|Y)_p = H^A_{1/α}(X|Y)_p̄`.
pub fn chain_rule_transform(p: &JointDistribution, alpha: Alpha) -> JointDistribution {
    let a = alpha.value();
    let py = p.marginal_y();
    let weights = (0..p.x_arity)
        .flat_map(|x| (0..p.y_arity).map(move |y| (x, y)))
        .map(|(x, y)| {
            if py[y] > 0.0 {
                pow0(p.get(x, y) / py[y], a) * py[y]
            } else {
                0.0
            }
        })
        .collect();
    JointDistribution::from_weights(p.x_arity, p.y_arity, weights)
        .expect("tilted weights of a valid distribution are normalizable")
}

/// Inverse of [`chain_rule_transform`]:
/// `p(x, y) ∝ p̄(x|y)^{1/α} p̄(y) (Σ_x p̄(x|y)^{1/α})^{α−1}`.
pub fn inverse_chain_rule_transform(pbar: &JointDistribution, alpha: Alpha) -> JointDistribution {
    let a = alpha.value();
    let py = pbar.marginal_y();
    let mut weights = vec![0.0; pbar.probs.len()];
    for y in 0..pbar.y_arity {
        if py[y] <= 0.0 {
            continue;
        }
        let root: Vec<f64> = (0..pbar.x_arity)
            .map(|x| pow0(pbar.get(x, y) / py[y], 1.0 / a))
            .collect();
        let norm = root.iter().sum::<f64>().powf(a - 1.0);
        for (x, r) in root.iter().enumerate() {
            weights[x * pbar.y_arity + y] = r * py[y] * norm;
        }
    }
    JointDistribution::from_weights(pbar.x_arity, pbar.y_arity, weights)
        .expect("inverse-tilted weights of a valid distribution are normalizable")
}

/// Check-node combining: the joint of `Z = X₁ ⊕ X₂` and `(Y₁, Y₂)` with
/// `X₂` marginalized. Composite symbol index is `y₁·|Y₂| + y₂`.
pub fn combine_check(p1: &JointDistribution, p2: &JointDistribution) -> Result<JointDistribution> {
    p1.require_binary("check combining")?;
    p2.require_binary("check combining")?;
    let (n1, n2) = (p1.y_arity, p2.y_arity);
    let mut probs = vec![0.0; 2 * n1 * n2];
    for z in 0..2 {
        for y1 in 0..n1 {
            for y2 in 0..n2 {
                probs[z * n1 * n2 + y1 * n2 + y2] =
                    (0..2).map(|x2| p1.get(z ^ x2, y1) * p2.get(x2, y2)).sum();
            }
        }
    }
    JointDistribution::from_weights(2, n1 * n2, probs)
}

/// Variable-node combining: the joint of `X₂` and `(Z, Y₁, Y₂)` with
/// composite index `z·|Y₁||Y₂| + y₁·|Y₂| + y₂`.
pub fn combine_variable(
    p1: &JointDistribution,
    p2: &JointDistribution,
) -> Result<JointDistribution> {
    p1.require_binary("variable combining")?;
    p2.require_binary("variable combining")?;
    let (n1, n2) = (p1.y_arity, p2.y_arity);
    let side = 2 * n1 * n2;
    let mut probs = vec![0.0; 2 * side];
    for x2 in 0..2 {
        for z in 0..2 {
            for y1 in 0..n1 {
                for y2 in 0..n2 {
                    probs[x2 * side + z * n1 * n2 + y1 * n2 + y2] =
                        p1.get(z ^ x2, y1) * p2.get(x2, y2);
                }
            }
        }
    }
    JointDistribution::from_weights(2, side, probs)
}

/// `h_α(h_α^{-1}(h₁) ⋆ h_α^{-1}(h₂))`: the check-node entropy of two binary
/// symmetric channels with entropies `h₁, h₂`.
pub fn bsc_bound_hayashi(h1: f64, h2: f64, alpha: Alpha) -> Result<f64> {
    let p1 = inverse_binary_renyi(h1, alpha)?;
    let p2 = inverse_binary_renyi(h2, alpha)?;
    Ok(binary_renyi_unchecked(star(p1, p2), alpha))
}

/// `K`-parameter of the check-node combination of two erasure channels:
/// `(δ − K₁)(δ − K₂)/(1 − δ) + δ`.
fn bec_bracket(k1: f64, k2: f64, delta: f64) -> f64 {
    (delta - k1) * (delta - k2) / (1.0 - delta) + delta
}

/// Check-node entropy of two binary erasure channels with entropies
/// `h₁, h₂`: `ln[(δ − K₁)(δ − K₂)/(1 − δ) + δ] / (1 − α)` with
/// `δ = 2^{1−α}` and `Kᵢ = e^{(1−α)hᵢ}`.
pub fn bec_bound_hayashi(h1: f64, h2: f64, alpha: Alpha) -> Result<f64> {
    let h1 = clamp_binary_entropy(h1)?;
    let h2 = clamp_binary_entropy(h2)?;
    if alpha.is_one() {
        // erasure probabilities εᵢ = hᵢ/ln 2 combine as 1 − (1−ε₁)(1−ε₂)
        return Ok(h1 + h2 - h1 * h2 / LN_2);
    }
    let a = alpha.value();
    let delta = 2f64.powf(1.0 - a);
    let k1 = ((1.0 - a) * h1).exp();
    let k2 = ((1.0 - a) * h2).exp();
    Ok(bec_bracket(k1, k2, delta).ln() / (1.0 - a))
}

/// BSC formula for the Arimoto variable-node entropy:
/// `h₁ + h₂ − h_{1/α}(h_{1/α}^{-1}(h₁) ⋆ h_{1/α}^{-1}(h₂))`.
pub fn bsc_bound_arimoto(h1: f64, h2: f64, alpha: Alpha) -> Result<f64> {
    let h1 = clamp_binary_entropy(h1)?;
    let h2 = clamp_binary_entropy(h2)?;
    Ok(h1 + h2 - bsc_bound_hayashi(h1, h2, alpha.inverse())?)
}

/// BEC formula for the Arimoto variable-node entropy:
/// `h₁ + h₂ − α/(α−1) · ln[(δ − K₁)(δ − K₂)/(1 − δ) + δ]` with
/// `δ = 2^{(α−1)/α}` and `Kᵢ = e^{((α−1)/α)hᵢ}`.
pub fn bec_bound_arimoto(h1: f64, h2: f64, alpha: Alpha) -> Result<f64> {
    let h1 = clamp_binary_entropy(h1)?;
    let h2 = clamp_binary_entropy(h2)?;
    Ok(h1 + h2 - bec_bound_hayashi(h1, h2, alpha.inverse())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    const H2_OF_0_1: f64 = 0.198_450_938_723_838_3; // -ln 0.82

    #[test]
    fn validation() {
        assert!(JointDistribution::new(2, 2, vec![0.5, 0.5, 0.1, -0.1]).is_err());
        assert!(JointDistribution::new(2, 2, vec![0.5, 0.5, 0.1]).is_err());
        assert!(JointDistribution::new(2, 1, vec![0.5, 0.6]).is_err());
        assert!(JointDistribution::bsc(1.5).is_err());
    }

    #[test]
    fn json_layout() {
        let p = JointDistribution::bsc(0.2).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"x_arity":2,"y_arity":2,"probs":[0.4,0.1,0.1,0.4]}"#);
        let back: JointDistribution = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"x_arity":2,"y_arity":1,"probs":[0.4,0.4]}"#;
        assert!(serde_json::from_str::<JointDistribution>(bad).is_err());
    }

    #[test]
    fn hayashi_examples() {
        let det = JointDistribution::new(2, 3, vec![0.2, 0.0, 0.3, 0.0, 0.5, 0.0]).unwrap();
        for al in [0.4, 1.0, 2.0] {
            assert!(hayashi_entropy(&det, a(al)).abs() < 1e-15);
        }
        let bec = JointDistribution::bec(0.5).unwrap();
        assert!((hayashi_entropy(&bec, a(2.0)) + 0.75f64.ln()).abs() < 1e-14);
        let bsc = JointDistribution::bsc(0.1).unwrap();
        assert!((hayashi_entropy(&bsc, a(2.0)) - H2_OF_0_1).abs() < 1e-14);
    }

    #[test]
    fn arimoto_examples() {
        let indep = JointDistribution::new(2, 3, vec![0.1, 0.3, 0.1, 0.1, 0.3, 0.1]).unwrap();
        assert!((arimoto_entropy(&indep, a(2.0)) - LN_2).abs() < 1e-14);
        let bec = JointDistribution::bec(0.5).unwrap();
        let want = -2.0 * (0.5 + 0.5 * 2f64.powf(-0.5)).ln();
        assert!((arimoto_entropy(&bec, a(2.0)) - want).abs() < 1e-14);
        assert!((want - 0.316_694).abs() < 1e-6);
        let bsc = JointDistribution::bsc(0.1).unwrap();
        assert!((arimoto_entropy(&bsc, a(2.0)) - H2_OF_0_1).abs() < 1e-14);
    }

    #[test]
    fn transform_examples() {
        let bsc = JointDistribution::bsc(0.1).unwrap();
        assert!(chain_rule_transform(&bsc, a(1.0)).max_abs_diff(&bsc) < 1e-15);
        let t = chain_rule_transform(&bsc, a(2.0));
        let want = JointDistribution::bsc(0.01 / 0.82).unwrap();
        assert!(t.max_abs_diff(&want) < 1e-15);
        let back = inverse_chain_rule_transform(&t, a(2.0));
        assert!(back.max_abs_diff(&bsc) < 1e-14);

        let det = JointDistribution::new(2, 2, vec![0.3, 0.0, 0.0, 0.7]).unwrap();
        assert!(chain_rule_transform(&det, a(3.0)).max_abs_diff(&det) < 1e-15);
    }

    #[test]
    fn combine_check_examples() {
        let c = combine_check(
            &JointDistribution::bsc(0.1).unwrap(),
            &JointDistribution::bsc(0.2).unwrap(),
        )
        .unwrap();
        let want = JointDistribution::bsc(0.26).unwrap();
        for al in [0.5, 1.0, 2.0] {
            assert!((hayashi_entropy(&c, a(al)) - hayashi_entropy(&want, a(al))).abs() < 1e-14);
        }
        let c = combine_check(
            &JointDistribution::bec(0.3).unwrap(),
            &JointDistribution::bec(0.6).unwrap(),
        )
        .unwrap();
        let want = JointDistribution::bec(0.72).unwrap();
        for al in [0.5, 2.0] {
            assert!((arimoto_entropy(&c, a(al)) - arimoto_entropy(&want, a(al))).abs() < 1e-14);
        }
        let w = JointDistribution::bsc(0.15).unwrap();
        let c = combine_check(&w, &JointDistribution::bsc(0.0).unwrap()).unwrap();
        assert!((hayashi_entropy(&c, a(1.7)) - hayashi_entropy(&w, a(1.7))).abs() < 1e-14);
    }

    #[test]
    fn combine_variable_examples() {
        let v = combine_variable(
            &JointDistribution::bec(0.3).unwrap(),
            &JointDistribution::bec(0.6).unwrap(),
        )
        .unwrap();
        let want = JointDistribution::bec(0.18).unwrap();
        for al in [0.5, 1.0, 2.0] {
            assert!((hayashi_entropy(&v, a(al)) - hayashi_entropy(&want, a(al))).abs() < 1e-14);
            assert!((arimoto_entropy(&v, a(al)) - arimoto_entropy(&want, a(al))).abs() < 1e-14);
        }
        let w = JointDistribution::bsc(0.15).unwrap();
        let v = combine_variable(&w, &JointDistribution::bsc(0.0).unwrap()).unwrap();
        assert!(hayashi_entropy(&v, a(2.0)).abs() < 1e-15);
        let u = JointDistribution::useless();
        let v = combine_variable(&u, &u).unwrap();
        assert!((arimoto_entropy(&v, a(3.0)) - LN_2).abs() < 1e-14);
    }

    #[test]
    fn combine_requires_binary() {
        let p = JointDistribution::from_weights(3, 1, vec![1.0, 1.0, 1.0]).unwrap();
        assert!(combine_check(&p, &p).is_err());
        assert!(combine_variable(&p, &p).is_err());
    }

    #[test]
    fn bsc_bound_examples() {
        assert!((bsc_bound_hayashi(0.0, 0.3, a(1.5)).unwrap() - 0.3).abs() < 1e-12);
        assert!((bsc_bound_hayashi(LN_2, LN_2, a(1.5)).unwrap() - LN_2).abs() < 1e-15);
        let v = bsc_bound_hayashi(H2_OF_0_1, H2_OF_0_1, a(2.0)).unwrap();
        assert!((v + 0.7048f64.ln()).abs() < 1e-12);
        assert!(bsc_bound_hayashi(0.8, 0.1, a(2.0)).is_err());
    }

    #[test]
    fn bec_bound_examples() {
        for al in [0.4, 1.0, 2.0, 4.0] {
            assert!((bec_bound_hayashi(0.0, 0.4, a(al)).unwrap() - 0.4).abs() < 1e-14);
            assert!((bec_bound_hayashi(LN_2, LN_2, a(al)).unwrap() - LN_2).abs() < 1e-14);
        }
        let h = -(0.75f64.ln());
        let v = bec_bound_hayashi(h, h, a(2.0)).unwrap();
        assert!((v + 0.625f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn arimoto_bound_examples() {
        for al in [0.3, 1.0, 2.0] {
            assert!(bsc_bound_arimoto(0.0, 0.4, a(al)).unwrap().abs() < 1e-12);
            assert!((bsc_bound_arimoto(0.3, LN_2, a(al)).unwrap() - 0.3).abs() < 1e-12);
            assert!(bec_bound_arimoto(0.0, 0.4, a(al)).unwrap().abs() < 1e-14);
            assert!((bec_bound_arimoto(LN_2, LN_2, a(al)).unwrap() - LN_2).abs() < 1e-14);
        }
        let (w1, w2) = (
            JointDistribution::bec(0.3).unwrap(),
            JointDistribution::bec(0.6).unwrap(),
        );
        let al = a(2.0);
        let exact = arimoto_entropy(&combine_variable(&w1, &w2).unwrap(), al);
        let bound =
            bec_bound_arimoto(arimoto_entropy(&w1, al), arimoto_entropy(&w2, al), al).unwrap();
        assert!((exact - bound).abs() < 1e-12);
        let direct = arimoto_entropy(&JointDistribution::bec(0.18).unwrap(), al);
        assert!((exact - direct).abs() < 1e-14);
    }
}
