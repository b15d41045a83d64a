//! Conditional Rényi entropies of hybrid classical-quantum states.
//!
//! With `A` the target registers and `B` all others:
//!
//! * `H̃↓_α(A|B) = 1/(1−α) ln Tr(ρ_B^{(1−α)/2α} ρ_AB ρ_B^{(1−α)/2α})^α`
//! * `H̄↑_α(A|B) = α/(1−α) ln Tr(Tr_A ρ_AB^α)^{1/α}`
//! * `H̄↓_α(A|B) = 1/(1−α) ln Tr(ρ_AB^α ρ_B^{1−α})`
//!
//! The state is block diagonal over classical outcomes and `ρ_B` is block
//! diagonal over the classical outcomes of `B`, so every trace splits into a
//! sum over blocks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::state::{Block, HybridState, RegisterRef};
use crate::error::{Error, Result};
use crate::numerics::{Alpha, HermitianMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QEntropyKind {
    /// Sandwiched entropy with the marginal `ρ_B` as conditioning state.
    TildeDown,
    /// Petz-type entropy optimized over the conditioning state.
    BarUp,
    /// Petz-type entropy with the marginal `ρ_B` as conditioning state.
    BarDown,
}

impl QEntropyKind {
    pub const ALL: [QEntropyKind; 3] = [
        QEntropyKind::TildeDown,
        QEntropyKind::BarUp,
        QEntropyKind::BarDown,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            QEntropyKind::TildeDown => "tilde_down",
            QEntropyKind::BarUp => "bar_up",
            QEntropyKind::BarDown => "bar_down",
        }
    }

    pub fn evaluate(self, state: &HybridState, target: &[&str], alpha: Alpha) -> Result<f64> {
        match self {
            QEntropyKind::TildeDown => tilde_down_entropy(state, target, alpha),
            QEntropyKind::BarUp => bar_up_entropy(state, target, alpha),
            QEntropyKind::BarDown => bar_down_entropy(state, target, alpha),
        }
    }
}

impl fmt::Display for QEntropyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for QEntropyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tilde_down" => Ok(QEntropyKind::TildeDown),
            "bar_up" => Ok(QEntropyKind::BarUp),
            "bar_down" => Ok(QEntropyKind::BarDown),
            other => Err(Error::Parse(format!(
                "unknown quantum entropy kind `{other}`"
            ))),
        }
    }
}

/// Target/conditioning split of a state's registers, with blocks grouped by
/// the classical outcome of the conditioning side.
struct Split<'a> {
    dims: Vec<usize>,
    /// Quantum factors of the target.
    qa: Vec<usize>,
    /// Quantum factors of the conditioning side.
    qb: Vec<usize>,
    groups: BTreeMap<Vec<usize>, Vec<&'a Block>>,
}

impl<'a> Split<'a> {
    fn new(state: &'a HybridState, target: &[&str]) -> Result<Self> {
        if target.is_empty() {
            return Err(Error::Validation(
                "entropy target must name a register".into(),
            ));
        }
        let mut in_target_c = vec![false; state.classical_registers().len()];
        let mut in_target_q = vec![false; state.quantum_registers().len()];
        for name in target {
            match state.locate(name)? {
                RegisterRef::Classical(i) => in_target_c[i] = true,
                RegisterRef::Quantum(i) => in_target_q[i] = true,
            }
        }
        let cb: Vec<usize> = (0..in_target_c.len())
            .filter(|&i| !in_target_c[i])
            .collect();
        let qa = (0..in_target_q.len()).filter(|&i| in_target_q[i]).collect();
        let qb = (0..in_target_q.len())
            .filter(|&i| !in_target_q[i])
            .collect();
        let mut groups: BTreeMap<Vec<usize>, Vec<&Block>> = BTreeMap::new();
        for (key, block) in state.blocks() {
            let k = cb.iter().map(|&i| key[i]).collect();
            groups.entry(k).or_default().push(block);
        }
        Ok(Split {
            dims: state.quantum_dims(),
            qa,
            qb,
            groups,
        })
    }

    /// `Tr_{qa} M` as an operator on the conditioning quantum factors.
    fn reduce(&self, m: &HermitianMatrix) -> Result<HermitianMatrix> {
        if self.qa.is_empty() {
            return Ok(m.clone());
        }
        m.partial_trace_keep(&self.dims, &self.qb)
    }

    /// Lifts an operator on the conditioning factors to the full quantum space.
    fn lift(&self, op: &HermitianMatrix) -> Result<HermitianMatrix> {
        if self.qa.is_empty() {
            return Ok(op.clone());
        }
        op.embed(&self.dims, &self.qb)
    }

    /// Unnormalized conditioning block `R = Σ w Tr_{qa} M` of one group.
    fn marginal(&self, blocks: &[&Block]) -> Result<HermitianMatrix> {
        let mut acc: Option<HermitianMatrix> = None;
        for b in blocks {
            let r = self.reduce(&b.matrix)?.scale(b.weight);
            acc = Some(match acc {
                Some(a) => a.add(&r),
                None => r,
            });
        }
        acc.ok_or_else(|| Error::Validation("empty block group".into()))
    }
}

/// von Neumann conditional entropy `H(AB) − H(B)`, the α → 1 limit of all
/// three families.
fn von_neumann_conditional(split: &Split<'_>) -> Result<f64> {
    let mut h = 0.0;
    for blocks in split.groups.values() {
        for b in blocks {
            h += -b.weight * b.weight.ln() + b.weight * b.matrix.entropy_term()?;
        }
        h -= split.marginal(blocks)?.entropy_term()?;
    }
    Ok(h)
}

pub fn tilde_down_entropy(state: &HybridState, target: &[&str], alpha: Alpha) -> Result<f64> {
    let split = Split::new(state, target)?;
    if alpha.is_one() {
        return von_neumann_conditional(&split);
    }
    let a = alpha.value();
    let s = (1.0 - a) / (2.0 * a);
    let mut total = 0.0;
    for blocks in split.groups.values() {
        let outer = split.lift(&split.marginal(blocks)?.power_on_support(s)?)?;
        for b in blocks {
            total += b.weight.powf(a) * outer.sandwich(&b.matrix).trace_power_of_positive(a);
        }
    }
    Ok(total.ln() / (1.0 - a))
}

pub fn bar_up_entropy(state: &HybridState, target: &[&str], alpha: Alpha) -> Result<f64> {
    let split = Split::new(state, target)?;
    if alpha.is_one() {
        return von_neumann_conditional(&split);
    }
    let a = alpha.value();
    let mut total = 0.0;
    for blocks in split.groups.values() {
        let mut acc: Option<HermitianMatrix> = None;
        for b in blocks {
            let r = split
                .reduce(&b.matrix.power_on_support(a)?)?
                .scale(b.weight.powf(a));
            acc = Some(match acc {
                Some(x) => x.add(&r),
                None => r,
            });
        }
        if let Some(m) = acc {
            total += m.trace_power_of_positive(1.0 / a);
        }
    }
    Ok(a / (1.0 - a) * total.ln())
}

pub fn bar_down_entropy(state: &HybridState, target: &[&str], alpha: Alpha) -> Result<f64> {
    let split = Split::new(state, target)?;
    if alpha.is_one() {
        return von_neumann_conditional(&split);
    }
    let a = alpha.value();
    let mut total = 0.0;
    for blocks in split.groups.values() {
        let cond = split.lift(&split.marginal(blocks)?.power_on_support(1.0 - a)?)?;
        for b in blocks {
            total += b.weight.powf(a) * b.matrix.power_on_support(a)?.trace_product(&cond);
        }
    }
    Ok(total.ln() / (1.0 - a))
}

/// `ρ̄ ∝ (ρ_C^{(1−α)/2α} ρ ρ_C^{(1−α)/2α})^α` with `C` the `conditioning`
/// registers. Satisfies `H̃↓_α(A|C)_ρ = H̄↑_{1/α}(A|C)_ρ̄` and, for three
/// parties, `H̃↓_α(AB|C)_ρ = H̄↑_{1/α}(A|BC)_ρ̄ + H̃↓_α(B|C)_ρ`.
pub fn quantum_chain_transform(
    state: &HybridState,
    conditioning: &[&str],
    alpha: Alpha,
) -> Result<HybridState> {
    if alpha.is_one() {
        return Ok(state.clone());
    }
    let mut target: Vec<&str> = Vec::new();
    for r in state
        .classical_registers()
        .iter()
        .chain(state.quantum_registers())
    {
        if !conditioning.contains(&r.name.as_str()) {
            target.push(r.name.as_str());
        }
    }
    for name in conditioning {
        state.locate(name)?;
    }
    let a = alpha.value();
    let s = (1.0 - a) / (2.0 * a);

    // Re-split with keys so the output keeps the original classical outcomes.
    let split = Split::new(state, &target)?;
    let mut outers = Vec::with_capacity(split.groups.len());
    for blocks in split.groups.values() {
        outers.push(split.lift(&split.marginal(blocks)?.power_on_support(s)?)?);
    }
    let cb: Vec<usize> = state
        .classical_registers()
        .iter()
        .enumerate()
        .filter(|(_, r)| conditioning.contains(&r.name.as_str()))
        .map(|(i, _)| i)
        .collect();
    let group_index: BTreeMap<&Vec<usize>, usize> = split
        .groups
        .keys()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();

    let mut out = Vec::new();
    for (key, b) in state.blocks() {
        let ck: Vec<usize> = cb.iter().map(|&i| key[i]).collect();
        let outer = &outers[group_index[&ck]];
        let tilted = outer
            .sandwich(&b.matrix)
            .power_of_positive(a)
            .scale(b.weight.powf(a));
        out.push((key.clone(), tilted));
    }
    HybridState::from_unnormalized(
        state.classical_registers().to_vec(),
        state.quantum_registers().to_vec(),
        out,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{arimoto_entropy, hayashi_entropy, JointDistribution};
    use crate::quantum::state::Register;
    use std::f64::consts::LN_2;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    #[test]
    fn classical_reduction_examples() {
        let bsc = JointDistribution::bsc(0.1).unwrap();
        let s = HybridState::from_joint(&bsc).unwrap();
        let h = tilde_down_entropy(&s, &["X"], a(2.0)).unwrap();
        assert!((h - hayashi_entropy(&bsc, a(2.0))).abs() < 1e-14);

        let bec = JointDistribution::bec(0.5).unwrap();
        let s = HybridState::from_joint(&bec).unwrap();
        let h = bar_up_entropy(&s, &["X"], a(2.0)).unwrap();
        assert!((h - arimoto_entropy(&bec, a(2.0))).abs() < 1e-14);
    }

    #[test]
    fn bar_down_diagonal_reduction() {
        let p = JointDistribution::new(2, 3, vec![0.1, 0.25, 0.05, 0.3, 0.1, 0.2]).unwrap();
        let s = HybridState::from_joint(&p).unwrap();
        let py = p.marginal_y();
        for al in [0.5, 1.7, 3.0] {
            let want = (0..3)
                .map(|y| py[y].powf(1.0 - al) * (0..2).map(|x| p.get(x, y).powf(al)).sum::<f64>())
                .sum::<f64>()
                .ln()
                / (1.0 - al);
            let got = bar_down_entropy(&s, &["X"], a(al)).unwrap();
            assert!((got - want).abs() < 1e-13, "α={al}: {got} vs {want}");
        }
    }

    #[test]
    fn alpha_one_is_von_neumann() {
        let p = JointDistribution::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let s = HybridState::from_joint(&p).unwrap();
        let shannon = hayashi_entropy(&p, a(1.0));
        for kind in QEntropyKind::ALL {
            let h = kind.evaluate(&s, &["X"], a(1.0)).unwrap();
            assert!((h - shannon).abs() < 1e-14);
            let near = kind.evaluate(&s, &["X"], a(1.0 + 1e-5)).unwrap();
            assert!((near - shannon).abs() < 1e-4);
        }
    }

    #[test]
    fn uninformative_side_information() {
        let sigma = HermitianMatrix::from_real_diagonal(&[0.3, 0.7]).unwrap();
        let s = HybridState::new(
            vec![Register::new("X", 2)],
            vec![Register::new("B", 2)],
            [(vec![0], 0.5, sigma.clone()), (vec![1], 0.5, sigma)],
        )
        .unwrap();
        for kind in QEntropyKind::ALL {
            for al in [0.5, 2.0] {
                assert!((kind.evaluate(&s, &["X"], a(al)).unwrap() - LN_2).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn unconditional_entropy_of_quantum_register() {
        let rho = HermitianMatrix::from_real_diagonal(&[0.2, 0.8]).unwrap();
        let s = HybridState::quantum_only(vec![Register::new("A", 2)], rho).unwrap();
        let want = (0.2f64.powi(2) + 0.8f64.powi(2)).ln() / (1.0 - 2.0);
        for kind in QEntropyKind::ALL {
            assert!((kind.evaluate(&s, &["A"], a(2.0)).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn parse_kinds() {
        for kind in QEntropyKind::ALL {
            assert_eq!(kind.tag().parse::<QEntropyKind>().unwrap(), kind);
        }
        assert!("hayashi".parse::<QEntropyKind>().is_err());
    }
}
