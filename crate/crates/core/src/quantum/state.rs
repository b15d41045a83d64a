use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classical::JointDistribution;
use crate::error::{Error, Result};
use crate::numerics::HermitianMatrix;

/// Tolerance on block weights summing to one and on block traces.
pub const STATE_TOL: f64 = 1e-12;

/// A named register with its arity (classical) or Hilbert-space dimension
/// (quantum).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub size: usize,
}

impl Register {
    pub fn new(name: impl Into<String>, size: usize) -> Self {
        Register {
            name: name.into(),
            size,
        }
    }
}

/// One classical outcome's contribution: `weight · matrix` with `Tr matrix = 1`.
#[derive(Clone, Debug)]
pub struct Block {
    pub weight: f64,
    pub matrix: HermitianMatrix,
}

/// A state that is classical on some registers and quantum on the rest,
/// stored as `⊕_c weight_c |c⟩⟨c| ⊗ matrix_c` over classical outcome tuples.
/// The quantum matrices live on the tensor product of the quantum registers
/// in declaration order.
#[derive(Clone, Debug)]
pub struct HybridState {
    classical: Vec<Register>,
    quantum: Vec<Register>,
    blocks: BTreeMap<Vec<usize>, Block>,
}

/// Location of a register inside a [`HybridState`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegisterRef {
    Classical(usize),
    Quantum(usize),
}

impl HybridState {
    /// Builds a validated state. Zero-weight blocks are dropped.
    pub fn new(
        classical: Vec<Register>,
        quantum: Vec<Register>,
        blocks: impl IntoIterator<Item = (Vec<usize>, f64, HermitianMatrix)>,
    ) -> Result<Self> {
        let mut state = Self::empty(classical, quantum)?;
        let mut total = 0.0;
        for (key, weight, matrix) in blocks {
            state.check_key(&key)?;
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::Validation(format!("invalid block weight {weight}")));
            }
            if matrix.dim() != state.quantum_dim() {
                return Err(Error::Validation(format!(
                    "block matrix has dimension {}, expected {}",
                    matrix.dim(),
                    state.quantum_dim()
                )));
            }
            if (matrix.trace() - 1.0).abs() > STATE_TOL {
                return Err(Error::Validation(format!(
                    "block matrix has trace {}, expected 1",
                    matrix.trace()
                )));
            }
            matrix.psd_eig()?;
            total += weight;
            if weight == 0.0 {
                continue;
            }
            if state
                .blocks
                .insert(key.clone(), Block { weight, matrix })
                .is_some()
            {
                return Err(Error::Validation(format!(
                    "duplicate classical outcome {key:?}"
                )));
            }
        }
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::Validation(format!(
                "block weights sum to {total}, not 1"
            )));
        }
        Ok(state)
    }

    /// Builds a state from unnormalized PSD blocks `w_c · M_c`, normalizing
    /// both the individual traces and the overall weight.
    pub(crate) fn from_unnormalized(
        classical: Vec<Register>,
        quantum: Vec<Register>,
        blocks: impl IntoIterator<Item = (Vec<usize>, HermitianMatrix)>,
    ) -> Result<Self> {
        let mut state = Self::empty(classical, quantum)?;
        let mut total = 0.0;
        for (key, m) in blocks {
            let t = m.trace();
            if t > 0.0 {
                total += t;
                let matrix = m.scale(1.0 / t);
                state.blocks.insert(key, Block { weight: t, matrix });
            }
        }
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Validation(format!("state has total weight {total}")));
        }
        for b in state.blocks.values_mut() {
            b.weight /= total;
        }
        Ok(state)
    }

    fn empty(classical: Vec<Register>, quantum: Vec<Register>) -> Result<Self> {
        let mut names: Vec<&str> = classical
            .iter()
            .chain(&quantum)
            .map(|r| r.name.as_str())
            .collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("register names must be unique".into()));
        }
        if classical.iter().chain(&quantum).any(|r| r.size == 0) {
            return Err(Error::Validation("register sizes must be positive".into()));
        }
        Ok(HybridState {
            classical,
            quantum,
            blocks: BTreeMap::new(),
        })
    }

    fn check_key(&self, key: &[usize]) -> Result<()> {
        if key.len() != self.classical.len()
            || key.iter().zip(&self.classical).any(|(&k, r)| k >= r.size)
        {
            return Err(Error::Validation(format!(
                "classical outcome {key:?} does not fit registers {:?}",
                self.classical
            )));
        }
        Ok(())
    }

    /// Embeds `p(x, y)` as a state with classical register `X` and a diagonal
    /// quantum register `Y`.
    pub fn from_joint(p: &JointDistribution) -> Result<Self> {
        let ny = p.y_arity();
        let blocks = (0..p.x_arity()).map(|x| {
            let diag: Vec<f64> = (0..ny).map(|y| p.get(x, y)).collect();
            (
                vec![x],
                HermitianMatrix::from_real_diagonal(&diag).expect("real diagonal"),
            )
        });
        Self::from_unnormalized(
            vec![Register::new("X", p.x_arity())],
            vec![Register::new("Y", ny)],
            blocks,
        )
    }

    /// A purely quantum state on the given registers.
    pub fn quantum_only(quantum: Vec<Register>, rho: HermitianMatrix) -> Result<Self> {
        Self::new(vec![], quantum, [(vec![], 1.0, rho)])
    }

    pub fn classical_registers(&self) -> &[Register] {
        &self.classical
    }

    pub fn quantum_registers(&self) -> &[Register] {
        &self.quantum
    }

    pub fn quantum_dims(&self) -> Vec<usize> {
        self.quantum.iter().map(|r| r.size).collect()
    }

    pub fn quantum_dim(&self) -> usize {
        self.quantum.iter().map(|r| r.size).product()
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&Vec<usize>, &Block)> {
        self.blocks.iter()
    }

    pub fn block(&self, key: &[usize]) -> Option<&Block> {
        self.blocks.get(key)
    }

    pub fn locate(&self, name: &str) -> Result<RegisterRef> {
        if let Some(i) = self.classical.iter().position(|r| r.name == name) {
            return Ok(RegisterRef::Classical(i));
        }
        if let Some(i) = self.quantum.iter().position(|r| r.name == name) {
            return Ok(RegisterRef::Quantum(i));
        }
        Err(Error::UnknownRegister(name.to_string()))
    }

    /// Marginal on the registers not listed in `names`.
    pub fn trace_out(&self, names: &[&str]) -> Result<Self> {
        let mut drop_c = vec![false; self.classical.len()];
        let mut drop_q = vec![false; self.quantum.len()];
        for name in names {
            match self.locate(name)? {
                RegisterRef::Classical(i) => drop_c[i] = true,
                RegisterRef::Quantum(i) => drop_q[i] = true,
            }
        }
        let keep_c: Vec<usize> = (0..self.classical.len()).filter(|&i| !drop_c[i]).collect();
        let keep_q: Vec<usize> = (0..self.quantum.len()).filter(|&i| !drop_q[i]).collect();
        let dims = self.quantum_dims();

        let mut merged: BTreeMap<Vec<usize>, HermitianMatrix> = BTreeMap::new();
        for (key, block) in &self.blocks {
            let m = if keep_q.len() == self.quantum.len() {
                block.matrix.clone()
            } else {
                block.matrix.partial_trace_keep(&dims, &keep_q)?
            };
            let m = m.scale(block.weight);
            let k: Vec<usize> = keep_c.iter().map(|&i| key[i]).collect();
            match merged.get_mut(&k) {
                Some(acc) => *acc = acc.add(&m),
                None => {
                    merged.insert(k, m);
                }
            }
        }
        Self::from_unnormalized(
            keep_c.iter().map(|&i| self.classical[i].clone()).collect(),
            keep_q.iter().map(|&i| self.quantum[i].clone()).collect(),
            merged,
        )
    }

    /// Dense density matrix over classical ⊗ quantum registers, classical
    /// registers leading. Only for small states and tests.
    pub fn to_dense(&self) -> HermitianMatrix {
        let qd = self.quantum_dim();
        let cd: usize = self.classical.iter().map(|r| r.size).product();
        let mut out = HermitianMatrix::zeros(cd * qd).into_inner();
        for (key, block) in &self.blocks {
            let c = key
                .iter()
                .zip(&self.classical)
                .fold(0usize, |acc, (&k, r)| acc * r.size + k);
            for i in 0..qd {
                for j in 0..qd {
                    out[(c * qd + i, c * qd + j)] = block.matrix.get(i, j) * block.weight;
                }
            }
        }
        HermitianMatrix::symmetrized(out)
    }

    /// Largest entrywise deviation between two states with the same layout.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.classical != other.classical || self.quantum != other.quantum {
            return f64::INFINITY;
        }
        self.to_dense().max_abs_diff(&other.to_dense())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let half = HermitianMatrix::identity(2).scale(0.5);
        let ok = HybridState::new(
            vec![Register::new("X", 2)],
            vec![Register::new("B", 2)],
            [(vec![0], 0.5, half.clone()), (vec![1], 0.5, half.clone())],
        );
        assert!(ok.is_ok());
        let bad_weights = HybridState::new(
            vec![Register::new("X", 2)],
            vec![Register::new("B", 2)],
            [(vec![0], 0.5, half.clone()), (vec![1], 0.6, half.clone())],
        );
        assert!(bad_weights.is_err());
        let bad_key = HybridState::new(
            vec![Register::new("X", 2)],
            vec![Register::new("B", 2)],
            [(vec![2], 1.0, half.clone())],
        );
        assert!(bad_key.is_err());
        let dup_names = HybridState::new(
            vec![Register::new("X", 2)],
            vec![Register::new("X", 2)],
            [(vec![0], 1.0, half.clone())],
        );
        assert!(dup_names.is_err());
        let not_psd = HermitianMatrix::from_real_diagonal(&[1.5, -0.5]).unwrap();
        let bad = HybridState::new(
            vec![],
            vec![Register::new("B", 2)],
            [(vec![], 1.0, not_psd)],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn trace_out_classical_and_quantum() {
        let p = JointDistribution::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let s = HybridState::from_joint(&p).unwrap();
        let y = s.trace_out(&["X"]).unwrap();
        let m = &y.block(&[]).unwrap().matrix;
        assert!((m.get(0, 0).re - 0.4).abs() < 1e-15);
        assert!((m.get(1, 1).re - 0.6).abs() < 1e-15);
        let x = s.trace_out(&["Y"]).unwrap();
        assert!((x.block(&[1]).unwrap().weight - 0.7).abs() < 1e-15);
        assert_eq!(x.quantum_dim(), 1);
        assert!(matches!(
            s.trace_out(&["Q"]),
            Err(Error::UnknownRegister(_))
        ));
    }
}
