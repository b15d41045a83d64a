//! Small dense Hermitian matrices.
//!
//! Everything here works on complex matrices of dimension at most
//! [`MAX_DIM`]. Spectral functions go through a full eigendecomposition and
//! treat eigenvalues below a relative cutoff as exact zeros, so negative
//! powers act as pseudo-inverses on the support. Positive powers use a much
//! smaller cutoff that only removes eigensolver noise.
//!
//! A matrix produced by a spectral function keeps its eigendecomposition.
//! Later powers (and tensor products of such matrices) reuse it, so tiny
//! eigenvalues keep their relative precision: `(m^a)^b` equals `m^{ab}` to
//! rounding even when `m^a` is numerically singular as a dense matrix.

use std::sync::Arc;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub const MAX_DIM: usize = 64;

/// Maximum per-entry deviation from conjugate symmetry accepted on input.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues below `SUPPORT_CUTOFF * max(λ)` are treated as zero.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Relative cutoff for positive powers. Only eigensolver noise is dropped:
/// for small exponents a genuine eigenvalue `λ ≪ max(λ)` still contributes
/// `λ^p`, e.g. `(1e-13)^{0.2} ≈ 2.5e-3`.
pub const POSITIVE_POWER_CUTOFF: f64 = 1e-14;

/// Tolerance for negative eigenvalues of a nominally PSD matrix, relative to
/// `max(1, max|λ|)`.
pub const PSD_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct HermitianMatrix(DMatrix<C64>, Option<Arc<Eigen>>);

impl PartialEq for HermitianMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

/// Eigendecomposition `m = V diag(values) V†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

/// Which factor of a bipartite `A ⊗ B` space to trace out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

pub fn eig_hermitian(m: &DMatrix<C64>) -> Result<Eigen> {
    Ok(HermitianMatrix::new(m.clone())?.eig())
}

pub fn matrix_power_on_support(m: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    m.power_on_support(p)
}

/// Partial trace of a bipartite operator on `A ⊗ B` (A is the leading factor).
pub fn partial_trace(
    m: &HermitianMatrix,
    trace_out: Subsystem,
    dims: (usize, usize),
) -> Result<HermitianMatrix> {
    let keep = match trace_out {
        Subsystem::A => [1],
        Subsystem::B => [0],
    };
    m.partial_trace_keep(&[dims.0, dims.1], &keep)
}

impl HermitianMatrix {
    /// Validates squareness, size and conjugate symmetry, then stores the
    /// exactly symmetrized matrix `(m + m†)/2`.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        let (r, c) = m.shape();
        if r != c {
            return Err(Error::Validation(format!("matrix is not square: {r}x{c}")));
        }
        if r == 0 || r > MAX_DIM {
            return Err(Error::Validation(format!(
                "matrix dimension {r} outside 1..={MAX_DIM}"
            )));
        }
        let mut worst = 0.0f64;
        for i in 0..r {
            for j in i..r {
                let d = m[(i, j)] - m[(j, i)].conj();
                worst = worst.max(d.re.abs()).max(d.im.abs());
            }
        }
        if !worst.is_finite() || worst > HERMITIAN_TOL {
            return Err(Error::Validation(format!(
                "matrix is not Hermitian (max deviation {worst:e})"
            )));
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without checking. Used for products that are Hermitian in
    /// exact arithmetic.
    pub(crate) fn symmetrized(m: DMatrix<C64>) -> Self {
        let adj = m.adjoint();
        Self::dense((m + adj) * C64::new(0.5, 0.0))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Self::new(DMatrix::from_diagonal(&v))
    }

    pub fn identity(dim: usize) -> Self {
        Self::dense(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::dense(DMatrix::zeros(dim, dim))
    }

    /// Projector `|ψ⟩⟨ψ|` (not normalized).
    pub fn outer(psi: &DVector<C64>) -> Self {
        Self::symmetrized(psi * psi.adjoint())
    }

    fn dense(m: DMatrix<C64>) -> Self {
        HermitianMatrix(m, None)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let spectrum = match &self.1 {
            Some(e) if s > 0.0 => Some(Arc::new(Eigen {
                values: e.values.iter().map(|v| v * s).collect(),
                vectors: e.vectors.clone(),
            })),
            _ => None,
        };
        HermitianMatrix(&self.0 * C64::new(s, 0.0), spectrum)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::dense(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::dense(&self.0 - &other.0)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let spectrum = match (&self.1, &other.1) {
            (Some(a), Some(b)) => {
                let values = a
                    .values
                    .iter()
                    .flat_map(|x| b.values.iter().map(move |y| x * y))
                    .collect();
                Some(Arc::new(sorted(values, a.vectors.kronecker(&b.vectors))))
            }
            _ => None,
        };
        HermitianMatrix(self.0.kronecker(&other.0), spectrum)
    }

    /// `self · inner · self`.
    pub fn sandwich(&self, inner: &Self) -> Self {
        Self::symmetrized(&self.0 * &inner.0 * &self.0)
    }

    /// Conjugation `u · self · u†` by an arbitrary square matrix.
    pub fn conjugate_by(&self, u: &DMatrix<C64>) -> Self {
        Self::symmetrized(u * &self.0 * u.adjoint())
    }

    /// `Re Tr(self · other)`.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let z = self.0[(i, j)] * other.0[(j, i)];
                acc += z.re;
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn eig(&self) -> Eigen {
        if let Some(e) = &self.1 {
            return (**e).clone();
        }
        if self.is_diagonal() {
            let n = self.dim();
            return sorted(
                (0..n).map(|i| self.0[(i, i)].re).collect(),
                DMatrix::identity(n, n),
            );
        }
        let se = self.0.clone().symmetric_eigen();
        sorted(se.eigenvalues.iter().copied().collect(), se.eigenvectors)
    }

    /// Exactly diagonal with real entries, as for classical states. The
    /// spectrum is then read off without rounding.
    fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| {
            (0..n).all(|i| {
                if i == j {
                    self.0[(i, i)].im == 0.0
                } else {
                    self.0[(i, j)] == C64::new(0.0, 0.0)
                }
            })
        })
    }

    /// Eigendecomposition and the threshold at or below which an eigenvalue
    /// counts as zero. Stored and diagonal spectra are exact, so only zero
    /// counts as zero there.
    fn support_eig(&self, relative: f64) -> (Eigen, f64) {
        let e = self.eig();
        let cutoff = if self.1.is_some() || self.is_diagonal() {
            0.0
        } else {
            relative * e.values.iter().copied().fold(0.0f64, f64::max)
        };
        (e, cutoff)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eig().values
    }

    /// Checks positivity within [`PSD_TOL`] and returns the eigendecomposition.
    pub fn psd_eig(&self) -> Result<Eigen> {
        let e = self.eig();
        check_psd(&e)?;
        Ok(e)
    }

    fn checked_support_eig(&self, relative: f64) -> Result<(Eigen, f64)> {
        let (e, cutoff) = self.support_eig(relative);
        check_psd(&e)?;
        Ok((e, cutoff))
    }

    /// Applies `f` to every eigenvalue on the support and zero elsewhere.
    pub fn map_support(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (e, cutoff) = self.checked_support_eig(SUPPORT_CUTOFF)?;
        let mapped: Vec<f64> = e
            .values
            .iter()
            .map(|&v| if v > cutoff { f(v) } else { 0.0 })
            .collect();
        Ok(Self::from_spectrum(&e.vectors, &mapped))
    }

    pub fn power_on_support(&self, p: f64) -> Result<Self> {
        let (e, cutoff) = self.checked_support_eig(relative_cutoff(p))?;
        Ok(Self::spectral_power(e, cutoff, p))
    }

    /// [`Self::power_on_support`] for a matrix that is positive by
    /// construction (a congruence or a partial trace of PSD operators):
    /// rounding-level negative eigenvalues are dropped instead of rejected.
    pub(crate) fn power_of_positive(&self, p: f64) -> Self {
        let (e, cutoff) = self.support_eig(relative_cutoff(p));
        Self::spectral_power(e, cutoff, p)
    }

    fn spectral_power(e: Eigen, cutoff: f64, p: f64) -> Self {
        let values: Vec<f64> = e
            .values
            .iter()
            .map(|&v| if v > cutoff { v.powf(p) } else { 0.0 })
            .collect();
        let m = Self::from_spectrum(&e.vectors, &values);
        HermitianMatrix(m.0, Some(Arc::new(sorted(values, e.vectors))))
    }

    /// `Σ λᵢ^p` over the support.
    pub fn trace_power(&self, p: f64) -> Result<f64> {
        let (e, cutoff) = self.checked_support_eig(relative_cutoff(p))?;
        Ok(e.values
            .iter()
            .filter(|&&v| v > cutoff)
            .map(|v| v.powf(p))
            .sum())
    }

    /// [`Self::trace_power`] counterpart of [`Self::power_of_positive`].
    pub(crate) fn trace_power_of_positive(&self, p: f64) -> f64 {
        let (e, cutoff) = self.support_eig(relative_cutoff(p));
        e.values
            .iter()
            .filter(|&&v| v > cutoff)
            .map(|v| v.powf(p))
            .sum()
    }

    /// `-Tr(m ln m)` for a PSD matrix (not necessarily normalized).
    pub fn entropy_term(&self) -> Result<f64> {
        let (e, cutoff) = self.checked_support_eig(SUPPORT_CUTOFF)?;
        Ok(e.values
            .iter()
            .filter(|&&v| v > cutoff)
            .map(|v| -v * v.ln())
            .sum())
    }

    fn from_spectrum(vectors: &DMatrix<C64>, values: &[f64]) -> Self {
        let n = vectors.nrows();
        let mut scaled = vectors.clone();
        for (j, &v) in values.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= v;
            }
        }
        Self::symmetrized(scaled * vectors.adjoint())
    }

    /// Partial trace on a multipartite space with factor dimensions `dims`,
    /// keeping the factors listed in `keep` (in that order).
    pub fn partial_trace_keep(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        let layout = Layout::new(dims, keep, self.dim())?;
        let mut out = DMatrix::<C64>::zeros(layout.kept_dim, layout.kept_dim);
        let n = self.dim();
        for i in 0..n {
            let (ki, ri) = layout.split[i];
            for j in 0..n {
                let (kj, rj) = layout.split[j];
                if ri == rj {
                    out[(ki, kj)] += self.0[(i, j)];
                }
            }
        }
        Ok(Self::symmetrized(out))
    }

    /// Lifts an operator on the factors `at` to the full space, acting as the
    /// identity on the remaining factors.
    pub fn embed(&self, dims: &[usize], at: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        let layout = Layout::new(dims, at, total)?;
        if layout.kept_dim != self.dim() {
            return Err(Error::Validation(format!(
                "operator of dimension {} cannot act on factors of dimension {}",
                self.dim(),
                layout.kept_dim
            )));
        }
        let mut out = DMatrix::<C64>::zeros(total, total);
        for i in 0..total {
            let (ki, ri) = layout.split[i];
            for j in 0..total {
                let (kj, rj) = layout.split[j];
                if ri == rj {
                    out[(i, j)] = self.0[(ki, kj)];
                }
            }
        }
        Ok(Self::dense(out))
    }
}

/// Orders an eigendecomposition by ascending eigenvalue.
fn sorted(values: Vec<f64>, vectors: DMatrix<C64>) -> Eigen {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let n = vectors.nrows();
    Eigen {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]),
    }
}

fn check_psd(e: &Eigen) -> Result<()> {
    let scale = e.values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    match e.values.first() {
        Some(&min) if min < -PSD_TOL * scale => Err(Error::Validation(format!(
            "matrix is not positive semidefinite (min eigenvalue {min:e})"
        ))),
        _ => Ok(()),
    }
}

fn relative_cutoff(p: f64) -> f64 {
    if p > 0.0 {
        POSITIVE_POWER_CUTOFF
    } else {
        SUPPORT_CUTOFF
    }
}

/// Index bookkeeping for a tensor-product space split into kept and
/// remaining factors.
struct Layout {
    kept_dim: usize,
    /// For each full index: (index within kept factors, index within the rest).
    split: Vec<(usize, usize)>,
}

impl Layout {
    fn new(dims: &[usize], keep: &[usize], total: usize) -> Result<Self> {
        let product: usize = dims.iter().product();
        if product != total || dims.contains(&0) {
            return Err(Error::Validation(format!(
                "factor dimensions {dims:?} do not match matrix dimension {total}"
            )));
        }
        let mut seen = vec![false; dims.len()];
        for &k in keep {
            if k >= dims.len() || seen[k] {
                return Err(Error::Validation(format!(
                    "invalid factor selection {keep:?} for {} factors",
                    dims.len()
                )));
            }
            seen[k] = true;
        }
        let rest: Vec<usize> = (0..dims.len()).filter(|k| !seen[*k]).collect();
        let kept_dim = keep.iter().map(|&k| dims[k]).product();

        let mut digits = vec![0usize; dims.len()];
        let mut split = Vec::with_capacity(total);
        for idx in 0..total {
            let mut r = idx;
            for f in (0..dims.len()).rev() {
                digits[f] = r % dims[f];
                r /= dims[f];
            }
            let compose = |factors: &[usize]| {
                factors
                    .iter()
                    .fold(0usize, |acc, &f| acc * dims[f] + digits[f])
            };
            split.push((compose(keep), compose(&rest)));
        }
        Ok(Layout { kept_dim, split })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> HermitianMatrix {
        HermitianMatrix::new(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ))
        .unwrap()
    }

    fn reconstruct(e: &Eigen) -> DMatrix<C64> {
        HermitianMatrix::from_spectrum(&e.vectors, &e.values).into_inner()
    }

    #[test]
    fn diagonal_spectra_are_exact() {
        let m = HermitianMatrix::from_real_diagonal(&[0.5, 1e-20, 0.0, 0.25]).unwrap();
        assert_eq!(m.eigenvalues(), vec![0.0, 1e-20, 0.25, 0.5]);
        // 1e-20 is far below any relative cutoff but is a genuine eigenvalue here
        let t = m.trace_power(0.2).unwrap();
        let expected = 0.5f64.powf(0.2) + 1e-20f64.powf(0.2) + 0.25f64.powf(0.2);
        assert!((t - expected).abs() < 1e-15);
        let inv = m.power_on_support(-1.0).unwrap();
        assert_eq!(inv.get(1, 1).re, 1e20);
        assert_eq!(inv.get(2, 2).re, 0.0);
        assert_eq!(inv.get(0, 3), C64::new(0.0, 0.0));
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = HermitianMatrix::identity(2).eig();
        assert_eq!(e.values, vec![1.0, 1.0]);
        assert!((reconstruct(&e) - DMatrix::identity(2, 2)).norm() < 1e-14);

        let d = HermitianMatrix::from_real_diagonal(&[0.8, 0.2]).unwrap();
        let e = d.eig();
        assert!((e.values[0] - 0.2).abs() < 1e-15);
        assert!((e.values[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn eig_pauli_x() {
        let e = pauli_x().eig();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let err = (reconstruct(&e) - pauli_x().into_inner()).norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        assert!(matches!(eig_hermitian(&m), Err(Error::Validation(_))));
        let m = DMatrix::from_row_slice(1, 1, &[c(1.0, 1e-6)]);
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn power_examples() {
        let id = HermitianMatrix::identity(3);
        assert!(id.power_on_support(-0.7).unwrap().max_abs_diff(&id) < 1e-14);

        let d = HermitianMatrix::from_real_diagonal(&[0.25, 0.0]).unwrap();
        let p = d.power_on_support(-0.5).unwrap();
        let want = HermitianMatrix::from_real_diagonal(&[2.0, 0.0]).unwrap();
        assert!(p.max_abs_diff(&want) < 1e-14);

        let d = HermitianMatrix::from_real_diagonal(&[0.04, 0.36]).unwrap();
        let p = d.power_on_support(0.5).unwrap();
        let want = HermitianMatrix::from_real_diagonal(&[0.2, 0.6]).unwrap();
        assert!(p.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn power_rejects_negative_spectrum() {
        let d = HermitianMatrix::from_real_diagonal(&[0.5, -0.1]).unwrap();
        assert!(matches!(d.power_on_support(0.5), Err(Error::Validation(_))));
        // rounding-level negatives are tolerated and dropped from the support
        let d = HermitianMatrix::from_real_diagonal(&[1.0, -1e-14]).unwrap();
        let p = d.power_on_support(-1.0).unwrap();
        assert!((p.get(1, 1).re).abs() < 1e-300);
    }

    #[test]
    fn partial_trace_examples() {
        let rho = HermitianMatrix::from_real_diagonal(&[0.3, 0.7]).unwrap();
        let sigma = pauli_x()
            .scale(0.25)
            .add(&HermitianMatrix::identity(2).scale(0.5));
        let prod = rho.kron(&sigma);
        let out = partial_trace(&prod, Subsystem::A, (2, 2)).unwrap();
        assert!(out.max_abs_diff(&sigma) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = DVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let bell = HermitianMatrix::outer(&psi);
        let out = partial_trace(&bell, Subsystem::A, (2, 2)).unwrap();
        assert!(out.max_abs_diff(&HermitianMatrix::identity(2).scale(0.5)) < 1e-15);

        let d = HermitianMatrix::from_real_diagonal(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let out = partial_trace(&d, Subsystem::B, (2, 2)).unwrap();
        let want = HermitianMatrix::from_real_diagonal(&[0.3, 0.7]).unwrap();
        assert!(out.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let d = HermitianMatrix::identity(4);
        assert!(partial_trace(&d, Subsystem::A, (2, 3)).is_err());
        assert!(d.partial_trace_keep(&[2, 2], &[0, 0]).is_err());
    }

    #[test]
    fn embed_matches_kron_on_middle_factor() {
        let op = pauli_x();
        let full = op.embed(&[2, 2, 3], &[1]).unwrap();
        let want = HermitianMatrix::identity(2)
            .kron(&op)
            .kron(&HermitianMatrix::identity(3));
        assert!(full.max_abs_diff(&want) < 1e-15);
    }
}
