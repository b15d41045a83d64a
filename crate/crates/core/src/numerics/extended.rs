//! Double-double Hermitian kernel (about 32 significant digits).
//!
//! Some pipelines pass through states whose eigenvalues span far more than
//! the f64 relative precision, for instance a channel tilted at a large order
//! and then purified: the tiny eigenvalues of the tilted state drive the
//! result but are lost when the state is formed as a dense f64 matrix.
//! Eigendecompositions here use cyclic Jacobi, which keeps small eigenvalues
//! to high relative precision.

use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub};

use super::linalg::HermitianMatrix;

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

pub(crate) const DD_LN_2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

/// Relative cutoff below which an eigenvalue counts as zero.
const DD_SUPPORT_CUTOFF: f64 = 1e-28;
const JACOBI_TOL: f64 = 1e-31;
const JACOBI_MAX_SWEEPS: usize = 60;
/// Squared off-diagonal entries below this fraction of `‖m‖²` are dropped.
const NEGLIGIBLE: f64 = 1e-90;

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl Dd {
    pub(crate) const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub(crate) const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub(crate) fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub(crate) fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let y = Dd::from(self.hi.sqrt());
        y + (self - y * y) / (y * 2.0)
    }

    /// `e^x`, accurate to double-double precision for moderate `|x|`.
    pub(crate) fn exp(self) -> Dd {
        if self.hi < -700.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        // e^r = (e^{r/16})^16 with a Taylor series for the small argument
        let r = (self - DD_LN_2 * k) * (1.0 / 16.0);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..=18 {
            term = term * r / (n as f64);
            sum += term;
        }
        for _ in 0..4 {
            sum = sum * sum;
        }
        sum * 2f64.powi(k as i32)
    }

    /// Natural logarithm of a positive value by Newton steps on [`Dd::exp`].
    pub(crate) fn ln(self) -> Dd {
        let mut y = Dd::from(self.hi.ln());
        for _ in 0..2 {
            y += self * (-y).exp() - Dd::ONE;
        }
        y
    }

    pub(crate) fn powf(self, p: Dd) -> Dd {
        (p * self.ln()).exp()
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, o: Dd) {
        *self = *self + o;
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, o: f64) -> Dd {
        let p = two_prod(self.hi, o);
        quick_two_sum(p.hi, p.lo + self.lo * o)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2) + Dd::from(q3)
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, o: f64) -> Dd {
        self / Dd::from(o)
    }
}

/// Complex double-double number.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Zd {
    pub re: Dd,
    pub im: Dd,
}

impl Zd {
    pub(crate) const ZERO: Zd = Zd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    pub(crate) fn real(re: Dd) -> Zd {
        Zd { re, im: Dd::ZERO }
    }

    pub(crate) fn conj(self) -> Zd {
        Zd {
            re: self.re,
            im: -self.im,
        }
    }

    fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    fn scale(self, s: Dd) -> Zd {
        Zd {
            re: self.re * s,
            im: self.im * s,
        }
    }
}

impl Add for Zd {
    type Output = Zd;
    fn add(self, o: Zd) -> Zd {
        Zd {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for Zd {
    type Output = Zd;
    fn sub(self, o: Zd) -> Zd {
        Zd {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for Zd {
    type Output = Zd;
    fn mul(self, o: Zd) -> Zd {
        Zd {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct DdMatrix {
    n: usize,
    data: Vec<Zd>,
}

impl Index<(usize, usize)> for DdMatrix {
    type Output = Zd;
    fn index(&self, (i, j): (usize, usize)) -> &Zd {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DdMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Zd {
        &mut self.data[i * self.n + j]
    }
}

impl DdMatrix {
    pub(crate) fn zeros(n: usize) -> Self {
        DdMatrix {
            n,
            data: vec![Zd::ZERO; n * n],
        }
    }

    pub(crate) fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Zd::real(Dd::ONE);
        }
        m
    }

    pub(crate) fn from_fn(n: usize, f: impl Fn(usize, usize) -> Zd) -> Self {
        DdMatrix {
            n,
            data: (0..n * n).map(|k| f(k / n, k % n)).collect(),
        }
    }

    pub(crate) fn from_hermitian(m: &HermitianMatrix) -> Self {
        Self::from_fn(m.dim(), |i, j| {
            let z = m.get(i, j);
            Zd {
                re: Dd::from(z.re),
                im: Dd::from(z.im),
            }
        })
    }

    pub(crate) fn dim(&self) -> usize {
        self.n
    }

    pub(crate) fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub(crate) fn scale(&self, s: Dd) -> Self {
        DdMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z.scale(s)).collect(),
        }
    }

    pub(crate) fn add(&self, o: &Self) -> Self {
        DdMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    pub(crate) fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Zd::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * o[(k, j)];
                }
            }
        }
        out
    }

    pub(crate) fn kron(&self, o: &Self) -> Self {
        let m = o.n;
        Self::from_fn(self.n * m, |i, j| self[(i / m, j / m)] * o[(i % m, j % m)])
    }

    /// Exactly Hermitian part `(m + m†)/2`.
    pub(crate) fn hermitize(&self) -> Self {
        Self::from_fn(self.n, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()).scale(Dd::from(0.5))
        })
    }

    pub(crate) fn trace(&self) -> Dd {
        (0..self.n).fold(Dd::ZERO, |acc, i| acc + self[(i, i)].re)
    }

    /// `self · inner · self`.
    pub(crate) fn sandwich(&self, inner: &Self) -> Self {
        self.mul(inner).mul(self).hermitize()
    }

    /// Eigenvalues (unsorted) and eigenvectors (columns) of a Hermitian
    /// matrix by cyclic complex Jacobi rotations.
    pub(crate) fn eigh(&self) -> (Vec<Dd>, DdMatrix) {
        let n = self.n;
        let mut a = self.clone();
        let mut v = Self::identity(n);
        let total = a.data.iter().fold(Dd::ZERO, |acc, z| acc + z.norm_sqr());
        let tol = total * (JACOBI_TOL * JACOBI_TOL);
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = Dd::ZERO;
            for p in 0..n {
                for q in p + 1..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let r2 = apq.norm_sqr();
                    let diag = (a[(p, p)].re * a[(q, q)].re).abs();
                    if r2 <= total * NEGLIGIBLE || r2 <= diag * (JACOBI_TOL * JACOBI_TOL) {
                        a[(p, q)] = Zd::ZERO;
                        a[(q, p)] = Zd::ZERO;
                        continue;
                    }
                    let r = r2.sqrt();
                    // phase making the pivot real, then a real rotation
                    let phase = Zd {
                        re: apq.re / r,
                        im: -apq.im / r,
                    };
                    let tau = (a[(q, q)].re - a[(p, p)].re) / (r * 2.0);
                    let t = if tau.abs().hi > 1e60 {
                        Dd::ONE / (tau * 2.0)
                    } else {
                        let root = (Dd::ONE + tau * tau).sqrt();
                        if tau.hi >= 0.0 {
                            Dd::ONE / (tau + root)
                        } else {
                            -(Dd::ONE / (root - tau))
                        }
                    };
                    let c = Dd::ONE / (Dd::ONE + t * t).sqrt();
                    let s = t * c;
                    let (u_pp, u_pq) = (Zd::real(c), Zd::real(s));
                    let (u_qp, u_qq) = (phase.scale(-s), phase.scale(c));
                    for k in 0..n {
                        let (akp, akq) = (a[(k, p)], a[(k, q)]);
                        a[(k, p)] = akp * u_pp + akq * u_qp;
                        a[(k, q)] = akp * u_pq + akq * u_qq;
                        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                        v[(k, p)] = vkp * u_pp + vkq * u_qp;
                        v[(k, q)] = vkp * u_pq + vkq * u_qq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                    }
                    a[(p, q)] = Zd::ZERO;
                    a[(q, p)] = Zd::ZERO;
                }
            }
        }
        ((0..n).map(|i| a[(i, i)].re).collect(), v)
    }

    /// `m^p` on the support of a positive matrix, zero elsewhere.
    pub(crate) fn power_on_support(&self, p: Dd) -> Self {
        let (values, v) = self.eigh();
        let cutoff = support_cutoff(&values);
        let mut scaled = v.clone();
        for (j, &lam) in values.iter().enumerate() {
            let f = if lam > cutoff { lam.powf(p) } else { Dd::ZERO };
            for i in 0..self.n {
                scaled[(i, j)] = scaled[(i, j)].scale(f);
            }
        }
        scaled.mul(&v.adjoint()).hermitize()
    }

    /// `Σ λᵢ^p` over the support of a positive matrix.
    pub(crate) fn trace_power(&self, p: Dd) -> Dd {
        let (values, _) = self.eigh();
        let cutoff = support_cutoff(&values);
        values
            .iter()
            .filter(|&&v| v > cutoff)
            .fold(Dd::ZERO, |acc, &v| acc + v.powf(p))
    }
}

fn support_cutoff(values: &[Dd]) -> Dd {
    let max = values
        .iter()
        .fold(Dd::ZERO, |acc, &v| if v > acc { v } else { acc });
    max * DD_SUPPORT_CUTOFF
}
