//! Dense symmetric matrices, Haar orthogonal sampling and cyclic Jacobi.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Sweep cap for [`sym_eig`].
pub const JACOBI_MAX_SWEEPS: usize = 50;
/// Stop when the off-diagonal Frobenius norm is below this times `‖m‖_F`.
pub const JACOBI_REL_TOL: f64 = 1e-12;

/// Dense real symmetric matrix. Every constructor symmetrizes, so `m[i,j]`
/// and `m[j,i]` are bitwise equal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl SymMatrix {
    /// `(a + aᵀ)/2`.
    pub fn from_matrix(a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() == 0 {
            return Err(Error::InvalidDimension(a.nrows()));
        }
        let n = a.nrows();
        let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
        Ok(SymMatrix { m })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(SymMatrix { m })
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    /// `Q diag(d) Qᵀ`.
    pub fn from_spectrum(q: &Orthogonal, d: &[f64]) -> Result<Self> {
        if q.dim() != d.len() {
            return Err(Error::InvalidArgument(format!("spectrum of length {} for dimension {}", d.len(), q.dim())));
        }
        let mut qd = q.matrix().clone();
        for (j, &dj) in d.iter().enumerate() {
            qd.column_mut(j).scale_mut(dj);
        }
        Self::from_matrix(&(qd * q.matrix().transpose()))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// `(1/n) tr`.
    pub fn normalized_trace(&self) -> f64 {
        self.trace() / self.dim() as f64
    }

    pub fn frobenius(&self) -> f64 {
        self.m.norm()
    }
}

/// Orthogonal matrix from [`haar_orthogonal`].
#[derive(Debug, Clone, PartialEq)]
pub struct Orthogonal {
    q: DMatrix<f64>,
}

impl Orthogonal {
    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn determinant(&self) -> f64 {
        self.q.clone().determinant()
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// column signs fixed by `sign(R_ii)`.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Orthogonal> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(Orthogonal { q })
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
pub fn sym_eig(m: &SymMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    let mut a: Vec<f64> = (0..n * n).map(|k| m.m[(k / n, k % n)]).collect();
    let target = JACOBI_REL_TOL * m.frobenius();
    let mut sweeps = 0;
    while off_diagonal_norm(&a, n) > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}
