//! Random spectra, matrix ensembles and the rotated free pair.

use freeprob::laws::{CdfTable, Law};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::matrix::{haar_orthogonal, sym_eig, SymMatrix};
use crate::{Error, Result};

/// Smallest dimension accepted by [`sample_matrix`].
pub const MIN_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMode {
    /// iid draws from the law.
    #[default]
    Iid,
    /// Midpoint quantiles `F⁻¹((i + 1/2)/n)`; removes the spectral sampling noise.
    Quantile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    RotatedSpectrum(SpectrumMode),
    /// `α X Xᵀ` with `X` of size `n × round(λn)`; free Poisson only.
    Wishart,
}

pub fn sample_spectrum<R: Rng + ?Sized>(table: &CdfTable, n: usize, mode: SpectrumMode, rng: &mut R) -> Vec<f64> {
    match mode {
        SpectrumMode::Iid => (0..n).map(|_| table.sample(rng)).collect(),
        SpectrumMode::Quantile => (0..n).map(|i| table.quantile((i as f64 + 0.5) / n as f64)).collect(),
    }
}

pub fn sample_matrix<R: Rng + ?Sized>(law: &Law, n: usize, construction: Construction, rng: &mut R) -> Result<SymMatrix> {
    if n < MIN_DIM {
        return Err(Error::InvalidDimension(n));
    }
    match (construction, law) {
        (Construction::RotatedSpectrum(mode), _) => {
            let d = sample_spectrum(&law.cdf_table(), n, mode, rng);
            let q = haar_orthogonal(n, rng)?;
            SymMatrix::from_spectrum(&q, &d)
        }
        (Construction::Wishart, Law::Poisson(p)) => wishart_matrix(p.lambda(), p.alpha(), n, rng),
        (Construction::Wishart, Law::Binomial(_)) => {
            Err(Error::InvalidArgument("the Wishart construction only models free Poisson laws".into()))
        }
    }
}

/// `α X Xᵀ` with iid `N(0, 1/n)` entries in the `n × m` matrix `X`, `m = round(λn)`.
pub fn wishart_matrix<R: Rng + ?Sized>(lambda: f64, alpha: f64, n: usize, rng: &mut R) -> Result<SymMatrix> {
    let m = (lambda * n as f64).round().max(1.0) as usize;
    let normal = Normal::new(0.0, 1.0 / (n as f64).sqrt()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let x = DMatrix::from_fn(n, m, |_, _| normal.sample(rng));
    SymMatrix::from_matrix(&((&x * x.transpose()) * alpha))
}

/// `U = diag(u)` and `V = O diag(v) Oᵀ` with Haar `O`. Conjugating both by an
/// independent Haar matrix shows this has the law of two independently
/// rotated spectra, while keeping every function of `U` diagonal.
#[derive(Debug, Clone)]
pub struct FreePair {
    o: DMatrix<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl FreePair {
    pub fn sample<R: Rng + ?Sized>(
        u_table: &CdfTable,
        v_table: &CdfTable,
        n: usize,
        mode: SpectrumMode,
        rng: &mut R,
    ) -> Result<Self> {
        let u = sample_spectrum(u_table, n, mode, rng);
        let v = sample_spectrum(v_table, n, mode, rng);
        let o = haar_orthogonal(n, rng)?.matrix().clone();
        Ok(FreePair { o, u, v })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// Eigenvalues of `U`, which is diagonal in this basis.
    pub fn u_spectrum(&self) -> &[f64] {
        &self.u
    }

    pub fn v_spectrum(&self) -> &[f64] {
        &self.v
    }

    /// `f(V) = O diag(f(v)) Oᵀ`.
    pub fn v_function(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut od = self.o.clone();
        for (j, &vj) in self.v.iter().enumerate() {
            od.column_mut(j).scale_mut(f(vj));
        }
        od * self.o.transpose()
    }

    /// `U^{1/2} V U^{1/2}`, which has the spectrum of `V^{1/2} U V^{1/2}`.
    pub fn x_matrix(&self) -> Result<SymMatrix> {
        let mut m = self.v_function(|x| x);
        let s: Vec<f64> = self.u.iter().map(|x| x.max(0.0).sqrt()).collect();
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                m[(i, j)] *= s[i] * s[j];
            }
        }
        SymMatrix::from_matrix(&m)
    }

    pub fn x_eigenvalues(&self) -> Result<Vec<f64>> {
        sym_eig(&self.x_matrix()?)
    }

    /// `(1/n) tr(UVUV)`.
    pub fn trace_uvuv(&self) -> f64 {
        let p = scale_columns(&self.v_function(|x| x), &self.u);
        trace_product(&p, &p) / self.dim() as f64
    }
}

/// `m · diag(d)`.
pub(crate) fn scale_columns(m: &DMatrix<f64>, d: &[f64]) -> DMatrix<f64> {
    let mut out = m.clone();
    for (j, &dj) in d.iter().enumerate() {
        out.column_mut(j).scale_mut(dj);
    }
    out
}

/// `tr(AB) = Σ A_ij B_ji`.
pub(crate) fn trace_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// `tr(diag(w) M)`.
pub(crate) fn trace_diag(w: &[f64], m: &DMatrix<f64>) -> f64 {
    w.iter().enumerate().map(|(i, wi)| wi * m[(i, i)]).sum()
}
