//! Free Poisson `ν(λ, α)` and free binomial `β(σ, θ)` laws.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freemoments::{moments_from_cumulants, CumulantSequence, SpectralMeasure};
use crate::quadrature::{gauss_legendre, sqrt_edge_rule, EdgeNode, NeumaierSum, DEFAULT_NODES};
use crate::series::{Scalar, Series};
use crate::transforms::{r_from_cumulants, RTransform};

/// Largest `n_max` accepted by [`law_moments`].
pub const MOMENT_CEILING: usize = 32;
/// Grid size of the tabulated CDF used for sampling.
pub const CDF_GRID: usize = 4096;

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!("{name} = {v} is not finite")))
    }
}

/// Marchenko–Pastur law with rate `λ` and jump size `α`; `κ_n = λ αⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreePoissonLaw {
    lambda: f64,
    alpha: f64,
}

impl FreePoissonLaw {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        check_finite("lambda", lambda)?;
        check_finite("alpha", alpha)?;
        if lambda <= 0.0 || alpha <= 0.0 {
            return Err(Error::InvalidParameters(format!("need lambda > 0 and alpha > 0, got ({lambda}, {alpha})")));
        }
        Ok(FreePoissonLaw { lambda, alpha })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(α(1-√λ)², α(1+√λ)²)`.
    pub fn support(&self) -> (f64, f64) {
        let s = self.lambda.sqrt();
        (self.alpha * (1.0 - s).powi(2), self.alpha * (1.0 + s).powi(2))
    }

    pub fn atom_at_zero(&self) -> f64 {
        (1.0 - self.lambda).max(0.0)
    }

    pub fn cumulants(&self, n: usize) -> Vec<f64> {
        (1..=n as i32).map(|k| self.lambda * self.alpha.powi(k)).collect()
    }

    /// `λα/(1-αz)` to order `order`.
    pub fn r_transform(&self, order: usize) -> RTransform<f64> {
        r_from_cumulants(&CumulantSequence::new(self.cumulants(order + 1)).expect("order + 1 >= 1"))
    }

    /// Mass of the continuous part.
    pub fn continuous_mass(&self) -> f64 {
        self.lambda.min(1.0)
    }

    /// Total mass under the literal reading `max(0,1-λ)δ₀ + λ·ν̃` with `ν̃`
    /// carrying the stated density; differs from 1 unless `λ = 1`.
    pub fn literal_reading_mass(&self) -> f64 {
        self.atom_at_zero() + self.lambda * self.continuous_mass()
    }

    /// `φ(X⁻¹) = 1/(α(λ-1))` and `φ(X⁻²) = λ/(α²(λ-1)³)`.
    pub fn negative_moments_closed(&self) -> Result<(f64, f64)> {
        if self.lambda <= 1.0 {
            return Err(Error::AtomAtZero);
        }
        let (l, a) = (self.lambda, self.alpha);
        Ok((1.0 / (a * (l - 1.0)), l / (a * a * (l - 1.0).powi(3))))
    }
}

/// Free binomial law on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeBinomialLaw {
    sigma: f64,
    theta: f64,
}

impl FreeBinomialLaw {
    /// Requires `(σ+θ)/(σ+θ-1) > 0` and `σθ/(σ+θ-1) > 0`; of that region only
    /// `σ+θ > 1` (hence `σ, θ > 0`) yields a real support, so that is enforced too.
    pub fn new(sigma: f64, theta: f64) -> Result<Self> {
        check_finite("sigma", sigma)?;
        check_finite("theta", theta)?;
        let l = sigma + theta;
        if !(l / (l - 1.0) > 0.0 && sigma * theta / (l - 1.0) > 0.0) {
            return Err(Error::InvalidParameters(format!("(sigma, theta) = ({sigma}, {theta}) outside the admissible region")));
        }
        if l <= 1.0 {
            return Err(Error::InvalidParameters(format!("sigma + theta = {l} gives no real support")));
        }
        Ok(FreeBinomialLaw { sigma, theta })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn lambda(&self) -> f64 {
        self.sigma + self.theta
    }

    pub fn mean(&self) -> f64 {
        self.sigma / self.lambda()
    }

    /// `(x₋, x₊)`; computed through `x₋ = ((σ-1)/λ)²/(p+q)²` and its mirror
    /// image so that endpoints at 0 or 1 come out exact.
    pub fn support(&self) -> (f64, f64) {
        (edge_near_zero(self.sigma, self.theta), 1.0 - edge_near_zero(self.theta, self.sigma))
    }

    /// `1 - x₊`, without cancellation.
    pub fn gap_to_one(&self) -> f64 {
        edge_near_zero(self.theta, self.sigma)
    }

    pub fn atom_at_zero(&self) -> f64 {
        if self.sigma > 0.0 && self.sigma < 1.0 {
            1.0 - self.sigma
        } else {
            0.0
        }
    }

    pub fn atom_at_one(&self) -> f64 {
        if self.theta > 0.0 && self.theta < 1.0 {
            1.0 - self.theta
        } else {
            0.0
        }
    }
}

/// Distance from 0 of the lower support edge of `β(s, t)`.
fn edge_near_zero(s: f64, t: f64) -> f64 {
    let l = s + t;
    let p = (s / l * (1.0 - 1.0 / l)).sqrt();
    let q = (1.0 / l * (1.0 - s / l)).sqrt();
    ((s - 1.0) / l).powi(2) / (p + q).powi(2)
}

/// Moment series `Σ m_n wⁿ` of `β(σ, θ)` from the large-`z` expansion of its
/// Cauchy transform: `M(w) = [(a + bw) - √P(w)] / (2(w-1))` with `a = λ-2`,
/// `b = 1-σ`, `P(w) = (a+bw)² - 4(1-λ)(1-w)` and `√P(0) = λ`.
pub fn binomial_moment_series<T: Scalar>(sigma: &T, theta: &T, order: usize) -> Result<Series<T>> {
    let one = T::one();
    let two = one.clone() + one.clone();
    let lambda = sigma.clone() + theta.clone();
    let a = lambda.clone() - two.clone();
    let b = one.clone() - sigma.clone();
    let n = order + 1;
    let lin = Series::from_fn(n, |k| match k {
        0 => a.clone(),
        1 => b.clone(),
        _ => T::zero(),
    });
    let four_one_minus_l = (two.clone() + two.clone()) * (one.clone() - lambda.clone());
    let one_minus_w = Series::from_fn(n, |k| match k {
        0 => one.clone(),
        1 => -one.clone(),
        _ => T::zero(),
    });
    let p = &lin * &lin - one_minus_w.scale(&four_one_minus_l);
    let root = p.sqrt_with_root(lambda)?;
    let num = &lin - &root;
    // divide by 2(w - 1) = -2(1 - w)
    let m = num.try_div(&one_minus_w.scale(&-two))?;
    Ok(m.truncate(order))
}

/// Cauchy transform of `β(σ, θ)`, branch with `G(z) ~ 1/z` at infinity.
pub fn binomial_cauchy(sigma: f64, theta: f64, z: Complex64) -> Result<Complex64> {
    let law = FreeBinomialLaw::new(sigma, theta)?;
    let (xm, xp) = law.support();
    if z.im == 0.0 && (z.re >= xm && z.re <= xp || z.re == 0.0 || z.re == 1.0) {
        return Err(Error::BranchAmbiguity(format!("{z}")));
    }
    let l = law.lambda();
    let lin = (l - 2.0) * z + (1.0 - sigma);
    let root = l * (z - xm).sqrt() * (z - xp).sqrt();
    Ok((lin - root) / (2.0 * z * (1.0 - z)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolventFunctionals {
    /// `φ((I-U)⁻¹)`.
    #[serde(rename = "F")]
    pub f: f64,
    /// `φ((I-U)⁻²)`.
    #[serde(rename = "H")]
    pub h: f64,
}

/// `F` and `H` by quadrature plus atom terms; needs `θ > 1` and `x₊ < 1 - δ`.
pub fn resolvent_functionals(law: &FreeBinomialLaw, delta_guard: f64) -> Result<ResolventFunctionals> {
    if law.theta <= 1.0 || law.gap_to_one() <= delta_guard {
        return Err(Error::SupportTouchesOne);
    }
    let mu = discretize(&Law::Binomial(*law), DEFAULT_NODES)?;
    Ok(ResolventFunctionals {
        f: mu.integrate(|x| 1.0 / (1.0 - x)),
        h: mu.integrate(|x| (1.0 - x).powi(-2)),
    })
}

/// Either family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Law {
    Poisson(FreePoissonLaw),
    Binomial(FreeBinomialLaw),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentMethod {
    Series,
    Quadrature,
}

impl Law {
    pub fn poisson(lambda: f64, alpha: f64) -> Result<Self> {
        Ok(Law::Poisson(FreePoissonLaw::new(lambda, alpha)?))
    }

    pub fn binomial(sigma: f64, theta: f64) -> Result<Self> {
        Ok(Law::Binomial(FreeBinomialLaw::new(sigma, theta)?))
    }

    /// Support of the continuous part.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Law::Poisson(p) => p.support(),
            Law::Binomial(b) => b.support(),
        }
    }

    /// Atoms with positive mass.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let raw = match self {
            Law::Poisson(p) => vec![(0.0, p.atom_at_zero())],
            Law::Binomial(b) => vec![(0.0, b.atom_at_zero()), (1.0, b.atom_at_one())],
        };
        raw.into_iter().filter(|a| a.1 > 0.0).collect()
    }

    pub fn continuous_mass(&self) -> f64 {
        1.0 - self.atoms().iter().map(|a| a.1).sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        match self {
            Law::Poisson(p) => p.lambda * p.alpha,
            Law::Binomial(b) => b.mean(),
        }
    }

    /// `g` with density `= g(x)·√((x-x₋)(x₊-x))`, using the edge distances
    /// carried by the node for accuracy.
    fn reduced_density(&self, node: &EdgeNode) -> f64 {
        match self {
            Law::Poisson(p) => 1.0 / (2.0 * PI * p.alpha * node.x),
            Law::Binomial(b) => {
                let (xm, _) = b.support();
                let x = if xm == 0.0 { node.left } else { node.x };
                let one_minus_x = b.gap_to_one() + node.right;
                b.lambda() / (2.0 * PI * x * one_minus_x)
            }
        }
    }

    /// Density of the continuous part at an interior point.
    pub fn density(&self, x: f64) -> Result<f64> {
        let (a, b) = self.support();
        if !(x > a && x < b) {
            return Err(Error::OutsideSupport(x));
        }
        let node = EdgeNode { x, left: x - a, right: b - x, weight: 0.0 };
        Ok(self.reduced_density(&node) * ((x - a) * (b - x)).sqrt())
    }

    /// Atoms exactly, continuous part on `node_count` sine-substitution nodes.
    pub fn discretize(&self, node_count: usize) -> Result<SpectralMeasure> {
        discretize(self, node_count)
    }

    pub fn moments(&self, n_max: usize, method: MomentMethod) -> Result<Vec<f64>> {
        law_moments(self, n_max, method)
    }

    pub fn cdf_table(&self) -> CdfTable {
        CdfTable::new(self)
    }
}

/// Pointwise density of the continuous part.
pub fn density_eval(law: &Law, x: f64) -> Result<f64> {
    law.density(x)
}

pub fn discretize(law: &Law, node_count: usize) -> Result<SpectralMeasure> {
    if node_count < 16 {
        return Err(Error::InvalidParameters(format!("node_count = {node_count} < 16")));
    }
    let (a, b) = law.support();
    let nodes: Vec<(f64, f64)> = sqrt_edge_rule(a, b, node_count)
        .iter()
        .map(|n| (n.x, n.weight * law.reduced_density(n)))
        .filter(|n| n.1 > 0.0)
        .collect();
    let atoms = law.atoms();
    let lo = atoms.iter().map(|t| t.0).fold(a, f64::min);
    let hi = atoms.iter().map(|t| t.0).fold(b, f64::max);
    SpectralMeasure::new(atoms, nodes, lo, hi)
}

/// `m_1 ..= m_{n_max}` from closed-form cumulants/transforms or from quadrature.
pub fn law_moments(law: &Law, n_max: usize, method: MomentMethod) -> Result<Vec<f64>> {
    if n_max > MOMENT_CEILING {
        return Err(Error::SizeLimitExceeded { n: n_max, ceiling: MOMENT_CEILING });
    }
    if n_max == 0 {
        return Ok(Vec::new());
    }
    match (method, law) {
        (MomentMethod::Series, Law::Poisson(p)) => {
            Ok(moments_from_cumulants(&CumulantSequence::new(p.cumulants(n_max))?))
        }
        (MomentMethod::Series, Law::Binomial(b)) => {
            Ok(binomial_moment_series(&b.sigma, &b.theta, n_max)?.coeffs()[1..].to_vec())
        }
        (MomentMethod::Quadrature, _) => Ok(discretize(law, DEFAULT_NODES)?.moments(n_max)),
    }
}

/// `(φ(X⁻¹), φ(X⁻²))` for `ν(θ, α)`, closed form cross-checked by quadrature.
pub fn negative_moments(law: &FreePoissonLaw) -> Result<(f64, f64)> {
    let closed = law.negative_moments_closed()?;
    let quad = negative_moments_quadrature(law, DEFAULT_NODES)?;
    for (c, q) in [(closed.0, quad.0), (closed.1, quad.1)] {
        if (c - q).abs() > 1e-8 * c.abs().max(1.0) {
            return Err(Error::CrossCheckFailed(format!("closed form {c} vs quadrature {q}")));
        }
    }
    Ok(closed)
}

/// Quadrature values of `(φ(X⁻¹), φ(X⁻²))`; refuses supports closer to 0
/// than `1e-6` of their width.
pub fn negative_moments_quadrature(law: &FreePoissonLaw, node_count: usize) -> Result<(f64, f64)> {
    if law.lambda <= 1.0 {
        return Err(Error::AtomAtZero);
    }
    let (a, b) = law.support();
    if a < 1e-6 * (b - a) {
        return Err(Error::SingularIntegrand(format!("support starts at {a}, too close to the pole")));
    }
    let mu = discretize(&Law::Poisson(*law), node_count)?;
    Ok((mu.integrate(|x| 1.0 / x), mu.integrate(|x| 1.0 / (x * x))))
}

/// Cumulative distribution tabulated on a sine-substitution grid.
#[derive(Debug, Clone)]
pub struct CdfTable {
    atoms: Vec<(f64, f64)>,
    xs: Vec<f64>,
    /// Continuous mass on `(x₋, xs[i]]`.
    cum: Vec<f64>,
}

impl CdfTable {
    pub fn new(law: &Law) -> Self {
        let (a, b) = law.support();
        let width = b - a;
        let gl = gauss_legendre(8);
        let nodes: Vec<f64> = gl.nodes().collect();
        let phis: Vec<f64> = (0..=CDF_GRID).map(|i| FRAC_PI_2 * i as f64 / CDF_GRID as f64).collect();
        let xs: Vec<f64> = phis.iter().map(|p| a + width * p.sin().powi(2)).collect();
        let mut cum = Vec::with_capacity(xs.len());
        let mut acc = NeumaierSum::default();
        cum.push(0.0);
        for w in phis.windows(2) {
            let (p0, p1) = (w[0], w[1]);
            let half = 0.5 * (p1 - p0);
            let mid = 0.5 * (p1 + p0);
            let mut part = 0.0;
            for (u, wt) in nodes.iter().zip(gl.weights()) {
                let phi = mid + half * u;
                let (s, c) = phi.sin_cos();
                let left = width * s * s;
                let right = width * c * c;
                let node = EdgeNode { x: a + left, left, right, weight: 0.0 };
                // density · dx/dφ = g(x)·√(left·right)·2·width·s·c
                part += wt * law.reduced_density(&node) * 2.0 * left * right;
            }
            acc.add(part * half);
            cum.push(acc.value());
        }
        // pin the total to the exact continuous mass
        let total = *cum.last().expect("grid is nonempty");
        let target = law.continuous_mass();
        if total > 0.0 {
            for v in &mut cum {
                *v *= target / total;
            }
        }
        CdfTable { atoms: law.atoms(), xs, cum }
    }

    fn continuous_cdf(&self, x: f64) -> f64 {
        let (lo, hi) = (self.xs[0], *self.xs.last().expect("grid is nonempty"));
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return *self.cum.last().expect("grid is nonempty");
        }
        let i = self.xs.partition_point(|&g| g <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.cum[i] + t * (self.cum[i + 1] - self.cum[i])
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.0 <= x).map(|a| a.1).sum();
        (atoms + self.continuous_cdf(x)).min(1.0)
    }

    /// `P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|a| a.0 < x).map(|a| a.1).sum();
        (atoms + self.continuous_cdf(x)).min(1.0)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Inverse-CDF draw: atom with its probability, otherwise linear
    /// interpolation of the tabulated continuous CDF.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random())
    }

    /// Generalized inverse of the CDF at `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let mut u = u;
        for &(x, m) in &self.atoms {
            if u < m {
                return x;
            }
            u -= m;
        }
        let total = *self.cum.last().expect("grid is nonempty");
        let target = u.min(total);
        let i = self.cum.partition_point(|&c| c < target).clamp(1, self.cum.len() - 1);
        let (c0, c1) = (self.cum[i - 1], self.cum[i]);
        let t = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.0 };
        self.xs[i - 1] + t * (self.xs[i] - self.xs[i - 1])
    }
}

/// One draw; builds the CDF table on each call, so prefer [`CdfTable::sample`]
/// for repeated sampling.
pub fn sample<R: Rng + ?Sized>(law: &Law, rng: &mut R) -> f64 {
    CdfTable::new(law).sample(rng)
}

/// `(x, density)` on `points` equispaced interior points of the support.
pub fn density_grid(law: &Law, points: usize) -> Result<Vec<(f64, f64)>> {
    if points == 0 {
        return Err(Error::InvalidParameters("need at least one grid point".into()));
    }
    let (a, b) = law.support();
    (1..=points)
        .map(|i| {
            let x = a + (b - a) * i as f64 / (points + 1) as f64;
            Ok((x, law.density(x)?))
        })
        .collect()
}

/// `x,density` table on the [`density_grid`] points.
pub fn density_csv(law: &Law, points: usize) -> Result<String> {
    let mut out = String::from("x,density\n");
    for (x, y) in density_grid(law, points)? {
        writeln!(out, "{x:.12e},{y:.12e}").expect("writing to a String");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rational, Rational};
    use rand::SeedableRng;

    #[test]
    fn free_poisson_density_and_support() {
        let law = Law::poisson(1.0, 1.0).unwrap();
        assert_eq!(law.support(), (0.0, 4.0));
        // (1/(2π·2))·√(2·2)
        assert!((law.density(2.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(law.density(4.5), Err(Error::OutsideSupport(4.5)));
    }

    #[test]
    fn free_binomial_density_at_half() {
        let law = Law::binomial(1.0, 1.0).unwrap();
        assert_eq!(law.support(), (0.0, 1.0));
        assert!((law.density(0.5).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!(law.atoms().is_empty());
    }

    #[test]
    fn binomial_support_matches_formula() {
        for (s, t) in [(1.0, 2.0), (2.0, 3.0), (0.5, 2.0), (3.0, 0.7)] {
            let l: f64 = s + t;
            let p = (s / l * (1.0 - 1.0 / l)).sqrt();
            let q = (1.0 / l * (1.0 - s / l)).sqrt();
            let (xm, xp) = FreeBinomialLaw::new(s, t).unwrap().support();
            assert!((xm - (p - q).powi(2)).abs() < 1e-14);
            assert!((xp - (p + q).powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn binomial_rejects_inadmissible() {
        assert!(FreeBinomialLaw::new(0.4, 0.4).is_err());
        assert!(FreeBinomialLaw::new(f64::NAN, 2.0).is_err());
        assert!(FreePoissonLaw::new(0.0, 1.0).is_err());
    }

    #[test]
    fn binomial_series_mean_and_exactness() {
        let m = binomial_moment_series(&rational(1, 1), &rational(1, 1), 3).unwrap();
        assert_eq!(m.coeffs()[1], rational(1, 2));
        let m = binomial_moment_series(&rational(1, 1), &rational(2, 1), 2).unwrap();
        assert_eq!(m.coeffs()[0], Rational::from_i64(1));
        assert_eq!(m.coeffs()[1], rational(1, 3));
    }

    #[test]
    fn negative_moment_examples() {
        let (a, b) = negative_moments(&FreePoissonLaw::new(2.0, 1.0).unwrap()).unwrap();
        assert!((a - 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
        let (a, b) = negative_moments(&FreePoissonLaw::new(3.0, 2.0).unwrap()).unwrap();
        assert!((a - 0.25).abs() < 1e-12 && (b - 3.0 / 32.0).abs() < 1e-12);
        assert_eq!(negative_moments(&FreePoissonLaw::new(1.0, 1.0).unwrap()), Err(Error::AtomAtZero));
    }

    #[test]
    fn discretize_atoms() {
        let mu = discretize(&Law::poisson(0.5, 1.0).unwrap(), 64).unwrap();
        assert_eq!(mu.atoms(), &[(0.0, 0.5)]);
        assert!(discretize(&Law::poisson(0.5, 1.0).unwrap(), 8).is_err());
    }

    #[test]
    fn cdf_endpoints() {
        let t = Law::binomial(0.5, 2.0).unwrap().cdf_table();
        assert_eq!(t.cdf(-1.0), 0.0);
        assert!((t.cdf(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(t.cdf_left(0.0), 0.0);
        assert!((t.cdf(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn samples_stay_in_unit_interval() {
        let t = Law::binomial(0.5, 0.8).unwrap().cdf_table();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        assert!((0..10_000).map(|_| t.sample(&mut rng)).all(|x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn csv_header_and_monotone_x() {
        let csv = density_csv(&Law::poisson(2.0, 1.0).unwrap(), 5).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,density"));
        let xs: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        assert_eq!(xs.len(), 5);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }
}
