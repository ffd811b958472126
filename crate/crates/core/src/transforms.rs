//! r-, S- and moment-series transforms, and free convolutions at series level.

use crate::error::{Error, Result};
use crate::freemoments::{cumulants_from_moments, CumulantSequence};
use crate::series::{Scalar, Series};

/// `r(z) = Σ κ_{n+1} z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RTransform<T> {
    series: Series<T>,
}

/// Expansion of the S-transform at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct STransform<T> {
    series: Series<T>,
}

/// `M(z) = Σ φ(X^n) z^n` with `M(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeries<T> {
    series: Series<T>,
}

impl<T: Scalar> RTransform<T> {
    pub fn new(series: Series<T>) -> Self {
        RTransform { series }
    }

    pub fn series(&self) -> &Series<T> {
        &self.series
    }

    pub fn mean(&self) -> &T {
        &self.series.coeffs()[0]
    }

    /// `κ_1 ..= κ_{order+1}`.
    pub fn cumulants(&self) -> CumulantSequence<T> {
        CumulantSequence::new(self.series.coeffs().to_vec()).expect("series is nonempty")
    }
}

impl<T: Scalar> STransform<T> {
    pub fn new(series: Series<T>) -> Self {
        STransform { series }
    }

    pub fn series(&self) -> &Series<T> {
        &self.series
    }
}

impl<T: Scalar> MomentSeries<T> {
    pub fn new(series: Series<T>) -> Result<Self> {
        if !series.coeffs()[0].is_one() {
            return Err(Error::InvalidParameters("moment series must start with 1".into()));
        }
        Ok(MomentSeries { series })
    }

    /// From `m_1 ..= m_N`.
    pub fn from_moments(m: &[T]) -> Self {
        MomentSeries { series: Series::from_fn(m.len(), |n| if n == 0 { T::one() } else { m[n - 1].clone() }) }
    }

    pub fn series(&self) -> &Series<T> {
        &self.series
    }

    /// `m_1 ..= m_N`.
    pub fn moments(&self) -> &[T] {
        &self.series.coeffs()[1..]
    }
}

/// Coefficient shift `κ_{n+1} → z^n`.
pub fn r_from_cumulants<T: Scalar>(k: &CumulantSequence<T>) -> RTransform<T> {
    RTransform { series: Series::new(k.values().to_vec()).expect("cumulant sequence is nonempty") }
}

pub fn r_from_moments<T: Scalar>(m: &MomentSeries<T>) -> Result<RTransform<T>> {
    Ok(r_from_cumulants(&cumulants_from_moments(m.moments())?))
}

/// Free additive convolution: r-transforms add.
pub fn free_add<T: Scalar>(a: &RTransform<T>, b: &RTransform<T>) -> RTransform<T> {
    RTransform { series: &a.series + &b.series }
}

/// `S(z) = R^{<-1>}(z) / z` with `R(z) = z r(z)`.
pub fn s_from_r<T: Scalar>(a: &RTransform<T>) -> Result<STransform<T>> {
    if a.mean().is_zero() {
        return Err(Error::ZeroMean);
    }
    let big_r = Series::from_fn(a.series.order() + 1, |n| {
        if n == 0 {
            T::zero()
        } else {
            a.series.coeffs()[n - 1].clone()
        }
    });
    Ok(STransform { series: big_r.comp_inverse()?.div_z()? })
}

/// S-transform straight from moments: with `ψ = M - 1` and `χ = ψ^{<-1>}`,
/// `S(z) = χ(z)(1+z)/z`.
pub fn s_from_moments<T: Scalar>(m: &MomentSeries<T>) -> Result<STransform<T>> {
    if m.series.order() == 0 {
        return Err(Error::OrderTooLow { needed: 1, got: 0 });
    }
    if m.series.coeffs()[1].is_zero() {
        return Err(Error::ZeroMean);
    }
    let psi = m.series.add_constant(&-T::one());
    let chi = psi.comp_inverse()?.div_z()?;
    let one_plus_z = Series::one(chi.order()) + Series::variable(chi.order());
    Ok(STransform { series: chi.mul_series(&one_plus_z) })
}

/// Moments `m_1..m_n` of the free multiplicative convolution: with
/// `S = S_a S_b`, invert `χ(z) = z S(z)/(1+z)` and read `M = 1 + χ^{<-1>}`.
pub fn free_mult<T: Scalar>(a: &STransform<T>, b: &STransform<T>, n: usize) -> Result<MomentSeries<T>> {
    if n == 0 {
        return Ok(MomentSeries { series: Series::one(0) });
    }
    let got = a.series.order().min(b.series.order());
    if got + 1 < n {
        return Err(Error::OrderTooLow { needed: n - 1, got });
    }
    let s = a.series.truncate(n - 1).mul_series(&b.series.truncate(n - 1));
    let zs = Series::from_fn(n, |k| if k == 0 { T::zero() } else { s.coeffs()[k - 1].clone() });
    let one_plus_z = Series::one(n) + Series::variable(n);
    let chi = zs.try_div(&one_plus_z)?;
    let psi = chi.comp_inverse()?;
    MomentSeries::new(psi.add_constant(&T::one()))
}

/// Coefficients of `g(u(z)) - z` at `z^1 ..= z^n`, where `g(z) = Σ m_k z^{k+1}`
/// and `u(z) = z / (1 + z r(z))`; this is `G(r(w) + 1/w) = w` cleared of poles.
pub fn verify_cauchy_relation<T: Scalar>(m: &MomentSeries<T>, r: &RTransform<T>, n: usize) -> Result<Vec<T>> {
    if m.series.order() + 1 < n {
        return Err(Error::OrderTooLow { needed: n - 1, got: m.series.order() });
    }
    if r.series.order() + 2 < n {
        return Err(Error::OrderTooLow { needed: n.saturating_sub(2), got: r.series.order() });
    }
    let g = Series::from_fn(n, |k| if k == 0 { T::zero() } else { m.series.coeffs()[k - 1].clone() });
    let den = Series::from_fn(n, |k| if k == 0 { T::one() } else { r.series.coeff(k - 1).cloned().unwrap_or_else(T::zero) });
    let u = Series::variable(n).try_div(&den)?;
    let res = g.compose(&u)? - Series::variable(n);
    Ok(res.coeffs()[1..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freemoments::moments_from_cumulants;
    use crate::series::{rational, Rational};

    fn poisson_r(lambda: i64, alpha: i64, order: usize) -> RTransform<Rational> {
        let k: Vec<Rational> = (1..=order + 1).map(|n| rational(lambda * alpha.pow(n as u32), 1)).collect();
        r_from_cumulants(&CumulantSequence::new(k).unwrap())
    }

    #[test]
    fn r_of_free_poisson_is_geometric() {
        let r = poisson_r(3, 2, 6);
        // λα/(1-αz)
        let expected = Series::from_fn(6, |n| rational(3 * 2i64.pow(n as u32 + 1), 1));
        assert_eq!(r.series(), &expected);
    }

    #[test]
    fn r_of_point_mass_and_semicircle() {
        let a = rational(5, 2);
        let r = r_from_cumulants(&CumulantSequence::new(vec![a.clone(), rational(0, 1), rational(0, 1)]).unwrap());
        assert_eq!(r.series(), &Series::constant(a, 2));
        let r = r_from_cumulants(&CumulantSequence::new(vec![rational(0, 1), rational(1, 1), rational(0, 1)]).unwrap());
        assert_eq!(r.series(), &Series::variable(2));
    }

    #[test]
    fn free_poisson_add() {
        let s = free_add(&poisson_r(1, 1, 8), &poisson_r(2, 1, 8));
        assert_eq!(s, poisson_r(3, 1, 8));
        let zero = RTransform::new(Series::zero(8));
        assert_eq!(free_add(&poisson_r(2, 1, 8), &zero), poisson_r(2, 1, 8));
    }

    #[test]
    fn s_of_free_poisson() {
        // 1/(αλ + αz) with λ=3, α=2
        let s = s_from_r(&poisson_r(3, 2, 8)).unwrap();
        let den = Series::from_fn(8, |n| match n {
            0 => rational(6, 1),
            1 => rational(2, 1),
            _ => rational(0, 1),
        });
        assert_eq!(s.series(), &Series::one(8).try_div(&den).unwrap());
    }

    #[test]
    fn s_of_delta_one_is_one() {
        let r = r_from_cumulants(&CumulantSequence::new(vec![rational(1, 1), rational(0, 1), rational(0, 1)]).unwrap());
        assert_eq!(s_from_r(&r).unwrap().series(), &Series::one(2));
    }

    #[test]
    fn zero_mean_rejected() {
        let r: RTransform<f64> = RTransform::new(Series::variable(4));
        assert_eq!(s_from_r(&r), Err(Error::ZeroMean));
    }

    #[test]
    fn s_routes_agree() {
        let r = poisson_r(2, 1, 9);
        let m = MomentSeries::from_moments(&moments_from_cumulants(&r.cumulants()));
        assert_eq!(s_from_moments(&m).unwrap().series().truncate(8), s_from_r(&r).unwrap().series().truncate(8));
    }

    #[test]
    fn mult_by_delta_one_returns_moments() {
        let r = poisson_r(2, 1, 10);
        let m = moments_from_cumulants(&r.cumulants());
        let s = s_from_r(&r).unwrap();
        let one = STransform::new(Series::one(10));
        let out = free_mult(&s, &one, 10).unwrap();
        assert_eq!(out.moments(), &m[..10]);
    }

    #[test]
    fn cauchy_relation() {
        let a = rational(7, 3);
        let r = r_from_cumulants(&CumulantSequence::new(vec![a.clone(); 1].into_iter().chain(vec![rational(0, 1); 9]).collect()).unwrap());
        let m = MomentSeries::from_moments(&(1..=10).map(|k| num_traits::pow(a.clone(), k)).collect::<Vec<_>>());
        assert!(verify_cauchy_relation(&m, &r, 10).unwrap().iter().all(|x| *x == rational(0, 1)));

        let r2 = poisson_r(2, 1, 10);
        let m2 = MomentSeries::from_moments(&moments_from_cumulants(&r2.cumulants()));
        assert!(verify_cauchy_relation(&m2, &r2, 10).unwrap().iter().all(|x| *x == rational(0, 1)));

        let res = verify_cauchy_relation(&m2, &poisson_r(3, 1, 10), 10).unwrap();
        let first = res.iter().position(|x| *x != rational(0, 1));
        assert_eq!(first, Some(1));
    }
}
