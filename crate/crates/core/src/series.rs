//! Truncated formal power series over an exact rational field or `f64`.
//!
//! A [`Series`] of order `N` stores the coefficients of `z^0 ..= z^N`; every
//! coefficient above `N` is unknown, so binary operations truncate to the
//! smaller of the two operand orders.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Default truncation order used by the higher-level modules.
pub const DEFAULT_ORDER: usize = 16;

/// Arbitrary-precision rational scalar.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Rational,
    Float,
}

/// Coefficient field of a [`Series`].
pub trait Scalar: Num + Neg<Output = Self> + Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    const KIND: ScalarKind;

    /// Rationals are always admissible; floats must be finite.
    fn is_admissible(&self) -> bool;

    /// Lossy conversion used for reporting and tolerance checks.
    fn to_f64(&self) -> f64;

    fn from_i64(v: i64) -> Self;
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn is_admissible(&self) -> bool {
        self.is_finite()
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for Rational {
    const KIND: ScalarKind = ScalarKind::Rational;

    fn is_admissible(&self) -> bool {
        !self.denom().is_zero()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
}

/// Shorthand for the rational `n/d`.
pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_f64(x).ok_or(Error::NonFiniteScalar(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Power series truncated at `order` (inclusive).
#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Series<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_admissible()) {
            return Err(Error::NonFiniteScalar(bad.to_f64()));
        }
        Ok(Series { coeffs })
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> T) -> Self {
        Series { coeffs: (0..=order).map(f).collect() }
    }

    pub fn zero(order: usize) -> Self {
        Self::from_fn(order, |_| T::zero())
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(T::one(), order)
    }

    /// The series `z`.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = T::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `z^n`, `None` above the truncation order.
    pub fn coeff(&self, n: usize) -> Option<&T> {
        self.coeffs.get(n)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order());
        Series { coeffs: self.coeffs[..=keep].to_vec() }
    }

    pub fn scale(&self, c: &T) -> Self {
        Series { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    /// `f + c`.
    pub fn add_constant(&self, c: &T) -> Self {
        let mut s = self.clone();
        s.coeffs[0] = s.coeffs[0].clone() + c.clone();
        s
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let order = self.order().min(other.order());
        Self::from_fn(order, |n| f(self.coeffs[n].clone(), other.coeffs[n].clone()))
    }

    pub fn mul_series(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_fn(order, |n| {
            let mut acc = T::zero();
            for k in 0..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc = acc + self.coeffs[k].clone() * other.coeffs[n - k].clone();
            }
            acc
        })
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let b0 = &self.coeffs[0];
        if b0.is_zero() {
            return Err(Error::DivisionByZeroConstantTerm);
        }
        let inv0 = T::one() / b0.clone();
        let mut out: Vec<T> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for n in 1..=self.order() {
            let mut acc = T::zero();
            for k in 1..=n {
                acc = acc + self.coeffs[k].clone() * out[n - k].clone();
            }
            out.push(-(acc * inv0.clone()));
        }
        Ok(Series { coeffs: out })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_series(&other.inverse()?))
    }

    /// `z·f`; the top coefficient falls off the truncation window.
    pub fn mul_z(&self) -> Self {
        Self::from_fn(self.order(), |n| if n == 0 { T::zero() } else { self.coeffs[n - 1].clone() })
    }

    /// `f/z` for `f(0) = 0`; the result is known to one order less.
    pub fn div_z(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::DivisionByZeroConstantTerm);
        }
        if self.order() == 0 {
            return Err(Error::EmptySeries);
        }
        Ok(Series { coeffs: self.coeffs[1..].to_vec() })
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..k {
            acc = acc.mul_series(self);
        }
        acc
    }

    /// `f ∘ g` by Horner nesting; `g(0)` must vanish.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantInnerTerm);
        }
        let order = self.order().min(inner.order());
        let g = inner.truncate(order);
        let mut acc = Self::constant(self.coeffs[order].clone(), order);
        for k in (0..order).rev() {
            acc = acc.mul_series(&g).add_constant(&self.coeffs[k]);
        }
        Ok(acc)
    }

    /// Compositional inverse `g` with `f∘g = z`, solved degree by degree.
    pub fn comp_inverse(&self) -> Result<Self> {
        if self.order() == 0 || !self.coeffs[0].is_zero() || self.coeffs[1].is_zero() {
            return Err(Error::NotInvertible);
        }
        let order = self.order();
        let f1 = self.coeffs[1].clone();
        let mut g = Self::zero(order);
        g.coeffs[1] = T::one() / f1.clone();
        for k in 2..=order {
            // only the window up to degree k matters for the k-th correction
            let fk = self.truncate(k);
            let gk = g.truncate(k);
            let err = fk.compose(&gk)?.coeffs[k].clone();
            g.coeffs[k] = g.coeffs[k].clone() - err / f1.clone();
        }
        Ok(g)
    }

    /// Square root with prescribed constant term `root` (`root² = f(0)`).
    pub fn sqrt_with_root(&self, root: T) -> Result<Self> {
        if root.is_zero() {
            return Err(Error::DivisionByZeroConstantTerm);
        }
        let two_root = root.clone() + root.clone();
        let mut out: Vec<T> = vec![root];
        for n in 1..=self.order() {
            let mut acc = self.coeffs[n].clone();
            for k in 1..n {
                acc = acc - out[k].clone() * out[n - k].clone();
            }
            out.push(acc / two_root.clone());
        }
        Ok(Series { coeffs: out })
    }

    /// Explicit lossy conversion to floats.
    pub fn to_f64_series(&self) -> Series<f64> {
        Series { coeffs: self.coeffs.iter().map(Scalar::to_f64).collect() }
    }

    /// Largest coefficient magnitude, as a float.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }
}

impl Series<f64> {
    /// Exact conversion of every float coefficient to a rational.
    pub fn to_rational_series(&self) -> Result<Series<Rational>> {
        let coeffs = self.coeffs.iter().map(|&c| rational_from_f64(c)).collect::<Result<Vec<_>>>()?;
        Ok(Series { coeffs })
    }
}

/// Checked binary operation; `Div` fails on a zero constant term.
pub fn arith<T: Scalar>(a: &Series<T>, b: &Series<T>, op: ArithOp) -> Result<Series<T>> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.try_div(b)?,
    })
}

impl<T: Scalar> Add for &Series<T> {
    type Output = Series<T>;
    fn add(self, rhs: &Series<T>) -> Series<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &Series<T> {
    type Output = Series<T>;
    fn sub(self, rhs: &Series<T>) -> Series<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Mul for &Series<T> {
    type Output = Series<T>;
    fn mul(self, rhs: &Series<T>) -> Series<T> {
        self.mul_series(rhs)
    }
}

impl<T: Scalar> Neg for &Series<T> {
    type Output = Series<T>;
    fn neg(self) -> Series<T> {
        Series { coeffs: self.coeffs.iter().cloned().map(Neg::neg).collect() }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for Series<T> {
            type Output = Series<T>;
            fn $m(self, rhs: Series<T>) -> Series<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Scalar> $tr<&Series<T>> for Series<T> {
            type Output = Series<T>;
            fn $m(self, rhs: &Series<T>) -> Series<T> {
                (&self).$m(rhs)
            }
        }
        impl<T: Scalar> $tr<Series<T>> for &Series<T> {
            type Output = Series<T>;
            fn $m(self, rhs: Series<T>) -> Series<T> {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl<T: Scalar> Neg for Series<T> {
    type Output = Series<T>;
    fn neg(self) -> Series<T> {
        -&self
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Series<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

/// A series whose scalar kind is only known at runtime (CLI input, reports).
#[derive(Debug, Clone, PartialEq)]
pub enum DynSeries {
    Rational(Series<Rational>),
    Float(Series<f64>),
}

impl DynSeries {
    pub fn kind(&self) -> ScalarKind {
        match self {
            DynSeries::Rational(_) => ScalarKind::Rational,
            DynSeries::Float(_) => ScalarKind::Float,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            DynSeries::Rational(s) => s.order(),
            DynSeries::Float(s) => s.order(),
        }
    }

    /// Mixing kinds is an error; use [`DynSeries::to_float`] to convert explicitly.
    pub fn arith(&self, other: &DynSeries, op: ArithOp) -> Result<DynSeries> {
        match (self, other) {
            (DynSeries::Rational(a), DynSeries::Rational(b)) => arith(a, b, op).map(DynSeries::Rational),
            (DynSeries::Float(a), DynSeries::Float(b)) => arith(a, b, op).map(DynSeries::Float),
            _ => Err(Error::ScalarKindMismatch),
        }
    }

    pub fn to_float(&self) -> DynSeries {
        match self {
            DynSeries::Rational(s) => DynSeries::Float(s.to_f64_series()),
            DynSeries::Float(_) => self.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(v: &[(i64, i64)]) -> Series<Rational> {
        Series::new(v.iter().map(|&(n, d)| rational(n, d)).collect()).unwrap()
    }

    fn qi(v: &[i64]) -> Series<Rational> {
        Series::new(v.iter().map(|&n| rational(n, 1)).collect()).unwrap()
    }

    #[test]
    fn telescoping_product() {
        let a = qi(&[1, 1, 0, 0, 0]);
        let b = qi(&[1, -1, 0, 0, 0]);
        assert_eq!(&a * &b, qi(&[1, 0, -1, 0, 0]));
    }

    #[test]
    fn geometric_series_by_division() {
        let one = Series::<Rational>::one(6);
        let b = qi(&[1, -1, 0, 0, 0, 0, 0]);
        assert_eq!(arith(&one, &b, ArithOp::Div).unwrap(), qi(&[1; 7]));
    }

    #[test]
    fn long_division_alternating() {
        // 2/(1-z) divided by (1+z) = 2/(1-z^2)
        let num = qi(&[2, 2, 2, 2, 2]);
        let den = qi(&[1, 1, 0, 0, 0]);
        assert_eq!(num.try_div(&den).unwrap(), qi(&[2, 0, 2, 0, 2]));
    }

    #[test]
    fn division_by_zero_constant_term() {
        let a = qi(&[1, 1]);
        let b = qi(&[0, 1]);
        assert_eq!(arith(&a, &b, ArithOp::Div), Err(Error::DivisionByZeroConstantTerm));
    }

    #[test]
    fn mixed_kinds_rejected() {
        let a = DynSeries::Rational(qi(&[1, 2]));
        let b = DynSeries::Float(Series::new(vec![1.0, 2.0]).unwrap());
        assert_eq!(a.arith(&b, ArithOp::Add), Err(Error::ScalarKindMismatch));
        let sum = a.to_float().arith(&b, ArithOp::Add).unwrap();
        assert_eq!(sum, DynSeries::Float(Series::new(vec![2.0, 4.0]).unwrap()));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(Series::new(vec![1.0, f64::NAN]), Err(Error::NonFiniteScalar(_))));
        assert_eq!(Series::<f64>::new(vec![]), Err(Error::EmptySeries));
    }

    #[test]
    fn orders_take_minimum() {
        let a = qi(&[1, 2, 3, 4]);
        let b = qi(&[1, 1]);
        assert_eq!((&a + &b).order(), 1);
        assert_eq!((&a * &b).order(), 1);
    }

    #[test]
    fn compose_identity_inner() {
        let f = q(&[(1, 2), (3, 1), (-5, 7), (2, 3)]);
        let z = Series::<Rational>::variable(3);
        assert_eq!(f.compose(&z).unwrap(), f);
    }

    #[test]
    fn compose_square_of_z_plus_z2() {
        let f = qi(&[0, 0, 1, 0, 0, 0]);
        let g = qi(&[0, 1, 1, 0, 0, 0]);
        assert_eq!(f.compose(&g).unwrap(), qi(&[0, 0, 1, 2, 1, 0]));
    }

    #[test]
    fn compose_geometric_with_z_squared() {
        let f = qi(&[1; 7]);
        let g = qi(&[0, 0, 1, 0, 0, 0, 0]);
        assert_eq!(f.compose(&g).unwrap(), qi(&[1, 0, 1, 0, 1, 0, 1]));
    }

    #[test]
    fn compose_rejects_constant_inner() {
        let f = qi(&[1, 1]);
        assert_eq!(f.compose(&qi(&[1, 1])), Err(Error::NonzeroConstantInnerTerm));
    }

    #[test]
    fn inverse_of_identity() {
        let z = Series::<Rational>::variable(6);
        assert_eq!(z.comp_inverse().unwrap(), z);
    }

    #[test]
    fn inverse_gives_catalan_numbers() {
        // oracle: iterate g <- z + g^2 termwise, exact rationals
        let order = 8;
        let z = Series::<Rational>::variable(order);
        let mut g = z.clone();
        for _ in 0..=order {
            g = &z + &(&g * &g);
        }
        let f = qi(&[0, 1, -1, 0, 0, 0, 0, 0, 0]);
        let inv = f.comp_inverse().unwrap();
        assert_eq!(inv, g);
        assert_eq!(&inv.coeffs()[..5], qi(&[0, 1, 1, 2, 5]).coeffs());
    }

    #[test]
    fn inverse_of_linear_scaling() {
        let f = qi(&[0, 2, 0, 0]);
        assert_eq!(f.comp_inverse().unwrap(), q(&[(0, 1), (1, 2), (0, 1), (0, 1)]));
    }

    #[test]
    fn inverse_preconditions() {
        assert_eq!(qi(&[1, 1, 0]).comp_inverse(), Err(Error::NotInvertible));
        assert_eq!(qi(&[0, 0, 1]).comp_inverse(), Err(Error::NotInvertible));
    }

    #[test]
    fn sqrt_of_square() {
        let a = qi(&[3, 1, -2, 5, 0, 1]);
        let sq = &a * &a;
        assert_eq!(sq.sqrt_with_root(rational(3, 1)).unwrap(), a);
    }

    #[test]
    fn float_geometric_series() {
        let b = Series::new(vec![1.0, -0.5, 0.0, 0.0]).unwrap();
        let inv = b.inverse().unwrap();
        assert_eq!(inv.coeffs(), &[1.0, 0.5, 0.25, 0.125]);
    }

    fn rational_series(order: usize) -> impl Strategy<Value = Series<Rational>> {
        prop::collection::vec((-20i64..20, 1i64..9), order + 1)
            .prop_map(|v| Series::new(v.into_iter().map(|(n, d)| rational(n, d)).collect()).unwrap())
    }

    fn invertible_series(order: usize) -> impl Strategy<Value = Series<Rational>> {
        (rational_series(order), 1i64..6, any::<bool>()).prop_map(|(mut s, lead, neg)| {
            s.coeffs[0] = Rational::zero();
            s.coeffs[1] = rational(if neg { -lead } else { lead }, 1);
            s
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ring_laws_exact(a in rational_series(10), b in rational_series(10), c in rational_series(10)) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn compose_with_inverse_is_identity(f in invertible_series(12)) {
            let g = f.comp_inverse().unwrap();
            let z = Series::<Rational>::variable(12);
            prop_assert_eq!(f.compose(&g).unwrap(), z.clone());
            prop_assert_eq!(g.compose(&f).unwrap(), z);
        }

        #[test]
        fn div_then_mul_roundtrips(a in rational_series(8), mut b in rational_series(8), b0 in 1i64..5) {
            b.coeffs[0] = rational(b0, 1);
            let quotient = a.try_div(&b).unwrap();
            prop_assert_eq!(&quotient * &b, a);
        }
    }
}
