//! Moment/cumulant conversion, joint cumulants and trace evaluation of words in
//! two free commutative algebras generated by `U` and `V`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ncpart::{enumerate_nc_with_ceiling, DEFAULT_NC_CEILING};
use crate::quadrature::NeumaierSum;
use crate::series::{Scalar, Series};

/// Default ceiling on the (cyclically reduced) word length.
pub const DEFAULT_WORD_CEILING: usize = 32;

/// Atoms plus quadrature nodes for the continuous part of a distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
    nodes: Vec<(f64, f64)>,
    lo: f64,
    hi: f64,
}

impl SpectralMeasure {
    pub fn new(atoms: Vec<(f64, f64)>, nodes: Vec<(f64, f64)>, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidMeasure(format!("bad support bounds ({lo}, {hi})")));
        }
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        for &(x, m) in &atoms {
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::InvalidMeasure(format!("atom mass {m} at {x}")));
            }
            if !(x >= lo - slack && x <= hi + slack) {
                return Err(Error::InvalidMeasure(format!("atom {x} outside [{lo}, {hi}]")));
            }
        }
        for &(x, w) in &nodes {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidMeasure(format!("node weight {w} at {x}")));
            }
            if !(x >= lo - slack && x <= hi + slack) {
                return Err(Error::InvalidMeasure(format!("node {x} outside [{lo}, {hi}]")));
            }
        }
        let mu = SpectralMeasure { atoms, nodes, lo, hi };
        let tol = if mu.nodes.is_empty() { 1e-14 } else { 1e-10 };
        let total = mu.total_mass();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidMeasure(format!("total mass {total}")));
        }
        Ok(mu)
    }

    /// Finitely supported measure; support bounds are the extreme atoms.
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let lo = atoms.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
        let hi = atoms.iter().map(|a| a.0).fold(f64::NEG_INFINITY, f64::max);
        Self::new(atoms, Vec::new(), lo, hi)
    }

    pub fn point_mass(a: f64) -> Result<Self> {
        Self::from_atoms(vec![(a, 1.0)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).chain(self.nodes.iter().map(|n| n.1)).collect::<NeumaierSum>().value()
    }

    /// `∫ f dμ` with compensated summation; atoms of zero mass are skipped.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = NeumaierSum::default();
        for &(x, m) in self.atoms.iter().filter(|a| a.1 > 0.0) {
            acc.add(m * f(x));
        }
        for &(x, w) in &self.nodes {
            acc.add(w * f(x));
        }
        acc.value()
    }

    /// `m_1 ..= m_n`.
    pub fn moments(&self, n: usize) -> Vec<f64> {
        (1..=n as i32).map(|k| self.integrate(|x| x.powi(k))).collect()
    }
}

/// Which of the two free algebras an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    U,
    V,
}

/// The function `x^{half_exp/2} (1-x)^{one_minus_exp}` of one variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ElementSpec {
    half_exp: i32,
    one_minus_exp: i32,
}

impl ElementSpec {
    pub const IDENTITY: ElementSpec = ElementSpec { half_exp: 0, one_minus_exp: 0 };

    /// `x^k`, `k` possibly negative.
    pub fn power(k: i32) -> Self {
        ElementSpec { half_exp: 2 * k, one_minus_exp: 0 }
    }

    /// `x^{k/2}`.
    pub fn half_power(k: i32) -> Self {
        ElementSpec { half_exp: k, one_minus_exp: 0 }
    }

    /// `(1-x)^{-p}`.
    pub fn resolvent_one_minus(p: u32) -> Self {
        ElementSpec { half_exp: 0, one_minus_exp: -(p as i32) }
    }

    /// `(1-x)^p`.
    pub fn one_minus(p: u32) -> Self {
        ElementSpec { half_exp: 0, one_minus_exp: p as i32 }
    }

    pub fn half_exp(&self) -> i32 {
        self.half_exp
    }

    pub fn one_minus_exp(&self) -> i32 {
        self.one_minus_exp
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Pointwise product of the two functions.
    pub fn times(self, other: ElementSpec) -> Self {
        ElementSpec {
            half_exp: self.half_exp + other.half_exp,
            one_minus_exp: self.one_minus_exp + other.one_minus_exp,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let p = if self.half_exp % 2 == 0 {
            x.powi(self.half_exp / 2)
        } else {
            x.sqrt().powi(self.half_exp)
        };
        if self.one_minus_exp == 0 {
            p
        } else {
            p * (1.0 - x).powi(self.one_minus_exp)
        }
    }

    /// Rejects functions with a pole (or branch point) on `[lo, hi]`.
    pub fn check_integrable(&self, lo: f64, hi: f64) -> Result<()> {
        if self.half_exp < 0 && lo <= 0.0 {
            return Err(Error::SingularIntegrand(format!("negative power on support starting at {lo}")));
        }
        if self.half_exp % 2 != 0 && lo < 0.0 {
            return Err(Error::SingularIntegrand(format!("half power on support starting at {lo}")));
        }
        if self.one_minus_exp < 0 && hi >= 1.0 {
            return Err(Error::SingularIntegrand(format!("(1-x) resolvent on support reaching {hi}")));
        }
        Ok(())
    }
}

/// `∫ f dμ` for an element spec `f`.
pub fn measure_moment(mu: &SpectralMeasure, f: ElementSpec) -> Result<f64> {
    if f.is_identity() {
        return Ok(1.0);
    }
    f.check_integrable(mu.lo, mu.hi)?;
    Ok(mu.integrate(|x| f.eval(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Element {
    pub side: Side,
    pub spec: ElementSpec,
}

impl Element {
    pub fn u(spec: ElementSpec) -> Self {
        Element { side: Side::U, spec }
    }

    pub fn v(spec: ElementSpec) -> Self {
        Element { side: Side::V, spec }
    }
}

/// A product of elements in normal form: no identities, no equal-side neighbors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Word {
    factors: Vec<Element>,
}

impl Word {
    pub fn new(factors: impl IntoIterator<Item = Element>) -> Self {
        let mut out: Vec<Element> = Vec::new();
        for e in factors {
            match out.last_mut() {
                Some(last) if last.side == e.side => {
                    last.spec = last.spec.times(e.spec);
                    if last.spec.is_identity() {
                        out.pop();
                    }
                }
                _ if e.spec.is_identity() => {}
                _ => out.push(e),
            }
        }
        Word { factors: out }
    }

    pub fn identity() -> Self {
        Word::default()
    }

    pub fn factors(&self) -> &[Element] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn then(&self, other: &Word) -> Word {
        Word::new(self.factors.iter().chain(&other.factors).copied())
    }

    pub fn pow(&self, n: usize) -> Word {
        Word::new((0..n).flat_map(|_| self.factors.iter().copied()))
    }

    /// Normal form under cyclic rotation: the trace only sees this.
    pub fn cyclically_reduced(&self) -> Word {
        let mut f = self.factors.clone();
        while f.len() >= 2 && f[0].side == f[f.len() - 1].side {
            let last = f.pop().expect("len >= 2");
            f[0].spec = last.spec.times(f[0].spec);
            if f[0].spec.is_identity() {
                f.remove(0);
            }
        }
        Word { factors: f }
    }
}

impl FromIterator<Element> for Word {
    fn from_iter<I: IntoIterator<Item = Element>>(iter: I) -> Self {
        Word::new(iter)
    }
}

/// `κ_1 ..= κ_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulantSequence<T> {
    values: Vec<T>,
}

impl<T: Scalar> CumulantSequence<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(CumulantSequence { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `κ_n`, 1-based.
    pub fn kappa(&self, n: usize) -> Option<&T> {
        n.checked_sub(1).and_then(|i| self.values.get(i))
    }
}

/// Coefficient `[z^j] M(z)^k` table for `k = 0..=kmax`, `j = 0..=jmax`, where
/// `M = 1 + Σ m_i z^i` and only `m_1..m_jmax` are used.
fn moment_series_powers<T: Scalar>(m: &[T], jmax: usize, kmax: usize) -> Vec<Series<T>> {
    let mser = Series::from_fn(jmax, |j| if j == 0 { T::one() } else { m[j - 1].clone() });
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(Series::one(jmax));
    for k in 1..=kmax {
        let next = out[k - 1].mul_series(&mser);
        out.push(next);
    }
    out
}

/// Inverts `m_n = Σ_k κ_k [z^{n-k}] M(z)^k` degree by degree.
pub fn cumulants_from_moments<T: Scalar>(m: &[T]) -> Result<CumulantSequence<T>> {
    let n_max = m.len();
    if n_max == 0 {
        return Err(Error::EmptySeries);
    }
    let powers = moment_series_powers(m, n_max - 1, n_max);
    let mut kappa: Vec<T> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut acc = m[n - 1].clone();
        for (k, kk) in kappa.iter().enumerate().map(|(i, v)| (i + 1, v)) {
            acc = acc - kk.clone() * powers[k].coeffs()[n - k].clone();
        }
        kappa.push(acc);
    }
    CumulantSequence::new(kappa)
}

/// Boundary-point recursion `m_n = Σ_{k=1}^n κ_k [z^{n-k}] M(z)^k`.
pub fn moments_from_cumulants<T: Scalar>(k: &CumulantSequence<T>) -> Vec<T> {
    let n_max = k.len();
    let mut m: Vec<T> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let powers = moment_series_powers(&m, n - 1, n);
        let mut acc = T::zero();
        for (j, p) in powers.iter().enumerate().take(n + 1).skip(1) {
            acc = acc + k.values[j - 1].clone() * p.coeffs()[n - j].clone();
        }
        m.push(acc);
    }
    m
}

/// `m_n = Σ_{π ∈ NC(n)} Π_B κ_{|B|}` by explicit enumeration.
pub fn moments_from_cumulants_nc<T: Scalar>(k: &CumulantSequence<T>) -> Result<Vec<T>> {
    (1..=k.len())
        .map(|n| {
            // the product only depends on the multiset of block sizes
            let mut types: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
            for p in enumerate_nc_with_ceiling(n, DEFAULT_NC_CEILING)? {
                let mut sizes: Vec<usize> = p.block_sizes().collect();
                sizes.sort_unstable();
                *types.entry(sizes).or_default() += 1;
            }
            Ok(types.iter().fold(T::zero(), |acc, (sizes, &count)| {
                acc + T::from_i64(count) * sizes.iter().fold(T::one(), |prod, &b| prod * k.values[b - 1].clone())
            }))
        })
        .collect()
}

/// Runs of `mask` bits not selected by `sel`, split at selected positions.
/// `idx` lists the bit positions of `mask` in increasing order; bit `j` of
/// `sel` refers to `idx[j + 1]` (the first position is always selected).
fn split_gaps(idx: &[usize], sel: u32) -> (u32, Vec<u32>) {
    let mut block = 1u32 << idx[0];
    let mut gaps = Vec::new();
    let mut gap = 0u32;
    for (j, &i) in idx[1..].iter().enumerate() {
        if (sel >> j) & 1 == 1 {
            if gap != 0 {
                gaps.push(gap);
                gap = 0;
            }
            block |= 1 << i;
        } else {
            gap |= 1 << i;
        }
    }
    if gap != 0 {
        gaps.push(gap);
    }
    (block, gaps)
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| (mask >> i) & 1 == 1).collect()
}

struct JointCumulants<'a, E, T, F> {
    elements: &'a [E],
    oracle: F,
    moments: HashMap<u32, T>,
    cumulants: HashMap<u32, T>,
}

impl<E: Clone, T: Scalar, F: FnMut(&[E]) -> Result<T>> JointCumulants<'_, E, T, F> {
    fn moment(&mut self, mask: u32) -> Result<T> {
        if let Some(v) = self.moments.get(&mask) {
            return Ok(v.clone());
        }
        let sub: Vec<E> = bits(mask).into_iter().map(|i| self.elements[i].clone()).collect();
        let v = (self.oracle)(&sub)?;
        if !v.is_admissible() {
            return Err(Error::OracleFailure(format!("non-finite moment {:?}", v)));
        }
        self.moments.insert(mask, v.clone());
        Ok(v)
    }

    /// `κ(S) = φ(S) - Σ_{T ∋ min S, T ≠ S} κ(T) Π φ(gaps)`.
    fn cumulant(&mut self, mask: u32) -> Result<T> {
        if let Some(v) = self.cumulants.get(&mask) {
            return Ok(v.clone());
        }
        let idx = bits(mask);
        let mut val = self.moment(mask)?;
        let rest = idx.len() - 1;
        for sel in 0..(1u32 << rest) - 1 {
            let (block, gaps) = split_gaps(&idx, sel);
            let mut prod = self.cumulant(block)?;
            for g in gaps {
                if prod.is_zero() {
                    break;
                }
                prod = prod * self.moment(g)?;
            }
            val = val - prod;
        }
        self.cumulants.insert(mask, val.clone());
        Ok(val)
    }
}

/// Free joint cumulant `κ(a_1, …, a_n)` from an oracle giving `φ` of any
/// ordered sub-product.
pub fn joint_cumulant<E, T, F>(elements: &[E], oracle: F) -> Result<T>
where
    E: Clone,
    T: Scalar,
    F: FnMut(&[E]) -> Result<T>,
{
    let n = elements.len();
    if n == 0 || n > DEFAULT_NC_CEILING {
        return Err(Error::SizeLimitExceeded { n, ceiling: DEFAULT_NC_CEILING });
    }
    let mut jc = JointCumulants { elements, oracle, moments: HashMap::new(), cumulants: HashMap::new() };
    jc.cumulant((1u32 << n) - 1)
}

/// Trace of words in two free algebras with given spectral measures.
///
/// Memoizes measure moments and block cumulants across calls, so one engine
/// should be reused for a family of related traces.
#[derive(Debug, Clone)]
pub struct FreeEngine<'a> {
    u: &'a SpectralMeasure,
    v: &'a SpectralMeasure,
    ceiling: usize,
    moments: HashMap<(Side, ElementSpec), f64>,
    cumulants: HashMap<(Side, Vec<ElementSpec>), f64>,
}

impl<'a> FreeEngine<'a> {
    pub fn new(u: &'a SpectralMeasure, v: &'a SpectralMeasure) -> Self {
        Self::with_ceiling(u, v, DEFAULT_WORD_CEILING)
    }

    pub fn with_ceiling(u: &'a SpectralMeasure, v: &'a SpectralMeasure, ceiling: usize) -> Self {
        FreeEngine { u, v, ceiling, moments: HashMap::new(), cumulants: HashMap::new() }
    }

    pub fn measure(&self, side: Side) -> &'a SpectralMeasure {
        match side {
            Side::U => self.u,
            Side::V => self.v,
        }
    }

    pub fn moment(&mut self, side: Side, spec: ElementSpec) -> Result<f64> {
        if let Some(&v) = self.moments.get(&(side, spec)) {
            return Ok(v);
        }
        let v = measure_moment(self.measure(side), spec)?;
        self.moments.insert((side, spec), v);
        Ok(v)
    }

    /// Joint cumulant of commuting elements of one algebra, in the given order.
    pub fn block_cumulant(&mut self, side: Side, specs: &[ElementSpec]) -> Result<f64> {
        if specs.len() == 1 {
            return self.moment(side, specs[0]);
        }
        let key = (side, specs.to_vec());
        if let Some(&v) = self.cumulants.get(&key) {
            return Ok(v);
        }
        let full = specs.iter().fold(ElementSpec::IDENTITY, |a, &b| a.times(b));
        let mut val = self.moment(side, full)?;
        let idx: Vec<usize> = (0..specs.len()).collect();
        for sel in 0..(1u32 << (specs.len() - 1)) - 1 {
            let (block, gaps) = split_gaps(&idx, sel);
            let block_specs: Vec<ElementSpec> = bits(block).into_iter().map(|i| specs[i]).collect();
            let mut prod = self.block_cumulant(side, &block_specs)?;
            for g in gaps {
                let spec = bits(g).into_iter().fold(ElementSpec::IDENTITY, |a, i| a.times(specs[i]));
                prod *= self.moment(side, spec)?;
            }
            val -= prod;
        }
        self.cumulants.insert(key, val);
        Ok(val)
    }

    /// `φ(w)`: sum over non-crossing partitions with single-side blocks.
    pub fn trace(&mut self, word: &Word) -> Result<f64> {
        let w = word.cyclically_reduced();
        let f = w.factors();
        match f.len() {
            0 => return Ok(1.0),
            1 => return self.moment(f[0].side, f[0].spec),
            n if n > self.ceiling => return Err(Error::SizeLimitExceeded { n, ceiling: self.ceiling }),
            _ => {}
        }
        let n = f.len();
        let mut memo = vec![vec![None; n + 1]; n + 1];
        self.interval(f, &mut memo, 0, n)
    }

    /// Moment of the sub-product `f[s..e]` by splitting off the block of `f[s]`.
    fn interval(&mut self, f: &[Element], memo: &mut [Vec<Option<f64>>], s: usize, e: usize) -> Result<f64> {
        if s >= e {
            return Ok(1.0);
        }
        if let Some(v) = memo[s][e] {
            return Ok(v);
        }
        let mut chosen = vec![f[s].spec];
        let mut total = NeumaierSum::default();
        self.extend_block(f, memo, e, s, 1.0, &mut chosen, &mut total)?;
        let v = total.value();
        memo[s][e] = Some(v);
        Ok(v)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_block(
        &mut self,
        f: &[Element],
        memo: &mut [Vec<Option<f64>>],
        e: usize,
        last: usize,
        prod: f64,
        chosen: &mut Vec<ElementSpec>,
        total: &mut NeumaierSum,
    ) -> Result<()> {
        let side = f[last].side;
        let tail = self.interval(f, memo, last + 1, e)?;
        if tail != 0.0 {
            let k = self.block_cumulant(side, chosen)?;
            total.add(k * prod * tail);
        }
        for j in (last + 2..e).filter(|&j| f[j].side == side) {
            let gap = self.interval(f, memo, last + 1, j)?;
            if gap == 0.0 {
                continue;
            }
            chosen.push(f[j].spec);
            self.extend_block(f, memo, e, j, prod * gap, chosen, total)?;
            chosen.pop();
        }
        Ok(())
    }
}

/// One-shot `φ(w)` for free `U ~ mu_u`, `V ~ mu_v`.
pub fn free_word_moment(w: &Word, mu_u: &SpectralMeasure, mu_v: &SpectralMeasure) -> Result<f64> {
    FreeEngine::new(mu_u, mu_v).trace(w)
}

/// `C(z) = (z + C_1) / (1 + z r(z))` to order `order`.
pub fn inverse_cumulant_series<T: Scalar>(r_v: &Series<T>, c1: T, order: usize) -> Result<Series<T>> {
    if order >= 1 && r_v.order() + 1 < order {
        return Err(Error::OrderTooLow { needed: order - 1, got: r_v.order() });
    }
    let mut num = Series::constant(c1, order);
    if order >= 1 {
        num = &num + &Series::variable(order);
    }
    let den = Series::from_fn(order, |i| if i == 0 { T::one() } else { r_v.coeffs()[i - 1].clone() });
    num.try_div(&den)
}

/// `C_n = κ_n(V^{-1}, V, …, V)` from the recursion `C_2 = 1 - C_1 κ_1(V)`,
/// `C_n = -Σ_{i<n} C_i κ_{n-i}(V)`, checked against the closed series form.
pub fn inverse_mixed_cumulants<T: Scalar>(r_v: &Series<T>, c1: T, n: usize) -> Result<CumulantSequence<T>> {
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if r_v.order() + 1 < n {
        return Err(Error::OrderTooLow { needed: n - 1, got: r_v.order() });
    }
    let r = |k: usize| r_v.coeffs()[k - 1].clone();
    let mut c: Vec<T> = vec![c1.clone()];
    for m in 2..=n {
        let mut acc = if m == 2 { T::one() } else { T::zero() };
        for i in 1..m {
            acc = acc - c[i - 1].clone() * r(m - i);
        }
        c.push(acc);
    }
    // coefficient n of C(z) is C_{n+1}
    let series = inverse_cumulant_series(r_v, c1, n - 1)?;
    for (i, s) in series.coeffs().iter().enumerate() {
        let diff = (s.clone() - c[i].clone()).to_f64().abs();
        let exact = T::KIND == crate::series::ScalarKind::Rational;
        let ok = if exact { diff == 0.0 } else { diff <= 1e-12 * (1.0 + c[i].to_f64().abs()) };
        if !ok {
            return Err(Error::CrossCheckFailed(format!("C_{} recursion vs series differ by {diff}", i + 1)));
        }
    }
    CumulantSequence::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rational, Rational};

    fn rats(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rational(x, 1)).collect()
    }

    #[test]
    fn point_mass_moment() {
        let mu = SpectralMeasure::point_mass(1.5).unwrap();
        assert_eq!(measure_moment(&mu, ElementSpec::power(3)).unwrap(), 1.5f64.powi(3));
    }

    #[test]
    fn singular_specs_rejected() {
        let mu = SpectralMeasure::from_atoms(vec![(0.0, 0.5), (0.5, 0.5)]).unwrap();
        assert!(matches!(measure_moment(&mu, ElementSpec::power(-1)), Err(Error::SingularIntegrand(_))));
        let mu = SpectralMeasure::from_atoms(vec![(1.0, 0.5), (0.5, 0.5)]).unwrap();
        assert!(matches!(
            measure_moment(&mu, ElementSpec::resolvent_one_minus(1)),
            Err(Error::SingularIntegrand(_))
        ));
    }

    #[test]
    fn measure_validation() {
        assert!(SpectralMeasure::from_atoms(vec![(0.0, 0.5)]).is_err());
        assert!(SpectralMeasure::from_atoms(vec![(0.0, -0.5), (1.0, 1.5)]).is_err());
        assert!(SpectralMeasure::new(vec![(2.0, 1.0)], vec![], 0.0, 1.0).is_err());
    }

    #[test]
    fn cumulant_examples() {
        let k = cumulants_from_moments(&rats(&[2, 6, 22, 90])).unwrap();
        assert_eq!(k.values(), rats(&[2, 2, 2, 2]).as_slice());
        let k = cumulants_from_moments(&rats(&[0, 1, 0])).unwrap();
        assert_eq!(k.values(), rats(&[0, 1, 0]).as_slice());
        let a = rational(3, 7);
        let m = vec![a.clone(), &a * &a, &a * &a * &a];
        let k = cumulants_from_moments(&m).unwrap();
        assert_eq!(k.values(), &[a, rational(0, 1), rational(0, 1)]);
    }

    #[test]
    fn moment_examples() {
        let k = CumulantSequence::new(rats(&[2, 2, 2, 2])).unwrap();
        assert_eq!(moments_from_cumulants(&k), rats(&[2, 6, 22, 90]));
        assert_eq!(moments_from_cumulants_nc(&k).unwrap(), rats(&[2, 6, 22, 90]));
        let k = CumulantSequence::new(rats(&[0, 1, 0, 0])).unwrap();
        assert_eq!(moments_from_cumulants(&k), rats(&[0, 1, 0, 2]));
    }

    #[test]
    fn joint_cumulant_of_a_single_element_is_its_mean() {
        let v: f64 = joint_cumulant(&[7u8], |_| Ok(4.25)).unwrap();
        assert_eq!(v, 4.25);
    }

    #[test]
    fn joint_cumulant_second_order_is_variance() {
        let m = [2.0, 6.0];
        let v: f64 = joint_cumulant(&[(), ()], |s: &[()]| Ok(m[s.len() - 1])).unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn oracle_errors_propagate() {
        let r: Result<f64> = joint_cumulant(&[1, 2], |_| Err(Error::OracleFailure("boom".into())));
        assert_eq!(r, Err(Error::OracleFailure("boom".into())));
        let r: Result<f64> = joint_cumulant(&[1, 2], |_| Ok(f64::NAN));
        assert!(matches!(r, Err(Error::OracleFailure(_))));
    }

    #[test]
    fn word_normal_form_merges_and_drops() {
        let w = Word::new([
            Element::u(ElementSpec::power(1)),
            Element::u(ElementSpec::power(-1)),
            Element::v(ElementSpec::half_power(1)),
            Element::v(ElementSpec::half_power(1)),
            Element::u(ElementSpec::power(2)),
        ]);
        assert_eq!(w.factors(), &[Element::v(ElementSpec::power(1)), Element::u(ElementSpec::power(2))]);
        let c = Word::new([
            Element::v(ElementSpec::half_power(1)),
            Element::u(ElementSpec::power(1)),
            Element::v(ElementSpec::half_power(1)),
        ])
        .cyclically_reduced();
        assert_eq!(c.factors(), &[Element::v(ElementSpec::power(1)), Element::u(ElementSpec::power(1))]);
    }

    #[test]
    fn uv_word_examples() {
        let mu = SpectralMeasure::from_atoms(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        let u = Element::u(ElementSpec::power(1));
        let v = Element::v(ElementSpec::power(1));
        let mut eng = FreeEngine::new(&mu, &mu);
        assert!((eng.trace(&Word::new([u, v])).unwrap() - 1.0).abs() < 1e-15);
        // m = (1, 2) on both sides
        assert!((eng.trace(&Word::new([u, v, u, v])).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(eng.trace(&Word::identity()).unwrap(), 1.0);
    }

    #[test]
    fn word_ceiling() {
        let mu = SpectralMeasure::point_mass(1.0).unwrap();
        let w = Word::new([Element::u(ElementSpec::power(1)), Element::v(ElementSpec::power(1))]).pow(3);
        let mut eng = FreeEngine::with_ceiling(&mu, &mu, 4);
        assert_eq!(eng.trace(&w), Err(Error::SizeLimitExceeded { n: 6, ceiling: 4 }));
    }

    #[test]
    fn inverse_cumulants_for_free_poisson_2_1() {
        let r = Series::from_fn(10, |_| rational(2, 1));
        let c = inverse_mixed_cumulants(&r, rational(1, 1), 8).unwrap();
        let mut expected = rats(&[1, -1]);
        expected.extend(rats(&[0; 6]));
        assert_eq!(c.values(), expected.as_slice());
    }

    #[test]
    fn inverse_cumulants_with_zero_r() {
        let t = rational(5, 3);
        let c = inverse_mixed_cumulants(&Series::zero(6), t.clone(), 5).unwrap();
        assert_eq!(c.values(), &[t, rational(1, 1), rational(0, 1), rational(0, 1), rational(0, 1)]);
    }

    #[test]
    fn inverse_cumulants_need_enough_r() {
        let r: Series<f64> = Series::zero(3);
        assert_eq!(inverse_mixed_cumulants(&r, 1.0, 8), Err(Error::OrderTooLow { needed: 7, got: 3 }));
    }
}
