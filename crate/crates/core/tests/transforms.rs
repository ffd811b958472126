use freeprob::freemoments::{moments_from_cumulants, CumulantSequence};
use freeprob::laws::{binomial_moment_series, FreePoissonLaw};
use freeprob::series::{rational, Rational};
use freeprob::transforms::*;
use freeprob::Series;
use proptest::prelude::*;

fn rational_r(order: usize) -> impl Strategy<Value = RTransform<Rational>> {
    prop::collection::vec((-5i64..6, 1i64..4), order + 1)
        .prop_map(|v| RTransform::new(Series::new(v.into_iter().map(|(n, d)| rational(n, d)).collect()).unwrap()))
}

fn nonzero_mean_r(order: usize) -> impl Strategy<Value = RTransform<Rational>> {
    (rational_r(order), 1i64..5).prop_map(|(r, m)| {
        let mut c = r.series().coeffs().to_vec();
        c[0] = rational(m, 2);
        RTransform::new(Series::new(c).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn free_add_commutes_and_associates(a in rational_r(8), b in rational_r(8), c in rational_r(8)) {
        prop_assert_eq!(free_add(&a, &b), free_add(&b, &a));
        prop_assert_eq!(free_add(&free_add(&a, &b), &c), free_add(&a, &free_add(&b, &c)));
    }

    #[test]
    fn mult_by_unit_s_returns_moments(r in nonzero_mean_r(10)) {
        let m = moments_from_cumulants(&r.cumulants());
        let s = s_from_r(&r).unwrap();
        let out = free_mult(&s, &STransform::new(Series::one(10)), 10).unwrap();
        prop_assert_eq!(out.moments(), &m[..10]);
    }

    #[test]
    fn s_routes_agree_exactly(r in nonzero_mean_r(9)) {
        let m = MomentSeries::from_moments(&moments_from_cumulants(&r.cumulants()));
        let a = s_from_moments(&m).unwrap().series().truncate(8);
        let b = s_from_r(&r).unwrap().series().truncate(8);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn free_mult_commutes(a in nonzero_mean_r(8), b in nonzero_mean_r(8)) {
        let sa = s_from_r(&a).unwrap();
        let sb = s_from_r(&b).unwrap();
        prop_assert_eq!(free_mult(&sa, &sb, 8).unwrap(), free_mult(&sb, &sa, 8).unwrap());
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn cauchy_relation_for_free_poisson_laws() {
    for (lambda, alpha) in [(0.5, 1.0), (1.0, 1.0), (2.0, 1.0), (4.0, 0.5), (3.0, 2.0)] {
        let law = FreePoissonLaw::new(lambda, alpha).unwrap();
        let r = law.r_transform(12);
        let m = MomentSeries::from_moments(&moments_from_cumulants(&r.cumulants()));
        let res = verify_cauchy_relation(&m, &r, 12).unwrap();
        let scale = m.moments().iter().fold(1.0f64, |s, x| s.max(x.abs()));
        assert!(max_abs(&res) <= 1e-10 * scale, "({lambda},{alpha}): {:?}", res);
    }
}

#[test]
fn cauchy_relation_for_free_binomial_laws() {
    for (s, t) in [(1.0, 2.0), (2.0, 3.0), (0.5, 2.0), (2.0, 0.5)] {
        let m = MomentSeries::new(binomial_moment_series(&s, &t, 13).unwrap()).unwrap();
        let r = r_from_moments(&m).unwrap();
        let res = verify_cauchy_relation(&m, &r, 12).unwrap();
        assert!(max_abs(&res) <= 1e-10, "({s},{t}): {:?}", res);
    }
}

#[test]
fn cauchy_relation_exact_for_rational_binomial() {
    let m = MomentSeries::new(binomial_moment_series(&rational(1, 1), &rational(2, 1), 12).unwrap()).unwrap();
    let r = r_from_moments(&m).unwrap();
    assert!(verify_cauchy_relation(&m, &r, 12).unwrap().iter().all(|x| *x == rational(0, 1)));
}

#[test]
fn free_poisson_times_free_binomial() {
    // ν(3,1) ⊠ β(1,2) is ν(1,1): moments are the Catalan numbers
    let s_v = s_from_r(&FreePoissonLaw::new(3.0, 1.0).unwrap().r_transform(9)).unwrap();
    let m_u = MomentSeries::new(binomial_moment_series(&1.0, &2.0, 10).unwrap()).unwrap();
    let s_u = s_from_moments(&m_u).unwrap();
    let out = free_mult(&s_v, &s_u, 8).unwrap();
    for (got, want) in out.moments().iter().zip([1.0, 2.0, 5.0, 14.0, 42.0, 132.0, 429.0, 1430.0]) {
        assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
    }
}

#[test]
fn free_mult_needs_enough_terms() {
    let s = STransform::new(Series::<f64>::one(3));
    assert!(free_mult(&s, &s, 6).is_err());
    let k = CumulantSequence::new(vec![1.0, 1.0]).unwrap();
    assert_eq!(r_from_cumulants(&k).series().order(), 1);
}
