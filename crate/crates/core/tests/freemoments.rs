use freeprob::freemoments::*;
use freeprob::laws::Law;
use freeprob::ncpart::enumerate_nc;
use freeprob::series::{rational, Rational};
use freeprob::transforms::{free_mult, s_from_moments, MomentSeries};
use freeprob::Series;
use proptest::prelude::*;

fn rational_seq(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-6i64..7, 1i64..4), len).prop_map(|v| v.into_iter().map(|(n, d)| rational(n, d)).collect())
}

/// Positive atoms with positive weights summing to one.
fn atomic_measure() -> impl Strategy<Value = SpectralMeasure> {
    prop::collection::vec((0.1f64..3.0, 0.1f64..1.0), 1..4).prop_map(|raw| {
        let total: f64 = raw.iter().map(|a| a.1).sum();
        let mut atoms: Vec<(f64, f64)> = raw.iter().map(|&(x, w)| (x, w / total)).collect();
        // push the rounding residue into the last weight
        let drift = 1.0 - atoms.iter().map(|a| a.1).sum::<f64>();
        atoms.last_mut().unwrap().1 += drift;
        SpectralMeasure::from_atoms(atoms).unwrap()
    })
}

/// φ(w) as the sum over monochromatic non-crossing partitions of the raw
/// factor list, each block contributing the classical-algebra joint cumulant.
fn brute_trace(factors: &[Element], mu_u: &SpectralMeasure, mu_v: &SpectralMeasure) -> f64 {
    if factors.is_empty() {
        return 1.0;
    }
    let mut total = 0.0;
    'partitions: for p in enumerate_nc(factors.len()).unwrap() {
        let mut prod = 1.0;
        for block in p.blocks() {
            let elems: Vec<Element> = block.iter().map(|&i| factors[i - 1]).collect();
            if elems.iter().any(|e| e.side != elems[0].side) {
                continue 'partitions;
            }
            let mu = if elems[0].side == Side::U { mu_u } else { mu_v };
            let k: f64 = joint_cumulant(&elems, |sub: &[Element]| {
                let spec = sub.iter().fold(ElementSpec::IDENTITY, |s, e| s.times(e.spec));
                measure_moment(mu, spec)
            })
            .unwrap();
            prod *= k;
        }
        total += prod;
    }
    total
}

fn element() -> impl Strategy<Value = Element> {
    (any::<bool>(), 0usize..3).prop_map(|(is_u, s)| {
        let spec = [ElementSpec::power(1), ElementSpec::power(2), ElementSpec::one_minus(1)][s];
        if is_u {
            Element::u(spec)
        } else {
            Element::v(spec)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cumulant_moment_roundtrip_exact(k in rational_seq(10)) {
        let seq = CumulantSequence::new(k.clone()).unwrap();
        let m = moments_from_cumulants(&seq);
        let back = cumulants_from_moments(&m).unwrap();
        prop_assert_eq!(back.values(), &k[..]);
    }

    #[test]
    fn nc_sum_matches_recursion_exact(k in rational_seq(9)) {
        let seq = CumulantSequence::new(k).unwrap();
        prop_assert_eq!(moments_from_cumulants_nc(&seq).unwrap(), moments_from_cumulants(&seq));
    }

    #[test]
    fn engine_matches_brute_force(
        mu_u in atomic_measure(),
        mu_v in atomic_measure(),
        factors in prop::collection::vec(element(), 1..8),
    ) {
        let engine = free_word_moment(&Word::new(factors.clone()), &mu_u, &mu_v).unwrap();
        let brute = brute_trace(&factors, &mu_u, &mu_v);
        prop_assert!((engine - brute).abs() <= 1e-9 * brute.abs().max(1.0), "{} vs {}", engine, brute);
    }

    #[test]
    fn uv_powers_match_free_multiplication(mu_u in atomic_measure(), mu_v in atomic_measure()) {
        let n = 8;
        let s_u = s_from_moments(&MomentSeries::from_moments(&mu_u.moments(n + 1))).unwrap();
        let s_v = s_from_moments(&MomentSeries::from_moments(&mu_v.moments(n + 1))).unwrap();
        let conv = free_mult(&s_u, &s_v, n).unwrap();
        let mut eng = FreeEngine::new(&mu_u, &mu_v);
        let uv = Word::new([Element::u(ElementSpec::power(1)), Element::v(ElementSpec::power(1))]);
        for (k, m) in conv.moments().iter().enumerate() {
            let t = eng.trace(&uv.pow(k + 1)).unwrap();
            prop_assert!((t - m).abs() <= 1e-9 * m.abs().max(1.0), "n={}: {} vs {}", k + 1, t, m);
        }
    }

    #[test]
    fn mixed_cumulants_vanish(
        mu_u in atomic_measure(),
        mu_v in atomic_measure(),
        factors in prop::collection::vec(element(), 2..7),
    ) {
        prop_assume!(factors.iter().any(|e| e.side == Side::U) && factors.iter().any(|e| e.side == Side::V));
        let mut eng = FreeEngine::new(&mu_u, &mu_v);
        let k: f64 = joint_cumulant(&factors, |sub: &[Element]| eng.trace(&Word::new(sub.to_vec()))).unwrap();
        prop_assert!(k.abs() <= 1e-9, "{}", k);
    }
}

#[test]
fn same_tag_cumulants_do_not_vanish() {
    let mu = SpectralMeasure::from_atoms(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap();
    let mut eng = FreeEngine::new(&mu, &mu);
    let x = Element::u(ElementSpec::power(1));
    let k: f64 = joint_cumulant(&[x, x], |sub: &[Element]| eng.trace(&Word::new(sub.to_vec()))).unwrap();
    assert!((k - 1.0).abs() < 1e-12);
}

#[test]
fn vu_squared_against_s_route() {
    let mu_u = Law::binomial(1.0, 2.0).unwrap().discretize(2048).unwrap();
    let mu_v = Law::poisson(3.0, 1.0).unwrap().discretize(2048).unwrap();
    let s_u = s_from_moments(&MomentSeries::from_moments(&mu_u.moments(3))).unwrap();
    let s_v = s_from_moments(&MomentSeries::from_moments(&mu_v.moments(3))).unwrap();
    let m2 = free_mult(&s_v, &s_u, 2).unwrap().moments()[1];
    let w = Word::new([Element::v(ElementSpec::power(1)), Element::u(ElementSpec::power(1))]).pow(2);
    let t = free_word_moment(&w, &mu_u, &mu_v).unwrap();
    assert!((t - m2).abs() < 1e-9, "{t} vs {m2}");
}

/// `κ(V⁻¹, V, …, V)` straight from the definition, with `φ(V⁻¹Vᵏ) = φ(Vᵏ⁻¹)`.
fn inverse_cumulant_oracle(mu: &SpectralMeasure, n: usize) -> f64 {
    let elems: Vec<i32> = std::iter::once(-1).chain(std::iter::repeat_n(1, n - 1)).collect();
    joint_cumulant(&elems, |sub: &[i32]| measure_moment(mu, ElementSpec::power(sub.iter().sum()))).unwrap()
}

#[test]
fn inverse_mixed_cumulants_match_joint_cumulants() {
    for (lambda, alpha) in [(2.0, 1.0), (3.0, 1.0), (4.0, 0.5)] {
        let law = Law::poisson(lambda, alpha).unwrap();
        let mu = law.discretize(2048).unwrap();
        let r = Series::new((1..=8).map(|n| lambda * f64::powi(alpha, n)).collect()).unwrap();
        let c1 = measure_moment(&mu, ElementSpec::power(-1)).unwrap();
        let c = inverse_mixed_cumulants(&r, c1, 8).unwrap();
        for n in 1..=8 {
            let oracle = inverse_cumulant_oracle(&mu, n);
            let got = *c.kappa(n).unwrap();
            assert!((got - oracle).abs() <= 1e-10, "({lambda},{alpha}) C_{n}: {got} vs {oracle}");
        }
    }
}

#[test]
fn third_inverse_cumulant_of_free_poisson_2_1_vanishes() {
    let mu = Law::poisson(2.0, 1.0).unwrap().discretize(2048).unwrap();
    assert!(inverse_cumulant_oracle(&mu, 3).abs() < 1e-10);
}

#[test]
fn uv_example_with_atomic_moments() {
    // m(U) = m(V) = (1, 2): atoms at 0 and 2 with equal weight
    let mu = SpectralMeasure::from_atoms(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
    let w = Word::new([Element::u(ElementSpec::power(1)), Element::v(ElementSpec::power(1))]).pow(2);
    assert!((free_word_moment(&w, &mu, &mu).unwrap() - 3.0).abs() < 1e-12);
}
