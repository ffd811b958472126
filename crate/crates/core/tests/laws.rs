use std::f64::consts::PI;

use freeprob::laws::*;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid() -> Vec<Law> {
    let mut v: Vec<Law> = [0.5, 1.0, 2.0, 4.0].iter().map(|&l| Law::poisson(l, 1.0).unwrap()).collect();
    v.extend([(1.0, 2.0), (2.0, 3.0), (0.5, 2.0)].iter().map(|&(s, t)| Law::binomial(s, t).unwrap()));
    v
}

#[test]
fn total_mass_is_one() {
    for law in grid() {
        let mu = law.discretize(2048).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-8, "{law:?}: {}", mu.total_mass());
    }
}

#[test]
fn series_and_quadrature_moments_agree() {
    for law in grid() {
        let s = law.moments(8, MomentMethod::Series).unwrap();
        let q = law.moments(8, MomentMethod::Quadrature).unwrap();
        for (n, (a, b)) in s.iter().zip(&q).enumerate() {
            assert!((a - b).abs() <= 1e-7 * a.abs().max(1.0), "{law:?} m{}: {a} vs {b}", n + 1);
        }
    }
}

#[test]
fn free_poisson_2_1_moments() {
    let law = Law::poisson(2.0, 1.0).unwrap();
    assert_eq!(law.moments(4, MomentMethod::Series).unwrap(), vec![2.0, 6.0, 22.0, 90.0]);
    let mu = law.discretize(2048).unwrap();
    for (m, e) in mu.moments(4).iter().zip([2.0, 6.0, 22.0, 90.0]) {
        assert!((m - e).abs() < 1e-7 * e);
    }
}

#[test]
fn free_binomial_1_1_is_symmetric() {
    let q = Law::binomial(1.0, 1.0).unwrap().moments(1, MomentMethod::Quadrature).unwrap();
    assert!((q[0] - 0.5).abs() < 1e-12);
}

#[test]
fn free_binomial_first_moment_from_cauchy_expansion() {
    // G(z) = 1/z + m1/z² + …  ⇒  m1 = lim z(zG(z) - 1)
    let z = Complex64::new(1e4, 0.0);
    let g = binomial_cauchy(1.0, 2.0, z).unwrap();
    let m1_far = (z * (z * g - 1.0)).re;
    let s = Law::binomial(1.0, 2.0).unwrap().moments(2, MomentMethod::Series).unwrap();
    assert!((m1_far - s[0]).abs() < 1e-3);
    assert!((s[0] - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn cauchy_asymptotics() {
    for (s, t) in [(1.0, 2.0), (0.5, 2.0), (2.0, 0.5)] {
        let z = Complex64::new(1e6, 0.0);
        let g = binomial_cauchy(s, t, z).unwrap();
        assert!((g - 1.0 / z).norm() <= 1e-9);
        let z = Complex64::new(-3e5, 2e5);
        assert!((binomial_cauchy(s, t, z).unwrap() - 1.0 / z).norm() <= 1e-9);
    }
}

fn max_inversion_error(s: f64, t: f64, eps: f64, from: f64, to: f64) -> f64 {
    let law = Law::binomial(s, t).unwrap();
    let (a, b) = law.support();
    (0..20)
        .map(|i| {
            let x = a + (b - a) * (from + (to - from) * i as f64 / 19.0);
            let g = binomial_cauchy(s, t, Complex64::new(x, eps)).unwrap();
            (-g.im / PI - law.density(x).unwrap()).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn stieltjes_inversion_reproduces_density() {
    // ε = 1e-6 smooths the density by O(ε·|G'|), which near the edges of
    // β(2,3) exceeds 1e-5; the central 70% stays well inside the tolerance
    for (s, t) in [(1.0, 2.0), (2.0, 3.0), (0.5, 2.0)] {
        let err = max_inversion_error(s, t, 1e-6, 0.15, 0.85);
        assert!(err < 1e-5, "({s},{t}): {err}");
        let err = max_inversion_error(s, t, 1e-8, 0.01, 0.99);
        assert!(err < 1e-5, "({s},{t}) near edges: {err}");
    }
}

#[test]
fn cauchy_rejects_the_cut() {
    let law = FreeBinomialLaw::new(1.0, 2.0).unwrap();
    let (a, b) = law.support();
    let mid = Complex64::new(0.5 * (a + b), 0.0);
    assert!(binomial_cauchy(1.0, 2.0, mid).is_err());
    assert!(binomial_cauchy(1.0, 2.0, Complex64::new(1.0, 0.0)).is_err());
}

#[test]
fn atom_at_one_as_residue() {
    // (1/2πi)∮ G around z = 1 with radius well inside the gap to x₊
    let (s, t) = (2.0, 0.5);
    let (_, xp) = FreeBinomialLaw::new(s, t).unwrap().support();
    let r = 0.5 * (1.0 - xp);
    let n = 4096;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let ang = 2.0 * PI * k as f64 / n as f64;
        let e = Complex64::from_polar(1.0, ang);
        let z = 1.0 + r * e;
        acc += binomial_cauchy(s, t, z).unwrap() * r * e * Complex64::i();
    }
    let residue = acc * (2.0 * PI / n as f64) / (2.0 * PI * Complex64::i());
    assert!((residue.re - (1.0 - t)).abs() < 1e-6, "{residue}");
}

#[test]
fn negative_moments_match_closed_forms() {
    for (theta, alpha) in [(2.0, 1.0), (3.0, 2.0), (1.5, 1.0), (4.0, 0.5)] {
        let law = FreePoissonLaw::new(theta, alpha).unwrap();
        let closed = law.negative_moments_closed().unwrap();
        let quad = negative_moments_quadrature(&law, 2048).unwrap();
        assert!((closed.0 - quad.0).abs() < 1e-8, "{theta},{alpha}");
        assert!((closed.1 - quad.1).abs() < 1e-8, "{theta},{alpha}");
    }
}

#[test]
fn resolvent_f_relation_and_cauchy_schwarz() {
    for (s, t) in [(1.0, 2.0), (2.0, 3.0), (0.5, 2.0), (1.0, 1.5)] {
        let r = resolvent_functionals(&FreeBinomialLaw::new(s, t).unwrap(), 1e-6).unwrap();
        assert!((r.f - (1.0 + s / (t - 1.0))).abs() < 1e-7, "({s},{t}) F = {}", r.f);
        assert!(r.h >= r.f * r.f);
    }
}

#[test]
fn resolvent_small_sigma_tends_to_one() {
    let r = resolvent_functionals(&FreeBinomialLaw::new(0.01, 2.0).unwrap(), 1e-6).unwrap();
    assert!((r.f - 1.0).abs() < 0.02);
}

#[test]
fn resolvent_guard() {
    assert!(resolvent_functionals(&FreeBinomialLaw::new(2.0, 1.0).unwrap(), 1e-6).is_err());
    assert!(resolvent_functionals(&FreeBinomialLaw::new(2.0, 0.5).unwrap(), 1e-6).is_err());
}

#[test]
fn free_poisson_literal_reading_is_not_normalized() {
    let p = FreePoissonLaw::new(2.0, 1.0).unwrap();
    assert!((p.literal_reading_mass() - 2.0).abs() < 1e-15);
    let p = FreePoissonLaw::new(0.5, 1.0).unwrap();
    assert!((p.literal_reading_mass() - 0.75).abs() < 1e-15);
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn sampling_atom_fraction_and_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t = Law::poisson(0.5, 1.0).unwrap().cdf_table();
    let zeros: Vec<f64> = (0..100_000).map(|_| if t.sample(&mut rng) == 0.0 { 1.0 } else { 0.0 }).collect();
    let (m, se) = mean_and_stderr(&zeros);
    assert!((m - 0.5).abs() <= 3.0 * se, "{m} ± {se}");

    let t = Law::poisson(2.0, 1.0).unwrap().cdf_table();
    let xs: Vec<f64> = (0..100_000).map(|_| t.sample(&mut rng)).collect();
    let (m, se) = mean_and_stderr(&xs);
    assert!((m - 2.0).abs() <= 3.0 * se, "{m} ± {se}");
}

#[test]
fn one_shot_sample_uses_the_same_table() {
    let law = Law::binomial(1.0, 2.0).unwrap();
    let mut a = ChaCha8Rng::seed_from_u64(5);
    let mut b = ChaCha8Rng::seed_from_u64(5);
    assert_eq!(sample(&law, &mut a), law.cdf_table().sample(&mut b));
}
