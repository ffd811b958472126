//! Kolmogorov distance between an empirical spectrum and a law.

use freeprob::laws::{CdfTable, Law};

/// Eigenvalues this close to an atom (relative to the support width) are
/// treated as sitting on it.
pub const ATOM_SNAP: f64 = 1e-8;

/// `sup_x |F_emp(x) - F(x)|`, atoms included.
pub fn esd_distance(eigs: &[f64], law: &Law) -> f64 {
    esd_distance_table(eigs, &law.cdf_table(), law.support())
}

pub fn esd_distance_table(eigs: &[f64], table: &CdfTable, support: (f64, f64)) -> f64 {
    if eigs.is_empty() {
        return 1.0;
    }
    let snap = ATOM_SNAP * (support.1 - support.0).max(1.0);
    let mut xs: Vec<f64> = eigs
        .iter()
        .map(|&x| table.atoms().iter().find(|a| (x - a.0).abs() <= snap).map_or(x, |a| a.0))
        .collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut worst = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        // just below x the empirical CDF is i/n, at x it is j/n
        worst = worst.max((i as f64 / n - table.cdf_left(x)).abs());
        worst = worst.max((j as f64 / n - table.cdf(x)).abs());
        i = j;
    }
    worst
}
