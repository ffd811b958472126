//! Monte Carlo versions of the regression trace identities.

use freeprob::characterize::{Theorem, TheoremParams};
use freeprob::laws::CdfTable;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{scale_columns, trace_diag, trace_product, FreePair, SpectrumMode};
use crate::{Error, Result};

/// Finite-size allowance constant `c_abs` in the gate
/// `|estimate| ≤ 3·stderr + c_abs·scale/n`.
pub const DEFAULT_FINITE_SIZE_ALLOWANCE: f64 = 4.0;
/// Smallest admissible eigenvalue of `V` and `I - U`.
pub const CONDITION_FLOOR: f64 = 1e-8;
pub const MAX_MOMENT: usize = 6;
/// RNG stream of [`x_spectrum`]; trial streams count up from 0.
pub const SPECTRUM_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub dim: usize,
    pub trials: usize,
    pub theorem: Theorem,
    pub n_max_moment: usize,
    pub seed: u64,
    pub c_abs: f64,
    /// Replaces the regression constants, e.g. for negative controls.
    pub constants: Option<(f64, f64)>,
    pub spectrum: SpectrumMode,
}

impl McConfig {
    pub fn new(dim: usize, trials: usize, theorem: Theorem, seed: u64) -> Self {
        McConfig {
            dim,
            trials,
            theorem,
            n_max_moment: 4,
            seed,
            c_abs: DEFAULT_FINITE_SIZE_ALLOWANCE,
            constants: None,
            spectrum: SpectrumMode::Iid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEntry {
    pub name: String,
    pub moment: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub scale: f64,
    pub allowance: f64,
    pub gate: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub params: TheoremParams,
    pub config: McConfig,
    pub c: f64,
    pub d: f64,
    pub entries: Vec<McEntry>,
}

impl McReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, name: &str, moment: usize) -> Option<&McEntry> {
        self.entries.iter().find(|e| e.name == name && e.moment == moment)
    }
}

/// One identity instance per trial: `lhs - k·α_n` with `k` the constant.
struct Sample {
    residual: f64,
    /// `α_n = (1/n) tr((VU)ⁿ)`.
    alpha: f64,
}

/// Names and moment indices in report order.
fn layout(theorem: Theorem, n_max: usize) -> Vec<(&'static str, usize)> {
    match theorem {
        Theorem::T1 => (0..=n_max).map(|n| ("var1", n)).chain((1..=n_max).map(|n| ("var2", n))).collect(),
        Theorem::T2 => (1..=n_max).map(|n| ("reg21", n)).chain((1..=n_max).map(|n| ("var21", n))).collect(),
    }
}

fn run_trial(
    u_table: &CdfTable,
    v_table: &CdfTable,
    cfg: &McConfig,
    c: f64,
    d: f64,
    trial: usize,
) -> Result<Vec<Sample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let pair = FreePair::sample(u_table, v_table, cfg.dim, cfg.spectrum, &mut rng)?;
    let nf = cfg.dim as f64;
    let u = pair.u_spectrum();
    let min_gap = u.iter().map(|x| 1.0 - x).fold(f64::INFINITY, f64::min);
    if min_gap < CONDITION_FLOOR {
        return Err(Error::IllConditioned(min_gap));
    }
    let r: Vec<f64> = u.iter().map(|x| 1.0 / (1.0 - x)).collect();
    let ur: Vec<f64> = u.iter().zip(&r).map(|(a, b)| a * b).collect();
    let v = pair.v_function(|x| x);
    let p = scale_columns(&v, u);
    let n_max = cfg.n_max_moment;
    // P^0 is the identity and handled through traces directly
    let mut powers = vec![p.clone()];
    for _ in 1..n_max {
        let next = powers.last().expect("nonempty") * &p;
        powers.push(next);
    }
    let pow = |k: usize| &powers[k - 1];
    let alpha = |k: usize| -> f64 {
        match k {
            0 => 1.0,
            k if k <= n_max => pow(k).trace() / nf,
            _ => trace_product(pow(n_max), &p) / nf,
        }
    };
    let diag_word = |w: &[f64], k: usize| -> f64 {
        if k == 0 {
            w.iter().sum::<f64>() / nf
        } else {
            trace_diag(w, pow(k)) / nf
        }
    };
    let mut out = Vec::new();
    match cfg.theorem {
        Theorem::T1 => {
            for n in 0..=n_max {
                let vpn = if n == 0 { v.trace() / nf } else { trace_product(&v, pow(n)) / nf };
                out.push(Sample { residual: vpn - alpha(n + 1) - c * alpha(n), alpha: alpha(n) });
            }
            for n in 1..=n_max {
                out.push(Sample { residual: diag_word(&ur, n - 1) - d * alpha(n), alpha: alpha(n) });
            }
        }
        Theorem::T2 => {
            let min_v = pair.v_spectrum().iter().copied().fold(f64::INFINITY, f64::min);
            if min_v < CONDITION_FLOOR {
                return Err(Error::IllConditioned(min_v));
            }
            for n in 1..=n_max {
                out.push(Sample { residual: diag_word(&ur, n - 1) - c * alpha(n), alpha: alpha(n) });
            }
            // W = (I-U)⁻¹ V⁻¹ U(I-U)⁻¹
            let vinv = pair.v_function(|x| 1.0 / x);
            let mut w = scale_columns(&vinv, &ur);
            for (i, ri) in r.iter().enumerate() {
                w.row_mut(i).scale_mut(*ri);
            }
            for n in 1..=n_max {
                let t = if n == 1 { w.trace() } else { trace_product(&w, pow(n - 1)) };
                out.push(Sample { residual: t / nf - d * alpha(n), alpha: alpha(n) });
            }
        }
    }
    Ok(out)
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Empirical trace identities of the chosen theorem over `cfg.trials`
/// independent draws of the rotated pair. T1 reports `var1` (n = 0..=N) and
/// `var2` (n = 1..=N); T2 reports `reg21` and `var21` (n = 1..=N).
pub fn mc_regression_check(params: &TheoremParams, cfg: &McConfig) -> Result<McReport> {
    if cfg.n_max_moment == 0 || cfg.n_max_moment > MAX_MOMENT {
        return Err(Error::InvalidArgument(format!("n_max_moment must be in 1..={MAX_MOMENT}")));
    }
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    if cfg.dim < 2 {
        return Err(Error::InvalidDimension(cfg.dim));
    }
    let (c, d) = cfg.constants.unwrap_or_else(|| params.constants(cfg.theorem));
    let u_table = params.u_law().cdf_table();
    let v_table = params.v_law().cdf_table();
    let samples: Vec<Vec<Sample>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(&u_table, &v_table, cfg, c, d, t))
        .collect::<Result<_>>()?;
    let entries = layout(cfg.theorem, cfg.n_max_moment)
        .into_iter()
        .enumerate()
        .map(|(k, (name, moment))| {
            let residuals: Vec<f64> = samples.iter().map(|s| s[k].residual).collect();
            let alphas: Vec<f64> = samples.iter().map(|s| s[k].alpha).collect();
            let (estimate, stderr) = mean_stderr(&residuals);
            let konst = if name == "var1" || name == "reg21" { c } else { d };
            let scale = (konst * mean_stderr(&alphas).0).abs().max(1.0);
            let allowance = cfg.c_abs * scale / cfg.dim as f64;
            let gate = 3.0 * stderr + allowance;
            McEntry { name: name.into(), moment, estimate, stderr, scale, allowance, gate, pass: estimate.abs() <= gate }
        })
        .collect();
    Ok(McReport { params: *params, config: *cfg, c, d, entries })
}

/// Eigenvalues of `V^{1/2}UV^{1/2}` for one draw of the pair at `dim`.
pub fn x_spectrum(params: &TheoremParams, dim: usize, mode: SpectrumMode, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SPECTRUM_STREAM);
    let pair = FreePair::sample(&params.u_law().cdf_table(), &params.v_law().cdf_table(), dim, mode, &mut rng)?;
    pair.x_eigenvalues()
}
