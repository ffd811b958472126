use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freeprob::characterize::Theorem;
use freeprob::laws::Law;
use randmat::{SpectrumMode, DEFAULT_FINITE_SIZE_ALLOWANCE};

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "FREEPROB_SEED";
/// Seed used when neither `--seed` nor `FREEPROB_SEED` is set.
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Parser)]
#[command(name = "freeprob", version, about = "Free Poisson and free binomial laws, free convolutions and regression characterizations")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the output to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// RNG seed; takes precedence over FREEPROB_SEED.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    /// `x,density` table; `density` only.
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density of the continuous part on an interior grid.
    Density {
        #[arg(long)]
        law: LawSpec,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Moments from the cumulant series, cross-checked by quadrature.
    Moments {
        #[arg(long)]
        law: LawSpec,
        #[arg(long, short, default_value_t = 8)]
        n: usize,
    },
    /// Moments of the free additive or multiplicative convolution of two laws.
    Convolve {
        #[arg(long, value_enum)]
        op: ConvOp,
        #[arg(long)]
        a: LawSpec,
        #[arg(long)]
        b: LawSpec,
        #[arg(long, short, default_value_t = 8)]
        n: usize,
        /// Compare the result against the moments of this law.
        #[arg(long)]
        expect: Option<LawSpec>,
    },
    /// Recover (λ, α, σ, θ) from the regression constants c, d and F.
    Solve {
        #[arg(long, value_parser = parse_theorem)]
        theorem: Theorem,
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        #[arg(long = "F", allow_negative_numbers = true)]
        f: f64,
    },
    /// Finite-order identity checks.
    Verify(VerifyArgs),
    /// Monte Carlo check of the trace identities with rotated random matrices.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvOp {
    Add,
    Mult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Prop31,
    Prop32,
    Lemma33,
    Thm1,
    Thm2,
}

impl Target {
    pub fn default_order(self) -> usize {
        match self {
            Target::Thm1 => freeprob::characterize::DEFAULT_VERIFY_ORDER,
            Target::Thm2 | Target::Lemma33 => 8,
            Target::Prop31 => 6,
            Target::Prop32 => 2,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub target: Target,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 2.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Rate of V for `lemma33`; defaults to σ+θ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Verification order (series coefficients, cumulant order or word length).
    #[arg(long)]
    pub order: Option<usize>,
    /// Residual tolerance for `thm1` and `thm2`.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spectrum {
    Iid,
    Quantile,
}

impl From<Spectrum> for SpectrumMode {
    fn from(s: Spectrum) -> Self {
        match s {
            Spectrum::Iid => SpectrumMode::Iid,
            Spectrum::Quantile => SpectrumMode::Quantile,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_theorem, default_value = "1")]
    pub theorem: Theorem,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 2.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 400)]
    pub dim: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Highest moment index n in the trace identities.
    #[arg(long, default_value_t = 4)]
    pub moments: usize,
    #[arg(long, value_enum, default_value_t = Spectrum::Iid)]
    pub spectrum: Spectrum,
    /// Constant of the O(1/n) finite-size allowance.
    #[arg(long, default_value_t = DEFAULT_FINITE_SIZE_ALLOWANCE)]
    pub c_abs: f64,
    /// Also compare one sampled spectrum of V^{1/2}UV^{1/2} with ν(σ, α).
    #[arg(long)]
    pub esd: bool,
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    match s {
        "1" => Ok(Theorem::T1),
        "2" => Ok(Theorem::T2),
        _ => Err(format!("theorem must be 1 or 2, got {s:?}")),
    }
}

/// `poisson:λ,α` or `binomial:σ,θ`.
#[derive(Debug, Clone)]
pub struct LawSpec {
    pub text: String,
    pub law: Law,
}

impl FromStr for LawSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let usage = || format!("expected poisson:LAMBDA,ALPHA or binomial:SIGMA,THETA, got {s:?}");
        let (family, rest) = s.split_once(':').ok_or_else(usage)?;
        let nums: Vec<f64> = rest.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| usage())?;
        let [p, q] = nums[..] else {
            return Err(usage());
        };
        let law = match family.trim() {
            "poisson" => Law::poisson(p, q),
            "binomial" => Law::binomial(p, q),
            _ => return Err(usage()),
        }
        .map_err(|e| e.to_string())?;
        Ok(LawSpec { text: s.to_string(), law })
    }
}

impl fmt::Display for LawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Flag, then `FREEPROB_SEED`, then [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, String> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(v)) => v.trim().parse().map_err(|_| format!("{SEED_ENV} must be an unsigned integer, got {v:?}")),
        (None, None) => Ok(DEFAULT_SEED),
    }
}
