use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heavytail::densities::BodyKind;
use heavytail::Error;
use serde::Serialize;

mod commands;
mod output;

#[derive(Parser, Debug)]
#[command(
    name = "heavytail",
    version,
    about = "Moments, sign certificates and norm-ratio scans for extremal log-concave laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Seed for Monte Carlo runs and randomized trials.
    #[arg(long, env = "HEAVYTAIL_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Relative quadrature tolerance for the numerical commands.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Exact sign certificates for every even q in [4, qmax].
    Certify {
        #[arg(long, default_value_t = 10)]
        qmax: usize,
    },
    /// Exact cumulants and moments of Γ against the subfactorials.
    Moments {
        #[arg(short = 'n', long = "nmax", default_value_t = 30)]
        nmax: usize,
    },
    /// Density curve and moments of Γ^s.
    GammaDensity {
        #[arg(short = 's', default_value_t = 0.5)]
        s: f64,
        /// Number of curve points.
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// ‖Γ^s‖_q / ‖Γ^s‖_p over s ∈ [0, 1].
    RatioScan {
        #[arg(short = 'p', default_value_t = 2.0)]
        p: f64,
        #[arg(short = 'q', default_value_t = 4.0)]
        q: f64,
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        #[arg(long)]
        no_refine: bool,
    },
    /// E[|Γ^s|^q sgn Γ^s] / ‖Γ^s‖_p over s ∈ [0, 1].
    SignedScan {
        #[arg(short = 'p', default_value_t = 2.0)]
        p: f64,
        #[arg(short = 'q', default_value_t = 3.0)]
        q: f64,
        #[arg(long, default_value_t = 1001)]
        grid: usize,
    },
    /// E φ(Γ^s/σ_s) over s ∈ [0, 1].
    PhiScan {
        /// cubic, quartic, exp[:c], cubic+exp[:c], quartic+exp[:c] or const[:v].
        #[arg(long, default_value = "cubic")]
        phi: String,
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        #[arg(long)]
        no_refine: bool,
    },
    /// α(K): the largest marginal norm ratio of a uniform body.
    Alpha(BodyArgs),
    /// α*(K): the same with the signed numerator.
    AlphaStar(BodyArgs),
    /// Randomized root-count trials for Chebyshev systems.
    Cheb {
        /// power-sgn:K, power-sgn:0,1,p2,..., smooth-exp:K[:c],
        /// smooth-monomial:K or smooth-monomial+exp:K[:c].
        #[arg(long, default_value = "power-sgn:4")]
        system: String,
        #[arg(long, visible_alias = "samples", default_value_t = 10_000)]
        trials: usize,
    },
    /// μ_n(cos t·Γ − sin t·Γ′) < !n over even n and interior t.
    Thm4 {
        #[arg(short = 'n', long = "nmax", default_value_t = 20)]
        nmax: usize,
        /// Number of interior t values.
        #[arg(long, default_value_t = 97)]
        grid: usize,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BodyArgs {
    /// simplex, cube, ball or cross-polytope (aliases: triangle, square, disk, cross).
    #[arg(long, value_parser = parse_body)]
    #[serde(serialize_with = "body_name")]
    pub body: BodyKind,
    #[arg(short = 'n', default_value_t = 2)]
    pub n: usize,
    #[arg(short = 'p', default_value_t = 2.0)]
    pub p: f64,
    #[arg(short = 'q', default_value_t = 4.0)]
    pub q: f64,
    /// Direction budget; the default depends on the dimension.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Monte Carlo point-cloud size; exact marginals when omitted.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub no_refine: bool,
}

fn parse_body(s: &str) -> Result<BodyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn body_name<S: serde::Serializer>(b: &BodyKind, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(b.name())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version go to stdout with status 0, usage errors to
            // stderr with status 2.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut common = cli.common;
    common.jobs = Some(common.jobs.unwrap_or_else(heavytail::parallel::default_jobs).max(1));
    match commands::run(&cli.command, &common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("heavytail: {e}");
            ExitCode::from(match e {
                commands::Failure::Usage(_) => 2,
                commands::Failure::Runtime(_) => 1,
            })
        }
    }
}
