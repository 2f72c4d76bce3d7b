mod commands;
mod weights;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qweyl_core::{CartanData, Error};
use serde::Serialize;

#[derive(Subcommand, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Extremal monomials and l-weights along the Weyl orbit of a fundamental weight
    Orbit,
    /// Factored and expanded form of a rational character chi
    Chi,
    /// Sigma-series of one branch and its difference-equation residual
    Sigma,
    /// Image of a Laurent polynomial under Theta_w, expanded in the identity component
    Theta,
    /// The normalized Q-series of an orbit point, compared with the closed form when one is known
    QSeries,
    /// Verify the extended QQ-system
    QqVerify,
    /// Verify the extended TQ-relations for the built-in q-characters
    TqVerify,
    /// Verify braid relations for T and T'
    BraidCheck,
    /// Shifted-character report for an orbit point
    ShiftedChar,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BranchArg {
    E,
    Si,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunConfig {
    /// Built-in type such as A2, B2, G2, A1xA1, B3
    #[arg(long = "type", global = true, conflicts_with = "matrix")]
    pub type_label: Option<String>,
    /// JSON file holding a Cartan matrix
    #[arg(long, global = true)]
    pub matrix: Option<PathBuf>,
    /// Truncation height N
    #[arg(long, global = true, default_value_t = 4)]
    pub height: usize,
    /// Weyl word(s); separate several with `;`
    #[arg(long, global = true)]
    pub weyl: Option<String>,
    #[arg(long, global = true)]
    pub node: Option<usize>,
    /// Spectral exponent r of a = q^r
    #[arg(long, global = true, default_value_t = 0, allow_hyphen_values = true)]
    pub shift: i32,
    /// Weight such as `-w2`, `w1-2w2` or `[1,-2]`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub weight: Option<String>,
    /// Laurent polynomial for `theta`, e.g. `Y[1,0] + Y[1,2]^-1`
    #[arg(long, global = true)]
    pub poly: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub branch: Option<BranchArg>,
    /// Only Weyl elements up to this length
    #[arg(long, global = true)]
    pub max_len: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for sampled checks
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Parser, Debug)]
#[command(name = "qweyl", version, about = "Exact computations with q-characters, Weyl operators, Q-series and QQ/TQ relations")]
struct Full {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

pub struct Outcome {
    pub text: String,
    pub cases: Vec<serde_json::Value>,
    pub ok: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    tool_version: &'static str,
    command: Command,
    config: &'a RunConfig,
    status: &'static str,
    cases: &'a [serde_json::Value],
}

fn usage_error(e: &Error) -> bool {
    matches!(e, Error::UnknownType(_) | Error::InvalidCartan(_) | Error::NotReduced(_) | Error::BadNode { .. } | Error::Parse(_) | Error::Catalog(_) | Error::Contract(_))
}

fn load_type(cfg: &RunConfig) -> qweyl_core::Result<CartanData> {
    match (&cfg.type_label, &cfg.matrix) {
        (Some(t), _) => CartanData::from_label(t),
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            CartanData::from_json(&text)
        }
        (None, None) => Err(Error::Parse("one of --type or --matrix is required".into())),
    }
}

fn main() -> ExitCode {
    let full = match Full::try_parse() {
        Ok(f) => f,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = full.config;
    if let Some(j) = cfg.jobs {
        if rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global().is_err() {
            eprintln!("error: could not configure {j} worker threads");
            return ExitCode::from(2);
        }
    }
    let result = load_type(&cfg).and_then(|cd| commands::run(full.command, &cd, &cfg));
    match result {
        Ok(out) => {
            match cfg.format {
                Format::Text => print!("{}", out.text),
                Format::Json => {
                    let report = Report {
                        tool_version: env!("CARGO_PKG_VERSION"),
                        command: full.command,
                        config: &cfg,
                        status: if out.ok { "pass" } else { "fail" },
                        cases: &out.cases,
                    };
                    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
                }
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if usage_error(&e) { 2 } else { 1 })
        }
    }
}
