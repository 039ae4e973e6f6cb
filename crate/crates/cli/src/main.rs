//! `qsym`: exact q-Bernoulli values, symmetry verification and p-adic checks.
//!
//! Exit codes: 0 verified, 1 falsified, 2 usage or input error.

mod certificate;
mod commands;
mod sweep;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "qsym",
    version,
    about = "Exact q-Bernoulli arithmetic and symmetry certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Carlitz q-Bernoulli number beta_{n,q}.
    Beta {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: String,
    },
    /// q-Bernoulli polynomial beta_{n,q}(x) at an integer x.
    BetaPoly {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        x: i64,
    },
    /// T-sum T_{m,q}(w_1, ..., w_{n-1} | l).
    Tsum {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        q: String,
        /// Comma-separated weights w_1,...,w_{n-1}.
        #[arg(long, value_delimiter = ',')]
        w: Vec<u64>,
    },
    /// Check a symmetry identity over every permutation of the weights.
    Verify(VerifyArgs),
    /// Check a p-adic q-integral identity to finite precision.
    Padic(PadicArgs),
    /// Run a grid of checks from a JSON config and write one certificate per point.
    Sweep { config: std::path::PathBuf },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    Thm1,
    Thm2,
    Thm3,
    Cross,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub kind: VerifyKind,
    /// Number of weights; defaults to the length of --w.
    #[arg(long)]
    pub n: Option<usize>,
    /// Series order (maximal order for thm1).
    #[arg(long = "m", visible_alias = "M", default_value_t = 0)]
    pub m: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub x: i64,
    #[arg(long, default_value = "2", allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub w: Vec<u64>,
    /// Maximal number of permutations to evaluate.
    #[arg(long, default_value_t = qsym_core::symmetry::DEFAULT_PERMUTATION_BUDGET)]
    pub budget: u128,
}

#[derive(
    Copy,
    Clone,
    Debug,
    PartialEq,
    Eq,
    PartialOrd,
    Ord,
    ValueEnum,
    serde::Serialize,
    serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum PadicCheck {
    /// q I_q(f_1) - I_q(f) against (q-1) f(0) + (q-1)/log q f'(0).
    Eq2,
    /// Partial sums of the integral of [x+y]_q^n against beta_{n,q}(x).
    Eq6,
    /// The difference equation on [x]_q^n against its tabulated value.
    Eq7,
}

#[derive(Args, Debug)]
pub struct PadicArgs {
    pub check: PadicCheck,
    /// Odd prime.
    #[arg(long)]
    pub p: u32,
    /// u in q = 1 + p u; must be nonzero.
    #[arg(long = "q-offset", default_value_t = 1, allow_hyphen_values = true)]
    pub q_offset: i64,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Evaluation point for eq6.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub x: i64,
    #[arg(long = "N-max", default_value_t = 6)]
    pub n_max: u32,
    /// Target p-adic precision in digits.
    #[arg(long, default_value_t = 12)]
    pub precision: u32,
    /// For eq2: coefficients "k:c,k:c" of f(x) = sum c_k q^{kx}; defaults to [x]_q^n.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
}

#[derive(Debug)]
pub enum Outcome {
    Verified,
    Falsified,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Beta { n, q } => commands::beta(n, &q),
        Command::BetaPoly { n, q, x } => commands::beta_poly(n, &q, x),
        Command::Tsum { m, l, q, w } => commands::tsum(m, l, &q, &w),
        Command::Verify(args) => commands::verify(&args),
        Command::Padic(args) => commands::padic(&args),
        Command::Sweep { config } => sweep::run(&config),
    };
    match result {
        Ok(Outcome::Verified) => ExitCode::SUCCESS,
        Ok(Outcome::Falsified) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
