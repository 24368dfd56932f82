//! `botsig`: key lifecycle, signing, and Monte Carlo experiments over the
//! simulated abort-aware primitives.
//!
//! Exit codes: 0 on success, 1 when a verdict is Reject, Fail or ⊥, 2 on
//! usage errors and unreadable or malformed files.

use std::path::PathBuf;
use std::process::ExitCode;

use botsig::harness::report::render_table;
use botsig::harness::ExperimentReport;
use botsig::signatures::envelope::SchemeKind;
use botsig::RandomTape;
use clap::{Parser, Subcommand, ValueEnum};

mod experiments;
mod keys;

#[derive(Parser, Debug)]
#[command(
    name = "botsig",
    version,
    about = "Signatures and pseudorandomness with recognizable abort"
)]
struct Cli {
    /// Seed for the master random tape; drawn from the OS when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for `estimate` and `game`.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a key pair, written to PATH.sk and PATH.vk.
    Keygen {
        #[arg(long)]
        scheme: SchemeKind,
        #[arg(long, default_value = "desk-small")]
        profile: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sign a hex message; the signing key file is updated in place.
    Sign {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        msg: String,
        /// Defaults to the key path with extension `sig`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Verify {
        #[arg(long)]
        vk: PathBuf,
        #[arg(long)]
        msg: String,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Abort rates, pseudodeterminism, and scheme correctness.
    Estimate {
        #[arg(value_enum)]
        what: experiments::Estimate,
        /// `prg`, `owf`, `hash` or `prf` for abort rates and
        /// pseudodeterminism; a scheme name for correctness.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value = "desk-small")]
        profile: String,
        /// Evaluations per key for `pseudodet`.
        #[arg(long, default_value_t = 10)]
        reps: usize,
    },
    /// Distinguishing and forgery games.
    Game {
        #[arg(value_enum)]
        which: experiments::Game,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value = "desk-small")]
        profile: String,
        /// Scheme under attack in `omsuf` and `suf`.
        #[arg(long)]
        scheme: Option<SchemeKind>,
        /// Evaluations shown in `multitime`, oracle budget in `prf`.
        #[arg(long, default_value_t = 4)]
        queries: usize,
    },
    /// Decryption failure of the q-fold repetition of a bit encryption.
    PkeDemo {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Print a profile with its derived sizes and correctness bounds.
    Params {
        #[arg(long, default_value = "desk-small")]
        profile: String,
    },
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

pub type CliResult<T> = Result<T, UsageError>;

pub fn emit_reports(reports: &[ExperimentReport], format: Format) -> bool {
    match format {
        Format::Json => reports.iter().for_each(|r| println!("{}", r.to_json_line())),
        Format::Table => print!("{}", render_table(reports)),
    }
    reports.iter().all(ExperimentReport::passed)
}

fn run(cli: Cli) -> CliResult<bool> {
    let mut tape = RandomTape::from_seed(cli.seed.unwrap_or_else(rand::random));
    let format = cli.format;
    let pool = match cli.jobs {
        Some(0) => return Err(UsageError("--jobs must be positive".into())),
        Some(n) => Some(rayon::ThreadPoolBuilder::new().num_threads(n).build()?),
        None => None,
    };
    let parallel = |f: &mut (dyn FnMut() -> CliResult<bool> + Send)| match &pool {
        Some(p) => p.install(f),
        None => f(),
    };
    match cli.command {
        Command::Keygen { scheme, profile, out } => keys::keygen(scheme, &profile, &out, format, &mut tape),
        Command::Sign { key, msg, out } => keys::sign(&key, &msg, out.as_deref(), format, &mut tape),
        Command::Verify { vk, msg, sig } => keys::verify(&vk, &msg, &sig, format, &mut tape),
        Command::Estimate {
            what,
            target,
            trials,
            profile,
            reps,
        } => parallel(&mut || experiments::estimate(what, &target, trials, &profile, reps, format, &mut tape)),
        Command::Game {
            which,
            trials,
            profile,
            scheme,
            queries,
        } => parallel(&mut || experiments::game(which, trials, &profile, scheme, queries, format, &mut tape)),
        Command::PkeDemo { q, delta, trials } => experiments::pke_demo(q, delta, trials, format, &mut tape),
        Command::Params { profile } => experiments::params(&profile, format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("botsig: {msg}");
            ExitCode::from(2)
        }
    }
}
