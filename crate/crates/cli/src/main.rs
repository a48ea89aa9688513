//! `bqs`: run protocols, attacks, experiments and lemma suites from the shell.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on invariant violations
//! and infeasible parameters.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "bqs", version, about = "Bounded-quantum-storage OT and commitment laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by the protocol-running subcommands. Precedence: flags,
/// then `--config`, then `BQS_SEED` for the seed, then built-in defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Experiment seed (default: $BQS_SEED, else 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSONL artifact path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Qubits sent.
    #[arg(long)]
    pub n: Option<u64>,
    /// Output string length.
    #[arg(long)]
    pub ell: Option<u64>,
    /// Receiver quantum memory bound.
    #[arg(long)]
    pub m: Option<u64>,
    /// Auxiliary-input bound in qubits.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// legacy or refined.
    #[arg(long)]
    pub model: Option<String>,
    /// Also check the memory bound after every round.
    #[arg(long)]
    pub every_round: bool,
    /// Refuse to run when ℓ exceeds the proven secure length.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub max_qubits: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Honest BQS-OT executions.
    RunRot {
        #[command(flatten)]
        common: Common,
    },
    /// OT of chosen strings on top of one ROT call.
    RunOt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x0: Option<String>,
        #[arg(long)]
        x1: Option<String>,
        /// Choice bit (random when omitted).
        #[arg(long)]
        c: Option<u8>,
        /// ideal or bqs.
        #[arg(long, default_value = "bqs")]
        inner: String,
    },
    /// Bit commitment over reversed ROT.
    RunBc {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        b: u8,
        /// 1 opens, 0 sends the empty opening.
        #[arg(long, default_value_t = 1)]
        a: u8,
        /// honest or cheat.
        #[arg(long, default_value = "honest")]
        committer: String,
        /// ideal or bqs.
        #[arg(long, default_value = "ideal")]
        inner: String,
    },
    /// Commitment over BQS-TO with phase tracking and the error budget.
    ComposeBc {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        b: u8,
        #[arg(long, default_value_t = 1)]
        a: u8,
        /// honest or cheat.
        #[arg(long, default_value = "honest")]
        committer: String,
        /// ideal or bqs.
        #[arg(long, default_value = "bqs")]
        inner: String,
    },
    /// Mount a named attack.
    Attack {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        name: String,
        /// Basis for fixed-basis.
        #[arg(long)]
        c: Option<u8>,
    },
    /// Every bound for one parameter set.
    Params {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        ell: u64,
        #[arg(long, default_value_t = 0)]
        m: u64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        q: u64,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 0)]
        s: u64,
        /// main, pure-aux or mixed-aux.
        #[arg(long, default_value = "main")]
        variant: String,
    },
    /// Randomized lemma suites, or one suite on a CSV distribution table.
    VerifyLemmas {
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        cases: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Distribution table (outcome columns, then probability).
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Second smoothing parameter for the chain rule.
        #[arg(long, default_value_t = 0.1)]
        eps2: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
    },
    /// Real-vs-ideal experiment.
    Distinguish {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: Option<String>,
    },
}

pub enum CliError {
    Usage(String),
    Violation(String),
}

fn run(cli: Cli) -> commands::Outcome {
    use commands::*;
    match cli.command {
        Command::RunRot { common } => run_rot(&common),
        Command::RunOt { common, x0, x1, c, inner } => run_ot(&common, x0, x1, c, &inner),
        Command::RunBc { common, b, a, committer, inner } => run_bc(&common, b, a, &committer, &inner),
        Command::ComposeBc { common, b, a, committer, inner } => compose(&common, b, a, &committer, &inner),
        Command::Attack { common, name, c } => attack(&common, &name, c),
        Command::Params { n, ell, m, beta, eps, q, lambda, s, variant } => {
            params(n, ell, m, beta, eps, q, lambda, s, &variant)
        }
        Command::VerifyLemmas { suite, cases, seed, table, eps, eps2, beta } => {
            verify_lemmas(&suite, cases, seed, table, eps, eps2, beta)
        }
        Command::Distinguish { common, scenario } => distinguish(&common, scenario),
    }
}

/// Prints to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((summary, ok)) => {
            emit(&serde_json::to_string_pretty(&summary).expect("summary serializes"));
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Violation(msg)) => {
            emit(&serde_json::json!({ "error": msg, "violation": true }).to_string());
            eprintln!("violation: {msg}");
            ExitCode::from(2)
        }
    }
}
