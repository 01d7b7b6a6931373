use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use whlab::cli::report::{emit_report, to_json_bytes};
use whlab::cli::{self, ModelChoice, Suite, SuiteConfig};
use whlab::io::SetSequenceJson;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNREADABLE: u8 = 3;
const EXIT_MALFORMED: u8 = 4;
const EXIT_OUTPUT: u8 = 5;

#[derive(Parser)]
#[command(name = "whlab", version, about = "Verification suites for Wiener-Hopf operators over semigroup actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an invariant suite and write a JSON report.
    Verify(VerifyArgs),
    /// Fell-topology utilities.
    Fell {
        #[command(subcommand)]
        command: FellCommand,
    },
}

#[derive(Args)]
struct VerifyArgs {
    suite: Suite,
    /// Run a single dimension instead of the suite's default range.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = cli::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = cli::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, env = "WHLAB_TOL", default_value_t = cli::DEFAULT_TOL)]
    tol: f64,
    /// Truncation level of the Toeplitz and groupoid suites.
    #[arg(long = "N", default_value_t = cli::DEFAULT_N)]
    n: usize,
    #[arg(long, default_value_t = cli::DEFAULT_GRID_STEP)]
    grid_step: f64,
    #[arg(long, value_enum, default_value_t = ModelChoice::Both)]
    model: ModelChoice,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FellCommand {
    /// Discretised Fell limit of a set sequence.
    Converge {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn verify(args: VerifyArgs) -> u8 {
    let cfg = SuiteConfig {
        suite: args.suite,
        dim: args.dim,
        trials: args.trials,
        seed: args.seed,
        tol: args.tol,
        n: args.n,
        grid_step: args.grid_step,
        model: args.model,
    };
    let start = Instant::now();
    let report = match cli::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("whlab: {e}");
            return EXIT_USAGE;
        }
    };
    eprintln!("wall_time: {:.3}s", start.elapsed().as_secs_f64());
    for case in report.failures() {
        eprintln!("FAIL {}: {}", case.name, case.details);
    }
    if let Err(e) = emit_report(&report, args.out.as_deref()) {
        eprintln!("whlab: cannot write report: {e}");
        return EXIT_OUTPUT;
    }
    if report.passed() {
        0
    } else {
        EXIT_FAILURE
    }
}

fn converge(input: PathBuf, out: Option<PathBuf>) -> u8 {
    let text = match std::fs::read_to_string(&input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("whlab: cannot read {}: {e}", input.display());
            return EXIT_UNREADABLE;
        }
    };
    let seq: SetSequenceJson = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("whlab: malformed set sequence: {e}");
            return EXIT_MALFORMED;
        }
    };
    let result = match cli::converge(&seq) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("whlab: invalid set sequence: {e}");
            return EXIT_MALFORMED;
        }
    };
    let bytes = match to_json_bytes(&result) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("whlab: {e}");
            return EXIT_OUTPUT;
        }
    };
    let written = match out {
        Some(p) => std::fs::write(p, bytes),
        None => std::io::Write::write_all(&mut std::io::stdout().lock(), &bytes),
    };
    if let Err(e) = written {
        eprintln!("whlab: cannot write result: {e}");
        return EXIT_OUTPUT;
    }
    0
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify(args) => verify(args),
        Command::Fell {
            command: FellCommand::Converge { input, out },
        } => converge(input, out),
    };
    ExitCode::from(code)
}
