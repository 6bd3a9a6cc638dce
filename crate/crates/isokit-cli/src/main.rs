//! `isokit`: exact checks for conformal-factor identities, potentials and
//! algebraic-function branching.
//!
//! Exit status: 0 when all requested checks pass, 1 when any check fails,
//! 2 on input errors. All reported numbers are exact rational strings;
//! only monodromy path diagnostics are floating point, labeled as such.

mod problem;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use problem::{parse_problem, print_problem, ProblemError, ProblemFile};
use run::{run_command, RunError, Runtime};

#[derive(Parser)]
#[command(
    name = "isokit",
    version,
    about = "Exact-arithmetic toolkit for holomorphic isometry identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Problem file (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Truncation order override.
    #[arg(long, global = true)]
    order: Option<u32>,
    /// Enumeration bound override.
    #[arg(long, global = true)]
    bound: Option<u32>,
    /// Emit a structured JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Process instances concurrently (report order is preserved).
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Check the weighted log-residual of each identity instance.
    Verify,
    /// Decide the nonnegative-rational cone condition.
    Cone,
    /// Enumerate bounded solutions of the integer factor equation.
    Factors,
    /// Build the degree-k monomial map and check its defining identity.
    Veronese {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
    },
    /// Decide resolvability of a potential up to the working degree.
    Resolvable,
    /// Factor a potential as A * h^m.
    Factor,
    /// Expand branches of an algebraic function at a center.
    Puiseux,
    /// Continue branches along a loop and report the permutation.
    Monodromy,
    /// Classify local branching at a point.
    Classify,
    /// Construct the weighted-form example instance and verify it.
    Example62,
    /// Parse a problem file and echo it canonically.
    Echo,
}

fn main() -> ExitCode {
    if let Ok(cap) = std::env::var("ISOKIT_REFINE_CAP") {
        match cap.parse::<u32>() {
            Ok(v) => isokit::scalar::set_refine_cap(v),
            Err(_) => {
                eprintln!("error: ISOKIT_REFINE_CAP must be an unsigned integer");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

enum TopError {
    Io(String),
    Problem(ProblemError),
    Usage(String),
}

impl std::fmt::Display for TopError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TopError::Io(m) => write!(f, "{m}"),
            TopError::Problem(p) => write!(f, "{p}"),
            TopError::Usage(m) => write!(f, "{m}"),
        }
    }
}

fn load(cli: &Cli) -> Result<ProblemFile, TopError> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| TopError::Usage("this command requires --input <file>".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| TopError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text).map_err(TopError::Problem)
}

fn dispatch(cli: &Cli) -> Result<bool, TopError> {
    let rt = Runtime {
        order: cli.order,
        bound: cli.bound,
        json: cli.json,
        parallel: cli.parallel,
    };
    match cli.command {
        Command::Veronese { n, k } => {
            let report = run::run_veronese(n, k);
            Ok(run::emit(&rt, "veronese", vec![report]))
        }
        Command::Echo => {
            let file = load(cli)?;
            use std::io::Write as _;
            let text = print_problem(&file);
            let _ = writeln!(std::io::stdout(), "{text}");
            Ok(true)
        }
        cmd => {
            let file = load(cli)?;
            let name = match cmd {
                Command::Verify => "verify",
                Command::Cone => "cone",
                Command::Factors => "factors",
                Command::Resolvable => "resolvable",
                Command::Factor => "factor",
                Command::Puiseux => "puiseux",
                Command::Monodromy => "monodromy",
                Command::Classify => "classify",
                Command::Example62 => "example62",
                Command::Veronese { .. } | Command::Echo => unreachable!(),
            };
            let reports = run_instances(&file, name, &rt)?;
            Ok(run::emit(&rt, name, reports))
        }
    }
}

fn run_instances(
    file: &ProblemFile,
    command: &str,
    rt: &Runtime,
) -> Result<Vec<run::InstanceReport>, TopError> {
    let jobs: Vec<usize> = (0..file.instances.len()).collect();
    let run_one = |idx: usize| -> run::InstanceReport {
        match run_command(file, idx, command, rt) {
            Ok(rep) => rep,
            Err(RunError::Input(msg)) => {
                run::InstanceReport::input_error(&file.instances[idx].name, idx, &msg)
            }
        }
    };
    let reports: Vec<run::InstanceReport> = if rt.parallel {
        let mut out: Vec<Option<run::InstanceReport>> = Vec::new();
        out.resize_with(jobs.len(), || None);
        std::thread::scope(|scope| {
            let handles: Vec<_> = jobs
                .iter()
                .map(|&idx| scope.spawn(move || (idx, run_one(idx))))
                .collect();
            for h in handles {
                let (idx, rep) = h.join().expect("worker panicked");
                out[idx] = Some(rep);
            }
        });
        out.into_iter().map(Option::unwrap).collect()
    } else {
        jobs.into_iter().map(run_one).collect()
    };
    // instance-level input errors escalate to exit code 2
    if let Some(rep) = reports.iter().find(|r| r.input_error) {
        return Err(TopError::Usage(format!(
            "instance {} ({}): {}",
            rep.index,
            rep.name,
            rep.message.clone().unwrap_or_default()
        )));
    }
    Ok(reports)
}
