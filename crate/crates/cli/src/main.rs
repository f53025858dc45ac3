use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use imc_cli::commands::{
    cmd_check_reversible, cmd_reverse, cmd_walk, effective_tolerance, run_oracle, Bound, ExpectationReport, Query,
};
use imc_cli::examples::{render_text, reproduce, ExpectedValues};
use imc_cli::model::{read_json, ModelFile, RawModel};
use imc_cli::{CliError, CliResult};
use imprecise_markov::lp::DEFAULT_BUDGET;
use imprecise_markov::{Rational, Scalar};
use serde_json::Value;

#[derive(Parser)]
#[command(
    name = "imarkov",
    version,
    about = "Precise and credal Markov chains via joint matrices"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Exact rational arithmetic (default).
    #[arg(long, global = true, conflicts_with = "float")]
    rational: bool,
    /// Double-precision arithmetic.
    #[arg(long, global = true)]
    float: bool,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Maximum number of LP variables or enumerated paths.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Equality and LP slack, overriding the model file.
    #[arg(long, global = true, value_name = "EPS")]
    tol: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Time-reverse a law, joint sequence, interval box or weights.
    Reverse {
        model: PathBuf,
        /// Write the reversed model here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether the joint-matrix set is closed under transposition.
    CheckReversible { model: PathBuf },
    /// Lower (or upper) expectation of a gamble over the model.
    LowerExpectation {
        model: PathBuf,
        gamble: PathBuf,
        /// Path length N; a two-state-pair gamble is summed over consecutive pairs.
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, value_enum, default_value_t = Bound::Lower)]
        sense: Bound,
        /// Compare against a brute-force grid (float mode).
        #[arg(long)]
        oracle: bool,
        /// Write the linear program in CPLEX LP format.
        #[arg(long, value_name = "FILE")]
        dump_lp: Option<PathBuf>,
    },
    /// Transition matrix, stationary law and joint matrix of a weighted walk.
    Walk { model: PathBuf },
    /// Recompute the reference worked examples exactly.
    ReproduceExamples,
}

fn emit(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn emit_json(v: &Value) -> CliResult<()> {
    emit(&format!("{}\n", serde_json::to_string_pretty(v)?))
}

fn write_file(path: &PathBuf, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })
}

fn run_mode<T: Scalar>(g: &Global, command: &Command) -> CliResult<()> {
    match command {
        Command::Reverse { model, output } => {
            let file = ModelFile::<T>::from_raw(&RawModel::read(model)?)?;
            let tol = effective_tolerance(&file, g.tol.as_deref())?;
            let text = cmd_reverse(&file, &tol)?.to_pretty();
            match output {
                Some(path) => write_file(path, &text),
                None => emit(&text),
            }
        }
        Command::CheckReversible { model } => {
            let file = ModelFile::<T>::from_raw(&RawModel::read(model)?)?;
            let tol = effective_tolerance(&file, g.tol.as_deref())?;
            let report = cmd_check_reversible(&file, &tol)?;
            if g.json {
                emit_json(&report.json())
            } else {
                emit(&report.text(&file.states))
            }
        }
        Command::LowerExpectation {
            model,
            gamble,
            horizon,
            sense,
            oracle,
            dump_lp,
        } => {
            let raw = RawModel::read(model)?;
            let gamble = read_json(gamble)?;
            let file = ModelFile::<T>::from_raw(&raw)?;
            let tol = effective_tolerance(&file, g.tol.as_deref())?;
            let query = Query::resolve(&file, &gamble, *horizon, &tol)?;
            if let Some(path) = dump_lp {
                match query.program(*sense, g.budget)? {
                    Some(lp) => write_file(path, &lp.to_lp_format())?,
                    None => log::warn!("precise model: no linear program to write"),
                }
            }
            let value = query.evaluate(*sense, g.budget, &tol)?;
            let oracle = if *oracle {
                let ffile = ModelFile::<f64>::from_raw(&raw)?;
                let ftol = effective_tolerance(&ffile, g.tol.as_deref())?;
                let fquery = Query::resolve(&ffile, &gamble, *horizon, &ftol)?;
                Some(run_oracle(&fquery, *sense, &ftol)?)
            } else {
                None
            };
            let report = ExpectationReport {
                bound: *sense,
                horizon: query.horizon(),
                value,
                oracle,
            };
            if g.json {
                emit_json(&report.json())
            } else {
                emit(&report.text())
            }
        }
        Command::Walk { model } => {
            let file = ModelFile::<T>::from_raw(&RawModel::read(model)?)?;
            let tol = effective_tolerance(&file, g.tol.as_deref())?;
            let report = cmd_walk(&file, &tol)?;
            if g.json {
                emit_json(&report.json())
            } else {
                emit(&report.text())
            }
        }
        Command::ReproduceExamples => {
            let checks = reproduce(&ExpectedValues::reference())?;
            if g.json {
                emit_json(&serde_json::to_value(&checks)?)?;
            } else {
                emit(&render_text(&checks))?;
            }
            match checks.iter().filter(|c| !c.pass).count() {
                0 => Ok(()),
                n => Err(CliError::AssertionFailed(n)),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = if cli.global.float {
        run_mode::<f64>(&cli.global, &cli.command)
    } else {
        run_mode::<Rational>(&cli.global, &cli.command)
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("imarkov: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
