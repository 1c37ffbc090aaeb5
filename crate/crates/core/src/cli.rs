//! The `bbt` command-line front end.
//!
//! Exit codes: 0 success, 1 file or parse error, 2 planning error,
//! 3 simulation limits exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use log::info;

use crate::belief::PhysicalState;
use crate::classic::monte_carlo;
use crate::domain::{ground, parse_domain, GroundedDomain};
use crate::dot::to_dot;
use crate::exec::{initial_belief, simulate, SimulationLimits};
use crate::planner::{refine_tree, PlanRequest};
use crate::tree::Node;
use crate::treefile;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_PLANNING: i32 = 2;
pub const EXIT_LIMITS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "bbt", version, about = "Plan, simulate and execute Belief Behavior Trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a tree for the domain's goal.
    Plan(PlanArgs),
    /// Exhaustively simulate a tree and print its terminal distribution.
    Simulate(TreeArgs),
    /// Monte Carlo execution with sampled outcomes.
    Exec(ExecArgs),
    /// Write a tree as a Graphviz digraph.
    ExportDot(DotArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Domain definition file.
    #[arg(long, value_name = "PATH")]
    domain: PathBuf,
    #[arg(long, value_name = "UINT", default_value_t = 10_000)]
    max_ticks: usize,
    #[arg(long, value_name = "UINT", default_value_t = 100_000)]
    max_entries: usize,
    #[arg(long, value_name = "FLOAT", default_value_t = 0.0)]
    prune_epsilon: f64,
}

impl Common {
    fn limits(&self) -> SimulationLimits {
        SimulationLimits {
            max_root_ticks: self.max_ticks,
            max_entries: self.max_entries,
            prune_epsilon: self.prune_epsilon,
        }
    }
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[command(flatten)]
    common: Common,
    /// Where to write the synthesized tree.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Also write the tree as DOT.
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// Target success probability, overriding the domain's goal.
    #[arg(long, value_name = "FLOAT")]
    prob: Option<f64>,
}

#[derive(Debug, Args)]
struct TreeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_name = "PATH")]
    tree: PathBuf,
}

#[derive(Debug, Args)]
struct ExecArgs {
    #[command(flatten)]
    inner: TreeArgs,
    #[arg(long, value_name = "UINT")]
    seed: u64,
    #[arg(long, value_name = "UINT", value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
}

#[derive(Debug, Args)]
struct DotArgs {
    #[arg(long, value_name = "PATH")]
    domain: PathBuf,
    #[arg(long, value_name = "PATH")]
    tree: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// Maps an error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        e if e.is_limit() => EXIT_LIMITS,
        Error::EmptyGoal
        | Error::NothingFailed
        | Error::NoFailedCondition
        | Error::NoResolver { .. }
        | Error::UnresolvableThreat { .. }
        | Error::IterationLimit { .. }
        | Error::InvalidRequest(_)
        | Error::NoPending => EXIT_PLANNING,
        _ => EXIT_INPUT,
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn context(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure {
        code: exit_code(&e),
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| context(path)(e.into()))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| context(path)(e.into()))
}

fn load_domain(path: &Path) -> Result<GroundedDomain, Failure> {
    let text = read(path)?;
    let spec = parse_domain(&text).map_err(|e| context(path)(e.into()))?;
    let domain = ground(&spec).map_err(context(path))?;
    for w in domain.warnings() {
        log::warn!("{}: {w}", path.display());
    }
    Ok(domain)
}

fn load_tree(path: &Path, domain: &GroundedDomain) -> Result<Node, Failure> {
    treefile::from_json(&read(path)?, domain).map_err(context(path))
}

fn cmd_plan(args: &PlanArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let domain = load_domain(&args.common.domain)?;
    let mut request = PlanRequest::from_domain(&domain)?;
    request.limits = args.common.limits();
    if let Some(p) = args.prob {
        request.target_probability = p;
    }
    let plan = refine_tree(&request)?;
    write(&args.out, &treefile::to_json(&plan.tree, &domain)?)?;
    info!("wrote {}", args.out.display());
    if let Some(dot) = &args.dot {
        write(dot, &to_dot(&plan.tree, &domain))?;
    }
    let _ = write!(out, "{}", plan.log_text());
    let _ = writeln!(out, "success_probability {:.6}", plan.probability);
    Ok(())
}

fn cmd_simulate(args: &TreeArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let domain = load_domain(&args.common.domain)?;
    let tree = load_tree(&args.tree, &domain)?;
    let res = simulate(&domain, &tree, &initial_belief(&domain), &args.common.limits())?;
    let _ = write!(out, "{}", res.terminal.dump(&domain));
    let _ = writeln!(out, "ticks_used {}", res.ticks_used);
    if args.common.prune_epsilon > 0.0 {
        let _ = writeln!(out, "pruned_mass {:.12}", res.pruned_mass);
    }
    let _ = writeln!(out, "success_probability {:.6}", res.success_probability());
    Ok(())
}

fn cmd_exec(args: &ExecArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let common = &args.inner.common;
    let domain = load_domain(&common.domain)?;
    let tree = load_tree(&args.inner.tree, &domain)?;
    let limits = common.limits();
    let analytical = simulate(&domain, &tree, &initial_belief(&domain), &limits)?.success_probability();
    let initial = PhysicalState::new(domain.initial().to_vec());
    let summary = monte_carlo(&domain, &tree, &initial, args.seed, args.runs, limits.max_root_ticks)?;
    let rate = summary.success_rate();
    let se = (analytical * (1.0 - analytical) / summary.runs as f64).sqrt();
    let _ = writeln!(out, "runs {}", summary.runs);
    let _ = writeln!(out, "successes {}", summary.successes);
    let _ = writeln!(out, "empirical_rate {rate:.6}");
    let _ = writeln!(out, "analytical_probability {analytical:.6}");
    let _ = writeln!(out, "standard_error {se:.6}");
    Ok(())
}

fn cmd_export_dot(args: &DotArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let domain = load_domain(&args.domain)?;
    let tree = load_tree(&args.tree, &domain)?;
    let dot = to_dot(&tree, &domain);
    match &args.out {
        Some(path) => write(path, &dot)?,
        None => {
            let _ = write!(out, "{dot}");
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_INPUT
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Plan(a) => cmd_plan(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Exec(a) => cmd_exec(a, out),
        Command::ExportDot(a) => cmd_export_dot(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
