use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tollforge::commands::{self, RunOptions};
use tollforge::config::Config;
use tollforge::report::{write_flows, write_sweep, write_trace_file, SolveReport};
use tollforge::tolls::{read_tolls_file, write_tolls_file};
use tollforge::{Error, Instance, Result};
use tollforge_core::baselines::Rule;

/// Cardinality-constrained congestion pricing.
#[derive(Parser)]
#[command(name = "tollforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// One thread and zero wall times, for byte-identical reports.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Seed for randomized search starts.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Args)]
struct Input {
    /// Built-in instance (`hearn`, `sioux-falls`) or a name under TOLLFORGE_DATA_DIR.
    #[arg(long, conflicts_with_all = ["net", "trips"], required_unless_present = "net")]
    instance: Option<String>,
    /// TNTP network file.
    #[arg(long, requires = "trips")]
    net: Option<PathBuf>,
    /// TNTP trips file.
    #[arg(long, requires = "net")]
    trips: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    /// Report JSON path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Toll table CSV path.
    #[arg(long)]
    tolls_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    H1,
    H2,
    H3,
    H4,
}

impl From<RuleArg> for Rule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::H1 => Rule::H1,
            RuleArg::H2 => Rule::H2,
            RuleArg::H3 => Rule::H3,
            RuleArg::H4 => Rule::H4,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tolled (or untolled) user equilibrium.
    SolveUe {
        #[command(flatten)]
        input: Input,
        /// Toll table CSV `tail,head,toll`.
        #[arg(long)]
        tolls: Option<PathBuf>,
        /// Relative gap target.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Link flow CSV path.
        #[arg(long)]
        flows: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// PBCD for one cardinality budget.
    SolveCbcp {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        kappa: usize,
        /// BCD trace CSV path.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// PBCD over a list of budgets; writes one CSV row per budget.
    Sweep {
        #[command(flatten)]
        input: Input,
        /// Comma-separated budgets.
        #[arg(long, value_delimiter = ',', required = true)]
        kappa: Vec<usize>,
        /// Sweep CSV path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ranking heuristic plus toll search on the chosen links.
    Baseline {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        kappa: usize,
        #[arg(long, value_enum)]
        rule: RuleArg,
        #[command(flatten)]
        output: Output,
    },
    /// Brute-force enumeration of all toll link sets.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        kappa: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Prints the effective configuration as TOML.
    Config,
}

fn load(input: &Input, cfg: &Config) -> Result<Instance> {
    let inst = match (&input.instance, &input.net, &input.trips) {
        (Some(name), _, _) => Instance::named(name)?,
        (None, Some(net), Some(trips)) => Instance::from_files(net, trips, cfg.time_scale)?,
        _ => return Err(Error::Config("give --instance or both --net and --trips".into())),
    };
    commands::prepare(inst, cfg)
}

fn finish(report: &SolveReport, inst: &Instance, tolls: &[f64], output: &Output) -> Result<()> {
    print!("{}", report.summary());
    if let Some(p) = &output.report {
        report.write_json(p)?;
    }
    if let Some(p) = &output.tolls_out {
        write_tolls_file(&inst.raw_network, tolls, p)?;
    }
    Ok(())
}

fn full_tolls(inst: &Instance, report: &SolveReport) -> Vec<f64> {
    let mut u = vec![0.0; inst.network.link_count()];
    for r in &report.tolls {
        if let Some(a) = inst.raw_network.find(r.tail, r.head) {
            u[a] = r.toll;
        }
    }
    u
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|e| Error::io(path, e))
}

/// Returns whether the solver converged.
fn run(cli: Cli) -> Result<bool> {
    let cfg = match &cli.config {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    let mut opts = if cli.deterministic {
        RunOptions::deterministic(cli.seed.unwrap_or(cfg.search.seed))
    } else {
        RunOptions::default()
    };
    if let (Some(t), false) = (cli.threads, cli.deterministic) {
        opts.threads = t;
    }
    if cli.seed.is_some() {
        opts.seed = cli.seed;
    }
    match cli.command {
        Command::SolveUe {
            input,
            tolls,
            tol,
            flows,
            output,
        } => {
            let inst = load(&input, &cfg)?;
            let u = match &tolls {
                Some(p) => Some(read_tolls_file(&inst.raw_network, p)?),
                None => None,
            };
            let (report, state) = commands::solve_ue_report(&inst, u.as_deref(), tol, &cfg, &opts)?;
            if let Some(p) = &flows {
                write_flows(&inst.raw_network, &inst.network, &state.flows, create(p)?)?;
            }
            println!("relative gap {:.3e}", state.relative_gap);
            finish(&report, &inst, &full_tolls(&inst, &report), &output)?;
            Ok(report.converged)
        }
        Command::SolveCbcp {
            input,
            kappa,
            trace,
            output,
        } => {
            let inst = load(&input, &cfg)?;
            let (mut report, out) = commands::solve_cbcp(&inst, kappa, None, &cfg, &opts)?;
            if let Some(p) = &trace {
                write_trace_file(&out.inner_trace, p)?;
                report.trace_path = Some(p.display().to_string());
            }
            finish(&report, &inst, &out.tolls, &output)?;
            Ok(report.converged)
        }
        Command::Sweep { input, kappa, out } => {
            let inst = load(&input, &cfg)?;
            let rows = commands::sweep(&inst, &kappa, &cfg, &opts)?;
            match &out {
                Some(p) => write_sweep(&rows, create(p)?)?,
                None => write_sweep(&rows, std::io::stdout().lock())?,
            }
            Ok(rows.iter().all(|r| r.converged != Some(false)))
        }
        Command::Baseline {
            input,
            kappa,
            rule,
            output,
        } => {
            let inst = load(&input, &cfg)?;
            let report = commands::baseline(&inst, kappa, rule.into(), &cfg, &opts)?;
            finish(&report, &inst, &full_tolls(&inst, &report), &output)?;
            Ok(report.converged)
        }
        Command::Oracle {
            input,
            kappa,
            output,
        } => {
            let inst = load(&input, &cfg)?;
            let report = commands::oracle(&inst, kappa, &cfg, &opts)?;
            finish(&report, &inst, &full_tolls(&inst, &report), &output)?;
            Ok(report.converged)
        }
        Command::Config => {
            print!("{}", cfg.to_toml()?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: solver did not converge; best solution reported");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
