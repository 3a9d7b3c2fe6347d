use clap::{Args, Parser, Subcommand};
use randopt_cli::{apply_overrides, emit_report, run_experiment, CliError, Experiment, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Random-instance optimization experiments.
#[derive(Parser)]
#[command(name = "randopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances with sidecars.
    Gen(RunArgs),
    /// Greedy and exact cliques or independent sets on random graphs.
    Graphopt(RunArgs),
    /// Spin-glass ground states, annealing and guided walks.
    Spin(RunArgs),
    /// Minimize the variational functional.
    Parisi(RunArgs),
    /// Satisfiability sweep over clause densities.
    Ksat(RunArgs),
    /// Overlap-gap probes on near-optimal solution sets.
    Ogp(RunArgs),
    /// Verify a run directory and summarize its outputs.
    Report {
        /// Run directory containing manifest.json.
        dir: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to runs/<experiment>-<seed>.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, short)]
    jobs: Option<usize>,
    /// Override a config key, e.g. `--set trials=20` or `--set ksat.n=100`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn run(exp: Experiment, args: RunArgs) -> Result<(), CliError> {
    let mut doc = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                context: format!("reading {}", p.display()),
                source,
            })?;
            text.parse::<toml::Value>()
                .map_err(|e| CliError::config(p.display().to_string(), e.message().to_string()))?
        }
        None => toml::Value::Table(Default::default()),
    };
    apply_overrides(&mut doc, exp.name(), &args.overrides)?;
    let mut config = ExperimentConfig::from_value(doc)?;
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(j) = args.jobs {
        config.jobs = Some(j);
    }
    let out = args
        .out
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from(format!("runs/{}-{}", exp.name(), config.seed)));
    let manifest = run_experiment(&config, exp, &out)?;
    println!(
        "{}: {} output file(s), {} instance(s) -> {}",
        manifest.experiment,
        manifest.outputs.len(),
        manifest.instances.len(),
        out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => run(Experiment::Gen, a),
        Command::Graphopt(a) => run(Experiment::Graphopt, a),
        Command::Spin(a) => run(Experiment::Spin, a),
        Command::Parisi(a) => run(Experiment::Parisi, a),
        Command::Ksat(a) => run(Experiment::Ksat, a),
        Command::Ogp(a) => run(Experiment::Ogp, a),
        Command::Report { dir } => match emit_report(&dir) {
            Ok(r) => {
                println!("{r}");
                if r.is_clean() {
                    Ok(())
                } else {
                    return ExitCode::from(3);
                }
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Config { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
