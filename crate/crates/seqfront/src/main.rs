use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use seqfront::check::run_checks;
use seqfront::config::{apply_overrides, load_spec};
use seqfront::report::{emit_report, summary, OutputFormat};
use seqfront::runner::run_parallel;
use seqfront::{CliError, Result};
use seqfront_core::experiments::{figure_preset, ExperimentSpec, FigurePreset};

/// Spectral efficiency of sequential fronthaul networks under memory and
/// compression limits.
#[derive(Debug, Parser)]
#[command(name = "seqfront", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment described by a config file and overrides.
    Run(RunArgs),
    /// Run one of the built-in figure presets.
    Figure {
        /// Preset name: fig3, fig5, fig6, fig7, fig8, fig9 or fig10.
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the numerical self-checks.
    Check {
        /// Random instances per check.
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML experiment file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a field, e.g. `--set L=32 --set memory=ft_ea:8MB`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output file. Defaults to `<output-dir>/<preset>.<ext>`.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, env = "SEQFRONT_OUTPUT_DIR", default_value = "results")]
    output_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Small laptop-sized variant: fewer antennas, subcarriers and trials.
    #[arg(long)]
    desk: bool,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (all cores by default).
    #[arg(short, long)]
    jobs: Option<usize>,
    /// Do not print the result table.
    #[arg(short, long)]
    quiet: bool,
}

fn build_spec(base: ExperimentSpec, args: &RunArgs) -> Result<ExperimentSpec> {
    let mut spec = match &args.config {
        Some(path) => load_spec(path)?,
        None => base,
    };
    if args.desk {
        spec = spec.desk();
    }
    spec = apply_overrides(spec, &args.overrides)?;
    if let Some(t) = args.trials {
        spec.num_trials = t;
    }
    if let Some(s) = args.seed {
        spec.base_seed = s;
    }
    spec.validate()?;
    Ok(spec)
}

fn output_path(args: &RunArgs, spec: &ExperimentSpec) -> PathBuf {
    args.output.clone().unwrap_or_else(|| {
        let stem = match spec.preset {
            FigurePreset::Custom => "experiment",
            p => p.name(),
        };
        Path::new(&args.output_dir).join(format!("{stem}.{}", args.format.extension()))
    })
}

fn execute(spec: ExperimentSpec, args: &RunArgs) -> Result<()> {
    let report = run_parallel(&spec, args.jobs)?;
    let path = output_path(args, &spec);
    emit_report(&report, &path, args.format)?;
    if !args.quiet {
        print!("{}", summary(&report));
    }
    eprintln!("wrote {} rows to {}", report.rows.len(), path.display());
    if !report.rows.is_empty() && report.rows.iter().all(|r| !r.is_feasible()) {
        return Err(CliError::Infeasible(
            "no memory/topology combination admits a resource plan".into(),
        ));
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let spec = build_spec(ExperimentSpec::default(), &args)?;
            execute(spec, &args)
        }
        Command::Figure { name, run } => {
            let preset: FigurePreset = name
                .parse()
                .map_err(|e: seqfront_core::Error| CliError::config(e.to_string()))?;
            let spec = build_spec(figure_preset(preset), &run)?;
            execute(spec, &run)
        }
        Command::Check { instances, seed } => {
            let results = run_checks(instances, seed);
            for r in &results {
                println!("{r}");
            }
            match results.iter().filter(|r| !r.passed).count() {
                0 => Ok(()),
                n => Err(CliError::CheckFailed(n)),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
