use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jointstrat::io::{cmd_build_strata, cmd_optimize, cmd_report, cmd_suite, cmd_tune, load_config, Overrides};
use jointstrat::Error;

#[derive(Parser)]
#[command(name = "jointstrat", version, about = "Joint stratification and sample allocation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the basic strata and write basic_strata.csv.
    BuildStrata(Common),
    /// Run the configured pipeline and export the solution.
    Optimize(Common),
    /// Random-search stage hyperparameters.
    Tune(Common),
    /// Tabulate stage reports into benchmark.txt and plot_data.csv.
    Report(Common),
    /// Run a list of presets and tabulate them.
    Suite(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for trials and per-domain work.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory, overriding the config.
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

fn run(command: Command) -> Result<(), Error> {
    let (Command::BuildStrata(c) | Command::Optimize(c) | Command::Tune(c) | Command::Report(c) | Command::Suite(c)) =
        &command;
    let overrides = Overrides {
        seed: c.seed,
        workers: c.workers,
        output: c.out.clone(),
    };
    let config = load_config(&c.config, &overrides)?;
    if let Some(n) = config.run.workers {
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match command {
        Command::BuildStrata(_) => {
            let (path, rows) = cmd_build_strata(&config)?;
            println!("{} basic strata -> {}", rows, path.display());
        }
        Command::Optimize(_) => {
            let s = cmd_optimize(&config)?;
            for r in s.outcome.reports() {
                eprintln!(
                    "stage {} {:<10} n = {:>10.2}  H = {:>5}  {:.3}s",
                    r.stage, r.kind, r.sample_size, r.strata, r.time_s
                );
            }
            println!("{:.2}", s.total);
        }
        Command::Tune(_) => {
            let s = cmd_tune(&config)?;
            let failed = s.outcome.trials.iter().filter(|t| t.error.is_some()).count();
            eprintln!(
                "{} trials ({} failed) -> {}",
                s.outcome.trials.len(),
                failed,
                s.trials_path.display()
            );
            eprintln!("best config -> {}", s.best_config_path.display());
            println!("{:.2}", s.outcome.best_trial().sample_size.unwrap_or(f64::NAN));
        }
        Command::Report(_) => {
            let entries = cmd_report(&config)?;
            println!("{} combinations -> {}", entries.len(), config.run.output.display());
        }
        Command::Suite(_) => {
            let s = cmd_suite(&config)?;
            for (name, out) in &s.runs {
                println!("{:<12} {:.2}", name, out.sample_size());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
