use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use levy_hjm::experiment::{self, load_config, RunOptions};

#[derive(Parser)]
#[command(name = "levy-hjm", version, about = "Lévy-driven HJM forward-rate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the measure into existence / non-existence / indeterminate.
    Classify(Common),
    /// Tabulate J, J' and J'' on a log grid.
    ExponentTable(Common),
    /// Simulate jump paths and coefficient fields.
    Simulate(Common),
    /// Solve the forward-rate fixed point per seed.
    Solve(Common),
    /// Sweep initial levels and grid sizes in the non-existence regime.
    ExplodeStudy(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long = "master-seed")]
    master_seed: Option<u64>,
    #[arg(long, env = "HJM_WORKERS")]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, fn(&_, &_) -> _) = match &cli.command {
        Command::Classify(c) => (c, experiment::cmd_classify),
        Command::ExponentTable(c) => (c, experiment::cmd_exponent_table),
        Command::Simulate(c) => (c, experiment::cmd_simulate),
        Command::Solve(c) => (c, experiment::cmd_solve),
        Command::ExplodeStudy(c) => (c, experiment::cmd_explode_study),
    };
    let result = load_config(&common.config).and_then(|mut cfg| {
        if let Some(n) = common.seeds {
            cfg.seeds.count = n;
        }
        if let Some(m) = common.master_seed {
            cfg.seeds.master_seed = m;
        }
        let out = common
            .out
            .clone()
            .or_else(|| cfg.output_dir.clone().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        let workers = common
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        run(&cfg, &RunOptions::new(out, workers))
    });
    match result {
        Ok(summary) => {
            for line in summary.lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
