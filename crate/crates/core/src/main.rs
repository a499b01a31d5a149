use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use conefpp::config::{ExperimentConfig, ExperimentKind, ResultRecord, SEED_ENV};
use conefpp::plot::emit_plot;
use conefpp::runner::{read_record, run, write_outputs};
use conefpp::Error;

#[derive(Parser)]
#[command(name = "conefpp", version, about = "First-passage percolation experiments on lattice cones")]
struct Cli {
    /// Worker threads for replica-parallel work.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Overrides the config seed and CONEFPP_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact lattice geometry checks; exit code 4 when one fails.
    VerifyGeometry {
        #[arg(long, value_parser = clap::value_parser!(usize))]
        d: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render plot.svg for a result.json.
    Plot {
        record: PathBuf,
        /// Output path; defaults to plot.svg next to the record.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation { .. } | Error::Contract(_) | Error::DimensionMismatch { .. } | Error::NoPlot(_) => 2,
        Error::BudgetExceeded { .. } => 3,
        _ => 1,
    }
}

fn execute(mut config: ExperimentConfig, seed: Option<u64>, out: Option<PathBuf>) -> Result<ResultRecord, Error> {
    let env = std::env::var(SEED_ENV).ok();
    config.resolve_seed(seed, env.as_deref())?;
    if let Some(dir) = out {
        config.output_dir = dir;
    }
    let record = run(&config)?;
    let dir = write_outputs(&record, &config.output_dir)?;
    println!("{}", dir.display());
    Ok(record)
}

fn report(record: &ResultRecord) -> ExitCode {
    if record.kind == ExperimentKind::VerifyGeometry {
        for row in &record.table.rows {
            println!("{}  {}  ({})", row[1], row[0], row[2]);
        }
    }
    match record.passed {
        Some(false) => ExitCode::from(4),
        _ => ExitCode::SUCCESS,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Run { config, seed, out } => std::fs::read_to_string(&config)
            .map_err(Error::from)
            .and_then(|text| ExperimentConfig::from_json(&text))
            .and_then(|c| execute(c, seed, out))
            .map(|r| report(&r)),
        Command::VerifyGeometry { d, seed, out } => {
            let mut config = ExperimentConfig::new(ExperimentKind::VerifyGeometry);
            config.dim = Some(d);
            execute(config, seed, out).map(|r| report(&r))
        }
        Command::Plot { record, output } => read_record(&record).and_then(|r| {
            let svg = emit_plot(&r)?;
            let path = output.unwrap_or_else(|| record.with_file_name("plot.svg"));
            std::fs::write(&path, svg)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(exit_code(&e))
    })
}
