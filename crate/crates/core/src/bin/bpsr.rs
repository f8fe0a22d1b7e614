use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bayes_psr::harness::{
    aggregate, calibrate, emit_plot, read_aggregates, read_records, run_experiment, write_aggregates,
    write_records, ExperimentConfig, Metric,
};
use bayes_psr::simulator::ground_truth;
use bayes_psr::HarnessError;
use clap::{Parser, Subcommand};

/// Bayesian shift rules and GradCoRe VQE benchmarks.
#[derive(Parser)]
#[command(name = "bpsr", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run all trials of an experiment and write per-step records as CSV.
    Run {
        config: PathBuf,
        /// Overrides the config's `output`; defaults to records.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Calibration summary JSON; defaults to the CSV path with a .calibration.json suffix.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Print the calibrated single-shot variance and problem facts as JSON.
    Calibrate { config: PathBuf },
    /// Percentiles across trials at log-spaced shot checkpoints.
    Aggregate {
        records: PathBuf,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Last checkpoint; defaults to the largest recorded shot count.
        #[arg(long)]
        budget: Option<u64>,
        /// Writes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render aggregated curves as SVG.
    Plot {
        agg: PathBuf,
        #[arg(long)]
        metric: Metric,
        #[arg(long)]
        out: PathBuf,
    },
}

fn open(path: &Path) -> Result<BufReader<File>, HarnessError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.cmd {
        Cmd::Run { config, out, summary } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = out
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from("records.csv"));
            let summary = summary.unwrap_or_else(|| {
                let mut s = out.clone().into_os_string();
                s.push(".calibration.json");
                s.into()
            });
            let result = run_experiment(&cfg)?;
            write_records(create(&out)?, &result.records)?;
            let mut w = create(&summary)?;
            serde_json::to_writer_pretty(&mut w, &result.summary)?;
            writeln!(w)?;
            w.flush()?;
            eprintln!(
                "wrote {} records to {} (sigma_bar^2 = {})",
                result.records.len(),
                out.display(),
                result.summary.sigma_bar_sq
            );
        }
        Cmd::Calibrate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let problem = cfg.problem.build()?;
            let ground = ground_truth(&problem.hamiltonian)?;
            let s = calibrate(&cfg, &problem, &ground)?;
            println!("{}", serde_json::to_string_pretty(&s)?);
        }
        Cmd::Aggregate { records, grid, budget, out } => {
            let recs = read_records(open(&records)?)?;
            let rows = aggregate(&recs, grid, budget)?;
            match out {
                Some(p) => write_aggregates(create(&p)?, &rows)?,
                None => write_aggregates(io::stdout().lock(), &rows)?,
            }
        }
        Cmd::Plot { agg, metric, out } => {
            let rows = read_aggregates(open(&agg)?)?;
            let svg = emit_plot(&rows, metric)?;
            std::fs::write(&out, svg).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", out.display())))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bpsr: {e}");
            ExitCode::FAILURE
        }
    }
}
