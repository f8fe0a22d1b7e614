//! Runs a small multi-trial benchmark through the harness, aggregates the
//! per-step records and writes both SVG plots to the temp directory.

use bayes_psr::harness::{aggregate, emit_plot, run_experiment_with_workers, write_records, ExperimentConfig, Metric};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "problem": {"qubits": 3, "layers": 2},
            "methods": [
                {"method": "sgd-psr", "n_shots": 256},
                {"method": "bayes-sgd", "n_shots": 256},
                {"method": "gradcore"}
            ],
            "budget": 300000,
            "n_trials": 4,
            "base_seed": 1
        }"#,
    )?;
    let out = run_experiment_with_workers(&cfg, 2)?;
    println!("sigma_bar^2 = {:.4}, {} records", out.summary.sigma_bar_sq, out.records.len());

    let dir = std::env::temp_dir().join("bpsr-example");
    std::fs::create_dir_all(&dir)?;
    write_records(std::fs::File::create(dir.join("records.csv"))?, &out.records)?;
    let rows = aggregate(&out.records, 32, Some(cfg.budget))?;
    for r in rows.iter().filter(|r| r.cumulative_shots == cfg.budget as f64) {
        println!(
            "{:<16} at budget: median dE {:.5} [{:.5}, {:.5}]",
            r.method, r.energy_median, r.energy_p25, r.energy_p75
        );
    }
    for (metric, name) in [(Metric::Energy, "energy.svg"), (Metric::Fidelity, "fidelity.svg")] {
        std::fs::write(dir.join(name), emit_plot(&rows, metric)?)?;
    }
    println!("wrote records.csv, energy.svg and fidelity.svg to {}", dir.display());
    Ok(())
}
