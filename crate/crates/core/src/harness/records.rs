use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, SimError};
use crate::simulator::{fidelity, GroundState, VqeProblem};

/// One CSV row: metrics of a trial's optimum after a step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub trial: usize,
    pub step: usize,
    pub cumulative_shots: u64,
    pub delta_energy: f64,
    pub delta_fidelity: f64,
    /// Threshold used by GradCoRe at this step; empty for other methods.
    pub kappa_sq: Option<f64>,
    pub shots_this_step: u64,
    pub method: String,
}

/// `(f*(x) - E_gs, 1 - |<psi_gs|psi_x>|)` from noiseless state evaluation.
pub fn compute_metrics(x_hat: &[f64], problem: &VqeProblem, ground: &GroundState) -> Result<(f64, f64), SimError> {
    let psi = problem.circuit.prepare_state(x_hat)?;
    let energy = crate::simulator::exact_energy(&problem.hamiltonian, &psi)?;
    Ok((energy - ground.energy, 1.0 - fidelity(&ground.state, &psi)?))
}

pub fn write_records<W: Write>(w: W, records: &[RunRecord]) -> Result<(), HarnessError> {
    let mut out = csv::Writer::from_writer(w);
    if records.is_empty() {
        out.write_record([
            "trial",
            "step",
            "cumulative_shots",
            "delta_energy",
            "delta_fidelity",
            "kappa_sq",
            "shots_this_step",
            "method",
        ])?;
    }
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(r: R) -> Result<Vec<RunRecord>, HarnessError> {
    let mut rdr = csv::Reader::from_reader(r);
    let expected = [
        "trial",
        "step",
        "cumulative_shots",
        "delta_energy",
        "delta_fidelity",
        "kappa_sq",
        "shots_this_step",
        "method",
    ];
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(expected) {
        return Err(HarnessError::Parse(format!(
            "unexpected header {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    Ok(rdr.deserialize().collect::<Result<Vec<RunRecord>, _>>()?)
}
