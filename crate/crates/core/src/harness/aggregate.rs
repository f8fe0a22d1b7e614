use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::records::RunRecord;
use crate::error::HarnessError;

/// Percentiles of both metrics across trials at one shot checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub method: String,
    pub cumulative_shots: f64,
    /// Trials with at least one record at or before the checkpoint.
    pub n_trials: usize,
    pub energy_p25: f64,
    pub energy_median: f64,
    pub energy_p75: f64,
    pub fidelity_p25: f64,
    pub fidelity_median: f64,
    pub fidelity_p75: f64,
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `n` log-spaced points from `first` to `last` inclusive.
pub fn checkpoint_grid(first: f64, last: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![last],
        _ => {
            let (a, b) = (first.ln(), last.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        first
                    } else if i == n - 1 {
                        last
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Carries each trial's latest metrics forward to `grid` log-spaced
/// checkpoints per method and summarizes them by p25 / median / p75.
/// Methods appear in order of first occurrence. The grid ends at `budget`
/// when given, else at the largest recorded shot count.
pub fn aggregate(records: &[RunRecord], grid: usize, budget: Option<u64>) -> Result<Vec<AggregateRow>, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::EmptyRecords);
    }
    if grid == 0 {
        return Err(HarnessError::Config("grid must be at least 1".into()));
    }
    let mut methods: Vec<&str> = Vec::new();
    for r in records {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    let mut out = Vec::with_capacity(methods.len() * grid);
    for method in methods {
        let mut rows: Vec<&RunRecord> = records.iter().filter(|r| r.method == method).collect();
        rows.sort_by_key(|r| (r.trial, r.cumulative_shots));
        let mut trials: Vec<Vec<&RunRecord>> = Vec::new();
        for r in rows {
            match trials.last_mut() {
                Some(t) if t[0].trial == r.trial => t.push(r),
                _ => trials.push(vec![r]),
            }
        }
        let first = trials.iter().map(|t| t[0].cumulative_shots).min().unwrap_or(1).max(1) as f64;
        let max_seen = trials.iter().map(|t| t[t.len() - 1].cumulative_shots).max().unwrap_or(1) as f64;
        let last = budget.map_or(max_seen, |b| b as f64).max(first);
        for c in checkpoint_grid(first, last, grid) {
            let mut e = Vec::new();
            let mut f = Vec::new();
            // tolerate exp/ln round-off when a checkpoint lands on a record
            let reach = c * (1.0 + 1e-12);
            for t in &trials {
                let k = t.partition_point(|r| r.cumulative_shots as f64 <= reach);
                if k > 0 {
                    e.push(t[k - 1].delta_energy);
                    f.push(t[k - 1].delta_fidelity);
                }
            }
            if e.is_empty() {
                continue;
            }
            e.sort_by(f64::total_cmp);
            f.sort_by(f64::total_cmp);
            out.push(AggregateRow {
                method: method.to_string(),
                cumulative_shots: c,
                n_trials: e.len(),
                energy_p25: percentile(&e, 0.25),
                energy_median: percentile(&e, 0.5),
                energy_p75: percentile(&e, 0.75),
                fidelity_p25: percentile(&f, 0.25),
                fidelity_median: percentile(&f, 0.5),
                fidelity_p75: percentile(&f, 0.75),
            });
        }
    }
    Ok(out)
}

pub fn write_aggregates<W: Write>(w: W, rows: &[AggregateRow]) -> Result<(), HarnessError> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_aggregates<R: Read>(r: R) -> Result<Vec<AggregateRow>, HarnessError> {
    Ok(csv::Reader::from_reader(r)
        .deserialize()
        .collect::<Result<Vec<AggregateRow>, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(trial: usize, shots: u64, de: f64) -> RunRecord {
        RunRecord {
            trial,
            step: 1,
            cumulative_shots: shots,
            delta_energy: de,
            delta_fidelity: de / 10.0,
            kappa_sq: None,
            shots_this_step: 1,
            method: "m".into(),
        }
    }

    #[test]
    fn percentiles_interpolate_linearly() {
        let d = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&d, 0.5), 2.5);
        assert_eq!(percentile(&d, 0.25), 1.75);
        assert_eq!(percentile(&d, 0.75), 3.25);
        assert_eq!(percentile(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn grid_is_log_spaced_and_hits_ends() {
        let g = checkpoint_grid(10.0, 1e6, 6);
        assert_eq!(g[0], 10.0);
        assert_eq!(g[5], 1e6);
        for w in g.windows(2) {
            assert!((w[1] / w[0] - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn carries_values_forward_and_skips_unstarted_trials() {
        let recs = vec![rec(0, 10, 4.0), rec(0, 1000, 1.0), rec(1, 100, 2.0)];
        let rows = aggregate(&recs, 3, Some(1000)).unwrap();
        assert_eq!(rows.len(), 3);
        // at 10 only trial 0 has started
        assert_eq!(rows[0].n_trials, 1);
        assert_eq!(rows[0].energy_median, 4.0);
        // at 100 trial 0 still carries 4.0, trial 1 has 2.0
        assert!((rows[1].cumulative_shots - 100.0).abs() < 1e-9);
        assert_eq!(rows[1].energy_median, 3.0);
        assert_eq!(rows[2].energy_median, 1.5);
        assert!((rows[2].fidelity_median - 0.15).abs() < 1e-15);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(aggregate(&[], 64, None), Err(HarnessError::EmptyRecords)));
    }

    #[test]
    fn csv_round_trip() {
        let rows = aggregate(&[rec(0, 10, 4.0), rec(1, 20, 1e-9)], 4, None).unwrap();
        let mut buf = Vec::new();
        write_aggregates(&mut buf, &rows).unwrap();
        assert_eq!(read_aggregates(&buf[..]).unwrap(), rows);
    }
}
