//! Re-aggregation of trace files written by an experiment, independent of the
//! in-memory summary: one streaming pass with Welford updates.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use sdgm_core::Algorithm;

use crate::error::{HarnessError, Result};
use crate::experiment::{SummaryRow, TraceRecord, METRICS};

#[derive(Default, Clone, Copy)]
struct Running {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Running {
    fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    fn std(&self) -> f64 {
        if self.count > 1 {
            (self.m2 / (self.count - 1) as f64).sqrt()
        } else {
            0.0
        }
    }
}

/// Summary rows from every `*.csv` under `<dir>/traces` (or `dir` itself if it
/// has no `traces` subdirectory), ordered by algorithm then `t`.
pub fn aggregate_traces(dir: &Path) -> Result<Vec<SummaryRow>> {
    let traces = if dir.join("traces").is_dir() { dir.join("traces") } else { dir.to_path_buf() };
    let mut files: Vec<_> = fs::read_dir(&traces)
        .map_err(HarnessError::io(&traces))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(HarnessError::Report(format!("no trace files in {}", traces.display())));
    }

    let mut acc: BTreeMap<(Algorithm, u64), [Running; 6]> = BTreeMap::new();
    for path in &files {
        let mut reader = csv::Reader::from_path(path).map_err(HarnessError::csv(path))?;
        for record in reader.deserialize::<TraceRecord>() {
            let record = record.map_err(HarnessError::csv(path))?;
            let slot = acc.entry((record.algorithm, record.t)).or_default();
            for (r, v) in slot.iter_mut().zip(record.metrics()) {
                r.push(v);
            }
        }
    }

    let rows: Vec<SummaryRow> = acc
        .into_iter()
        .map(|((algorithm, t), r)| SummaryRow {
            algorithm,
            t,
            count: r[0].count,
            mean: std::array::from_fn(|k| r[k].mean),
            std: std::array::from_fn(|k| r[k].std()),
        })
        .collect();
    if let Some(bad) = rows.windows(2).find(|w| w[0].algorithm == w[1].algorithm && w[0].count != w[1].count) {
        return Err(HarnessError::Report(format!(
            "{} has {} traces at t = {} but {} at t = {}",
            bad[0].algorithm, bad[0].count, bad[0].t, bad[1].count, bad[1].t
        )));
    }
    debug_assert_eq!(METRICS.len(), 6);
    Ok(rows)
}

/// Largest absolute difference between the means of two summaries over the
/// same `(algorithm, t)` keys, or `None` if the keys or counts differ.
pub fn max_mean_difference(a: &[SummaryRow], b: &[SummaryRow]) -> Option<f64> {
    let key = |r: &SummaryRow| (r.algorithm, r.t);
    let mut a: Vec<_> = a.iter().collect();
    let mut b: Vec<_> = b.iter().collect();
    a.sort_by_key(|r| key(r));
    b.sort_by_key(|r| key(r));
    if a.len() != b.len() {
        return None;
    }
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(&b) {
        if key(x) != key(y) || x.count != y.count {
            return None;
        }
        for k in 0..METRICS.len() {
            worst = worst.max((x.mean[k] - y.mean[k]).abs());
        }
    }
    Some(worst)
}
