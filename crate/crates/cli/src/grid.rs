//! Parallel execution of a Monte Carlo grid and its CSV/JSON outputs.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::time::Instant;

use gi0_core::{
    aggregate_cell, run_replicate, Cell, CellStats, ContaminationSpec, DiscardPolicy, Error, GridSpec,
    ReplicateOutcome,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::MonotonicClock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    /// Every replicate was discarded; only failure counts are meaningful.
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub status: CellStatus,
    pub stats: CellStats,
}

fn run_one(cell: &Cell, spec: &GridSpec, clock: &MonotonicClock) -> Result<CellResult, Error> {
    let outcomes = (0..spec.replicates as u64)
        .into_par_iter()
        .map(|i| run_replicate(cell, i, spec.base_seed, &spec.estimators, &spec.estimator_config, clock))
        .collect::<Result<Vec<ReplicateOutcome>, Error>>()?;
    match aggregate_cell(cell, &outcomes, spec.discard) {
        Ok(stats) => Ok(CellResult { status: CellStatus::Ok, stats }),
        Err(Error::EmptyCell) => {
            let mut stats = aggregate_cell(cell, &outcomes, DiscardPolicy::KeepAll)?;
            stats.used_replicates = 0;
            stats.discarded_replicates = stats.replicates;
            for e in &mut stats.estimators {
                e.mean_alpha_hat = None;
                e.bias = None;
                e.mse = None;
                e.ci95_halfwidth = None;
                e.used = 0;
            }
            Ok(CellResult { status: CellStatus::Empty, stats })
        }
        Err(e) => Err(e),
    }
}

/// Runs every cell of `spec` on `parallelism` threads. Results come back in
/// [`GridSpec::cells`] order and are identical for any thread count.
pub fn run_grid(spec: &GridSpec, parallelism: usize, progress: bool) -> anyhow::Result<Vec<CellResult>> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(parallelism.max(1)).build()?;
    let cells = spec.cells();
    let total = cells.len();
    let clock = MonotonicClock::new();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let results = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let r = run_one(cell, spec, &clock);
                if progress {
                    let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                    eprintln!(
                        "[{k}/{total}] alpha={} L={} n={} {} done",
                        cell.alpha,
                        cell.looks,
                        cell.n,
                        cell.contamination.case_name()
                    );
                }
                r
            })
            .collect::<Result<Vec<_>, Error>>()
    })?;
    Ok(results)
}

/// Extrapolated wall time in seconds for the whole grid, from ten replicates
/// of one cell per sample size.
pub fn estimate_runtime(spec: &GridSpec, parallelism: usize) -> anyhow::Result<f64> {
    spec.validate()?;
    let clock = MonotonicClock::new();
    let mut per_replicate = 0.0;
    for &n in &spec.sizes {
        let cell = Cell { alpha: spec.alphas[0], looks: spec.looks[0], n, contamination: ContaminationSpec::None };
        let t0 = Instant::now();
        for i in 0..10 {
            run_replicate(&cell, i, spec.base_seed, &spec.estimators, &spec.estimator_config, &clock)?;
        }
        per_replicate += t0.elapsed().as_secs_f64() / 10.0;
    }
    per_replicate /= spec.sizes.len() as f64;
    let work = per_replicate * spec.replicates as f64 * spec.cell_count() as f64;
    Ok(work / parallelism.max(1) as f64)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_owned(), |x| x.to_string())
}

fn cell_columns(cell: &Cell) -> String {
    let c = &cell.contamination;
    let (alpha2, cv, k) = match *c {
        ContaminationSpec::None => (None, None, None),
        ContaminationSpec::Case1 { alpha2, .. } => (Some(alpha2), None, None),
        ContaminationSpec::Case2 { c_value, .. } => (None, Some(c_value), None),
        ContaminationSpec::Case3 { k_exponent, .. } => (None, None, Some(f64::from(k_exponent))),
    };
    format!(
        "{},{},{},{},{},{},{},{}",
        cell.alpha,
        cell.looks,
        cell.n,
        c.case_name(),
        c.epsilon(),
        opt(alpha2),
        opt(cv),
        opt(k)
    )
}

pub const CSV_HEADER: &str =
    "alpha,L,n,case,epsilon,alpha2,C,k,estimator,mean,bias,mse,ci95,used,failures,discarded,status";

/// One row per cell and estimator. Contains no timing, so it is reproducible byte for byte.
pub fn write_csv<W: Write>(mut out: W, results: &[CellResult]) -> io::Result<()> {
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in results {
        let cell = cell_columns(&r.stats.cell);
        let status = match r.status {
            CellStatus::Ok => "ok",
            CellStatus::Empty => "empty",
        };
        for e in &r.stats.estimators {
            let _ = writeln!(
                s,
                "{cell},{},{},{},{},{},{},{},{},{status}",
                e.estimator.name(),
                opt(e.mean_alpha_hat),
                opt(e.bias),
                opt(e.mse),
                opt(e.ci95_halfwidth),
                e.used,
                e.failures,
                r.stats.discarded_replicates,
            );
        }
    }
    out.write_all(s.as_bytes())?;
    out.flush()
}

/// Mean wall time per estimator call, one row per cell and estimator.
pub fn write_timings_csv<W: Write>(mut out: W, results: &[CellResult]) -> io::Result<()> {
    let mut s = String::from("alpha,L,n,case,epsilon,alpha2,C,k,estimator,mean_seconds\n");
    for r in results {
        let cell = cell_columns(&r.stats.cell);
        for e in &r.stats.estimators {
            let _ = writeln!(s, "{cell},{},{}", e.estimator.name(), e.mean_elapsed);
        }
    }
    out.write_all(s.as_bytes())?;
    out.flush()
}

/// JSON array of cell results without the timing fields, for reproducible output.
pub fn to_json(results: &[CellResult]) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(results)?;
    if let Some(cells) = v.as_array_mut() {
        for c in cells {
            if let Some(ests) = c.pointer_mut("/stats/estimators").and_then(|e| e.as_array_mut()) {
                for e in ests {
                    if let Some(o) = e.as_object_mut() {
                        o.remove("mean_elapsed");
                    }
                }
            }
        }
    }
    serde_json::to_string_pretty(&v)
}
