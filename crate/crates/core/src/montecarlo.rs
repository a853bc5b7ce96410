//! Replicate generation and per-cell aggregation for simulation studies.
//!
//! Each replicate's seed is a pure function of the base seed, the cell and the
//! replicate index, so results do not depend on execution order.

use alloc::vec::Vec;

use num_traits::Float;

use crate::contamination::{sample_contaminated, ContaminationSpec};
use crate::error::{Error, Result};
use crate::estimators::{estimate_selected, Clock, EstimateOutcome, EstimatorConfig, EstimatorKind};
use crate::model::Gi0Params;
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cell {
    pub alpha: f64,
    pub looks: f64,
    pub n: usize,
    pub contamination: ContaminationSpec,
}

impl Cell {
    fn seed_words(&self) -> [u64; 7] {
        let c = &self.contamination;
        let (case, p) = match *c {
            ContaminationSpec::None => (0, 0),
            ContaminationSpec::Case1 { alpha2, .. } => (1, alpha2.to_bits()),
            ContaminationSpec::Case2 { c_value, .. } => (2, c_value.to_bits()),
            ContaminationSpec::Case3 { k_exponent, .. } => (3, u64::from(k_exponent)),
        };
        [self.alpha.to_bits(), self.looks.to_bits(), self.n as u64, case, c.epsilon().to_bits(), p, 0]
    }
}

/// Seed of one replicate: SplitMix64 folded over base seed, cell fields and index.
pub fn replicate_seed(base_seed: u64, cell: &Cell, replicate: u64) -> u64 {
    let mut w = cell.seed_words();
    w[6] = replicate;
    derive_seed(base_seed, &w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DiscardPolicy {
    /// Drop the whole replicate when the half-moment or log-cumulant estimator fails.
    #[default]
    DropMomentFailures,
    /// Keep every replicate; each estimator is summarized over its own successes.
    KeepAll,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GridSpec {
    pub alphas: Vec<f64>,
    pub looks: Vec<f64>,
    pub sizes: Vec<usize>,
    pub contamination: Vec<ContaminationSpec>,
    pub replicates: usize,
    pub base_seed: u64,
    pub estimators: Vec<EstimatorKind>,
    pub discard: DiscardPolicy,
    pub estimator_config: EstimatorConfig,
}

impl Default for GridSpec {
    fn default() -> Self {
        let eps = [0.001, 0.005, 0.01];
        let mut contamination = alloc::vec![ContaminationSpec::None];
        for &alpha2 in &[-4.0, -15.0] {
            contamination.extend(eps.iter().map(|&epsilon| ContaminationSpec::Case1 { epsilon, alpha2 }));
        }
        contamination.extend(eps.iter().map(|&epsilon| ContaminationSpec::Case2 { epsilon, c_value: 100.0 }));
        contamination.extend(eps.iter().map(|&epsilon| ContaminationSpec::Case3 { epsilon, k_exponent: 2 }));
        Self {
            alphas: alloc::vec![-1.5, -3.0, -5.0],
            looks: alloc::vec![1.0, 3.0, 8.0],
            sizes: alloc::vec![9, 25, 49, 81, 121, 1000],
            contamination,
            replicates: 1000,
            base_seed: 0,
            estimators: EstimatorKind::ALL.to_vec(),
            discard: DiscardPolicy::DropMomentFailures,
            estimator_config: EstimatorConfig::default(),
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.iter().any(|a| !(*a < -1.0) || !a.is_finite()) {
            return Err(Error::InvalidParams("grid alphas must be finite and < -1"));
        }
        if self.looks.iter().any(|l| !(*l >= 1.0) || !l.is_finite()) {
            return Err(Error::InvalidParams("grid looks must be finite and >= 1"));
        }
        if self.sizes.contains(&0) {
            return Err(Error::InvalidParams("grid sizes must be >= 1"));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidParams("replicates must be >= 1"));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidParams("at least one estimator is required"));
        }
        for c in &self.contamination {
            c.validate()?;
        }
        self.estimator_config.validate()
    }

    /// Cells in the order alpha, looks, size, contamination (outermost first).
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity(self.cell_count());
        for &alpha in &self.alphas {
            for &looks in &self.looks {
                for &n in &self.sizes {
                    for &contamination in &self.contamination {
                        out.push(Cell { alpha, looks, n, contamination });
                    }
                }
            }
        }
        out
    }

    pub fn cell_count(&self) -> usize {
        self.alphas.len() * self.looks.len() * self.sizes.len() * self.contamination.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReplicateOutcome {
    pub index: u64,
    pub seed: u64,
    pub outcomes: Vec<EstimateOutcome>,
}

impl ReplicateOutcome {
    fn failed(&self, kind: EstimatorKind) -> bool {
        self.outcomes.iter().any(|o| o.estimator == kind && !o.is_converged())
    }

    fn alpha_hat(&self, kind: EstimatorKind) -> Option<f64> {
        self.outcomes.iter().find(|o| o.estimator == kind).and_then(|o| o.alpha_hat)
    }
}

/// Draws the replicate's sample and runs the selected estimators on it.
pub fn run_replicate(
    cell: &Cell,
    replicate: u64,
    base_seed: u64,
    estimators: &[EstimatorKind],
    config: &EstimatorConfig,
    clock: &dyn Clock,
) -> Result<ReplicateOutcome> {
    let seed = replicate_seed(base_seed, cell, replicate);
    let base = Gi0Params::unit_mean(cell.alpha, cell.looks)?;
    let sample = sample_contaminated(&base, &cell.contamination, cell.n, seed)?;
    let outcomes = estimate_selected(&sample, cell.looks, config, estimators, clock);
    Ok(ReplicateOutcome { index: replicate, seed, outcomes })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimatorStats {
    pub estimator: EstimatorKind,
    /// `None` when the estimator converged in no surviving replicate.
    pub mean_alpha_hat: Option<f64>,
    pub bias: Option<f64>,
    pub mse: Option<f64>,
    pub ci95_halfwidth: Option<f64>,
    /// Surviving replicates in which this estimator converged.
    pub used: usize,
    /// Non-converged outcomes over all replicates, before any discard.
    pub failures: usize,
    pub mean_elapsed: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellStats {
    pub cell: Cell,
    pub replicates: usize,
    pub used_replicates: usize,
    pub discarded_replicates: usize,
    pub estimators: Vec<EstimatorStats>,
}

impl CellStats {
    pub fn get(&self, kind: EstimatorKind) -> Option<&EstimatorStats> {
        self.estimators.iter().find(|s| s.estimator == kind)
    }
}

/// Bias, MSE and a normal 95% interval per estimator over the surviving replicates.
pub fn aggregate_cell(cell: &Cell, outcomes: &[ReplicateOutcome], policy: DiscardPolicy) -> Result<CellStats> {
    if outcomes.is_empty() {
        return Err(Error::EmptyCell);
    }
    let mut kinds: Vec<EstimatorKind> = Vec::new();
    for o in outcomes.iter().flat_map(|r| r.outcomes.iter()) {
        if !kinds.contains(&o.estimator) {
            kinds.push(o.estimator);
        }
    }
    kinds.sort();
    let keep = |r: &ReplicateOutcome| match policy {
        DiscardPolicy::KeepAll => true,
        DiscardPolicy::DropMomentFailures => !r.failed(EstimatorKind::Mom12) && !r.failed(EstimatorKind::LogCum),
    };
    let kept: Vec<&ReplicateOutcome> = outcomes.iter().filter(|r| keep(r)).collect();
    if kept.is_empty() {
        return Err(Error::EmptyCell);
    }
    let alpha = cell.alpha;
    let estimators = kinds
        .iter()
        .map(|&kind| {
            let hats: Vec<f64> = kept.iter().filter_map(|r| r.alpha_hat(kind)).collect();
            let failures = outcomes.iter().filter(|r| r.failed(kind)).count();
            let (times, count) = outcomes
                .iter()
                .flat_map(|r| r.outcomes.iter())
                .filter(|o| o.estimator == kind)
                .fold((0.0, 0usize), |(s, c), o| (s + o.elapsed, c + 1));
            let mean_elapsed = if count > 0 { times / count as f64 } else { 0.0 };
            let used = hats.len();
            if used == 0 {
                return EstimatorStats {
                    estimator: kind,
                    mean_alpha_hat: None,
                    bias: None,
                    mse: None,
                    ci95_halfwidth: None,
                    used,
                    failures,
                    mean_elapsed,
                };
            }
            let n = used as f64;
            let mean = hats.iter().sum::<f64>() / n;
            let mse = hats.iter().map(|h| (h - alpha) * (h - alpha)).sum::<f64>() / n;
            let sd = if used > 1 {
                (hats.iter().map(|h| (h - mean) * (h - mean)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            EstimatorStats {
                estimator: kind,
                mean_alpha_hat: Some(mean),
                bias: Some(mean - alpha),
                mse: Some(mse),
                ci95_halfwidth: Some(1.96 * sd / n.sqrt()),
                used,
                failures,
                mean_elapsed,
            }
        })
        .collect();
    Ok(CellStats {
        cell: *cell,
        replicates: outcomes.len(),
        used_replicates: kept.len(),
        discarded_replicates: outcomes.len() - kept.len(),
        estimators,
    })
}

/// Runs every replicate of one cell in sequence and aggregates.
pub fn run_cell(cell: &Cell, spec: &GridSpec, clock: &dyn Clock) -> Result<CellStats> {
    let outcomes = (0..spec.replicates as u64)
        .map(|i| run_replicate(cell, i, spec.base_seed, &spec.estimators, &spec.estimator_config, clock))
        .collect::<Result<Vec<_>>>()?;
    aggregate_cell(cell, &outcomes, spec.discard)
}
