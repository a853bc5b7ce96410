//! Estimators of the roughness alpha under the unit-mean convention gamma = -alpha - 1.
//!
//! A failed estimate is an outcome with a non-converged [`Status`], never an `Err`.

use alloc::vec::Vec;

use num_traits::Float;

use crate::distance::{TriangularObjective, TAIL_CUTOFF};
use crate::error::{Error, Result};
use crate::kde::{DensityEstimate, Kernel};
use crate::model::Gi0Params;
use crate::optimize::{brent_root, golden_bracketed, golden_section, RootResult};
use crate::quadrature::{Bound, IntegrationSpec};
use crate::sample::Sample;
use crate::special::{lgamma, psi};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EstimatorKind {
    #[cfg_attr(feature = "serde", serde(rename = "ML"))]
    Ml,
    Mom12,
    LogCum,
    Triangular,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] =
        [EstimatorKind::Ml, EstimatorKind::Mom12, EstimatorKind::LogCum, EstimatorKind::Triangular];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Ml => "ML",
            EstimatorKind::Mom12 => "Mom12",
            EstimatorKind::LogCum => "LogCum",
            EstimatorKind::Triangular => "Triangular",
        }
    }

    /// Case-insensitive parse of the names above and a few short aliases.
    pub fn parse(s: &str) -> Option<Self> {
        let l = s.to_ascii_lowercase();
        match l.as_str() {
            "ml" => Some(EstimatorKind::Ml),
            "mom12" | "half-moment" => Some(EstimatorKind::Mom12),
            "logcum" | "lcum" | "log-cumulant" => Some(EstimatorKind::LogCum),
            "triangular" | "dt" | "t" => Some(EstimatorKind::Triangular),
            _ => None,
        }
    }

    pub fn estimate(self, sample: &Sample, looks: f64, config: &EstimatorConfig) -> EstimateOutcome {
        match self {
            EstimatorKind::Ml => estimate_ml(sample, looks, config),
            EstimatorKind::Mom12 => estimate_mom12(sample, looks, config),
            EstimatorKind::LogCum => estimate_logcum(sample, looks, config),
            EstimatorKind::Triangular => estimate_triangular(sample, looks, config),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Status {
    Converged,
    NoSignChange,
    MaxIterations,
    DegenerateSample,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SearchRange {
    pub lo: f64,
    pub hi: f64,
    pub tol_alpha: f64,
}

impl Default for SearchRange {
    fn default() -> Self {
        Self { lo: -20.0, hi: -1.0 - 1e-6, tol_alpha: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EstimatorConfig {
    pub range: SearchRange,
    pub kernel: Kernel,
    /// Overrides n^(-1/2)/5 when set.
    pub bandwidth: Option<f64>,
    /// Number of equispaced points in the coarse scan of the distance.
    pub scan_points: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            range: SearchRange::default(),
            kernel: Kernel::InverseGaussian,
            bandwidth: None,
            scan_points: 21,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        let r = &self.range;
        if !(r.lo.is_finite() && r.lo < r.hi && r.hi < -1.0) {
            return Err(Error::InvalidParams("search range needs finite lo < hi < -1"));
        }
        if !(r.tol_alpha > 0.0 && r.tol_alpha < r.hi - r.lo) {
            return Err(Error::InvalidParams("tol_alpha must be > 0 and below the range width"));
        }
        if let Some(b) = self.bandwidth {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParams("bandwidth must be finite and > 0"));
            }
        }
        if self.scan_points < 3 {
            return Err(Error::InvalidParams("scan_points must be >= 3"));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol >= 0.0) || self.max_subdivisions == 0 {
            return Err(Error::InvalidParams("quadrature tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateOutcome {
    pub estimator: EstimatorKind,
    pub status: Status,
    /// Present exactly when `status` is `Converged`.
    pub alpha_hat: Option<f64>,
    /// Score or moment residual at the root, or the minimized distance.
    pub objective_value: f64,
    pub iterations: u32,
    /// Wall time in seconds; zero unless measured through [`estimate_all`].
    pub elapsed: f64,
    /// The minimizer sits within `tol_alpha` of a range end.
    pub at_boundary: bool,
}

impl EstimateOutcome {
    fn failed(estimator: EstimatorKind, status: Status, objective_value: f64, iterations: u32) -> Self {
        Self { estimator, status, alpha_hat: None, objective_value, iterations, elapsed: 0.0, at_boundary: false }
    }

    fn converged(estimator: EstimatorKind, alpha: f64, objective_value: f64, iterations: u32, range: &SearchRange) -> Self {
        let at_boundary = alpha - range.lo <= range.tol_alpha || range.hi - alpha <= range.tol_alpha;
        Self {
            estimator,
            status: Status::Converged,
            alpha_hat: Some(alpha),
            objective_value,
            iterations,
            elapsed: 0.0,
            at_boundary,
        }
    }

    pub fn is_converged(&self) -> bool {
        self.status == Status::Converged
    }
}

/// Source of monotonic time in seconds.
pub trait Clock {
    fn now(&self) -> f64;
}

/// A clock that never advances, for builds without a time source.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

const MAX_ROOT_ITER: u32 = 200;

fn solve(
    kind: EstimatorKind,
    f: impl FnMut(f64) -> f64 + Clone,
    range: &SearchRange,
) -> EstimateOutcome {
    let mut g = f.clone();
    match brent_root(f, range.lo, range.hi, MAX_ROOT_ITER) {
        RootResult::Root { x, fx, iterations } => {
            EstimateOutcome::converged(kind, x.clamp(range.lo, range.hi), fx, iterations, range)
        }
        RootResult::NoSignChange => EstimateOutcome::failed(kind, Status::NoSignChange, f64::NAN, 0),
        RootResult::MaxIterations { x, iterations } => {
            EstimateOutcome::failed(kind, Status::MaxIterations, g(x), iterations)
        }
    }
}

/// Score of the unit-mean log-likelihood, averaged over the sample.
pub(crate) fn ml_score(values: &[f64], looks: f64, a: f64) -> f64 {
    let g = -a - 1.0;
    let n = values.len() as f64;
    let (mut s_log, mut s_inv) = (0.0, 0.0);
    for &z in values {
        let d = g + looks * z;
        s_log += d.ln();
        s_inv += 1.0 / d;
    }
    psi(-a) - psi(looks - a) - g.ln() + a / g + s_log / n - (a - looks) * s_inv / n
}

/// Maximum likelihood through the score equation, falling back to direct
/// maximization of the likelihood when the score does not change sign.
pub fn estimate_ml(sample: &Sample, looks: f64, config: &EstimatorConfig) -> EstimateOutcome {
    let kind = EstimatorKind::Ml;
    let range = &config.range;
    if sample.len() < 2 || sample.all_equal() {
        return EstimateOutcome::failed(kind, Status::DegenerateSample, f64::NAN, 0);
    }
    let v = sample.values();
    let out = solve(kind, |a| ml_score(v, looks, a), range);
    if out.status != Status::NoSignChange {
        return out;
    }
    let neg_loglik = |a: f64| match Gi0Params::unit_mean(a, looks) {
        Ok(p) => {
            let d = p.density();
            -v.iter().map(|&z| d.ln_pdf(z)).sum::<f64>()
        }
        Err(_) => f64::INFINITY,
    };
    let m = golden_section(neg_loglik, range.lo, range.hi, range.tol_alpha * 0.1);
    if m.x - range.lo >= range.tol_alpha && range.hi - m.x >= range.tol_alpha {
        EstimateOutcome::converged(kind, m.x, ml_score(v, looks, m.x), m.iterations, range)
    } else {
        EstimateOutcome::failed(kind, Status::NoSignChange, ml_score(v, looks, m.x), m.iterations)
    }
}

/// E(Z^(1/2)) of the unit-mean model.
pub(crate) fn half_moment(a: f64, looks: f64) -> f64 {
    ((-a - 1.0) / looks).sqrt() * (lgamma(-a - 0.5) + lgamma(looks + 0.5) - lgamma(-a) - lgamma(looks)).exp()
}

/// Matches the sample mean of sqrt(z) to E(Z^(1/2)).
pub fn estimate_mom12(sample: &Sample, looks: f64, config: &EstimatorConfig) -> EstimateOutcome {
    let kind = EstimatorKind::Mom12;
    let v = sample.values();
    let m = v.iter().map(|z| z.sqrt()).sum::<f64>() / v.len() as f64;
    if !m.is_finite() {
        return EstimateOutcome::failed(kind, Status::DegenerateSample, f64::NAN, 0);
    }
    estimate_mom12_from(m, looks, config)
}

/// The half-moment estimator given the sample half-moment directly.
pub fn estimate_mom12_from(half_moment_mean: f64, looks: f64, config: &EstimatorConfig) -> EstimateOutcome {
    solve(EstimatorKind::Mom12, |a| half_moment_mean - half_moment(a, looks), &config.range)
}

/// E(log Z) of the unit-mean model: log((-alpha - 1) / L) + psi(L) - psi(-alpha).
pub(crate) fn mean_log(a: f64, looks: f64) -> f64 {
    ((-a - 1.0) / looks).ln() + psi(looks) - psi(-a)
}

/// Matches the sample mean of log z to E(log Z).
pub fn estimate_logcum(sample: &Sample, looks: f64, config: &EstimatorConfig) -> EstimateOutcome {
    let kind = EstimatorKind::LogCum;
    let v = sample.values();
    let m = v.iter().map(|z| z.ln()).sum::<f64>() / v.len() as f64;
    if !m.is_finite() {
        return EstimateOutcome::failed(kind, Status::DegenerateSample, f64::NAN, 0);
    }
    estimate_logcum_from(m, looks, config)
}

/// The log-cumulant estimator given the sample mean of log z directly.
pub fn estimate_logcum_from(mean_log_z: f64, looks: f64, config: &EstimatorConfig) -> EstimateOutcome {
    solve(EstimatorKind::LogCum, |a| mean_log_z - mean_log(a, looks), &config.range)
}

/// Minimizes the triangular distance between the model and a kernel estimate of the sample.
pub fn estimate_triangular(sample: &Sample, looks: f64, config: &EstimatorConfig) -> EstimateOutcome {
    let kind = EstimatorKind::Triangular;
    let kde = match DensityEstimate::new(sample, config.kernel, config.bandwidth) {
        Ok(k) => k,
        Err(_) => return EstimateOutcome::failed(kind, Status::DegenerateSample, f64::NAN, 0),
    };
    let scan = scan_grid(config);
    let upper = (10.0 * sample.max()).max(model_cutoff(&scan, looks, &config.range));
    let breakpoints = narrow_kernel_breakpoints(&kde);
    minimize_distance(|t| kde.eval(t), looks, upper, &breakpoints, config)
}

/// Minimum-distance estimate against an arbitrary density supplied by the caller,
/// integrated over [0, `upper`].
pub fn estimate_triangular_with_density<E: Fn(f64) -> f64>(
    density: E,
    looks: f64,
    upper: f64,
    config: &EstimatorConfig,
) -> EstimateOutcome {
    minimize_distance(density, looks, upper, &[], config)
}

fn scan_grid(config: &EstimatorConfig) -> Vec<f64> {
    let r = &config.range;
    let k = config.scan_points.max(3);
    (0..k).map(|i| r.lo + (r.hi - r.lo) * i as f64 / (k - 1) as f64).collect()
}

/// Largest 1 - 1e-7 quantile over the scan points and a few alphas near -1,
/// where the tails are heaviest.
fn model_cutoff(scan: &[f64], looks: f64, range: &SearchRange) -> f64 {
    scan.iter()
        .copied()
        .chain([-1.05, -1.1, -1.2, -1.35].into_iter().filter(|a| *a >= range.lo && *a <= range.hi))
        .filter_map(|a| Gi0Params::unit_mean(a, looks).ok()?.upper_quantile(TAIL_CUTOFF).ok())
        .fold(0.0, f64::max)
}

/// z, z +- 2 sd and z +- 6 sd for kernels much narrower than a grid cell, thinned
/// to 2% relative spacing.
fn narrow_kernel_breakpoints(kde: &DensityEstimate) -> Vec<f64> {
    let b = kde.bandwidth();
    let mut out: Vec<f64> = Vec::new();
    for &z in kde.points() {
        let sd = match kde.kernel() {
            Kernel::InverseGaussian => (z * z * z * b).sqrt(),
            Kernel::Gamma => ((z / b + 1.0) * b * b).sqrt(),
        };
        if sd < 0.05 * z {
            out.extend([z - 6.0 * sd, z - 2.0 * sd, z, z + 2.0 * sd, z + 6.0 * sd]);
        }
    }
    out.sort_by(f64::total_cmp);
    let mut thinned: Vec<f64> = Vec::with_capacity(out.len());
    for x in out {
        if x > 0.0 && thinned.last().is_none_or(|&l| x > l * 1.02) {
            thinned.push(x);
        }
    }
    thinned
}

fn minimize_distance<E: Fn(f64) -> f64>(
    density: E,
    looks: f64,
    upper: f64,
    breakpoints: &[f64],
    config: &EstimatorConfig,
) -> EstimateOutcome {
    let kind = EstimatorKind::Triangular;
    let range = &config.range;
    let scan = scan_grid(config);
    let mut spec = IntegrationSpec::new(0.0, Bound::Finite(upper));
    spec.rel_tol = config.rel_tol;
    spec.abs_tol = config.abs_tol;
    spec.max_subdivisions = config.max_subdivisions;
    let obj = match TriangularObjective::new(density, looks, upper, &scan, breakpoints, &spec) {
        Ok(o) => o,
        Err(_) => return EstimateOutcome::failed(kind, Status::DegenerateSample, f64::NAN, 0),
    };
    if !obj.converged() {
        return EstimateOutcome::failed(kind, Status::MaxIterations, f64::NAN, 0);
    }
    let f = |a: f64| obj.value(a).unwrap_or(f64::INFINITY);
    let values: Vec<f64> = scan.iter().map(|&a| f(a)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let last = scan.len() - 1;
    let m = if best == 0 || best == last {
        // The bracket touches a range end: plain golden section on the end cell.
        let (a, b) = if best == 0 { (scan[0], scan[1]) } else { (scan[last - 1], scan[last]) };
        let m = golden_section(f, a, b, range.tol_alpha);
        if values[best] <= m.fx {
            crate::optimize::Minimum { x: scan[best], fx: values[best], iterations: m.iterations }
        } else {
            m
        }
    } else {
        golden_bracketed(
            f,
            (scan[best - 1], values[best - 1]),
            (scan[best], values[best]),
            (scan[best + 1], values[best + 1]),
            range.tol_alpha,
        )
    };
    EstimateOutcome::converged(kind, m.x, m.fx, m.iterations + scan.len() as u32, range)
}

/// Runs all four estimators, timing each with `clock`.
pub fn estimate_all(sample: &Sample, looks: f64, config: &EstimatorConfig, clock: &dyn Clock) -> Vec<EstimateOutcome> {
    estimate_selected(sample, looks, config, &EstimatorKind::ALL, clock)
}

/// Runs the listed estimators in order, timing each with `clock`.
pub fn estimate_selected(
    sample: &Sample,
    looks: f64,
    config: &EstimatorConfig,
    kinds: &[EstimatorKind],
    clock: &dyn Clock,
) -> Vec<EstimateOutcome> {
    kinds
        .iter()
        .map(|k| {
            let t0 = clock.now();
            let mut out = k.estimate(sample, looks, config);
            out.elapsed = (clock.now() - t0).max(0.0);
            out
        })
        .collect()
}
