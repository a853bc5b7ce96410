//! Two-sample Kolmogorov-Smirnov test and the fit-then-simulate check.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::estimators::{EstimatorConfig, EstimatorKind, Status};
use crate::model::{gi0_sample, Gi0Params};
use crate::sample::Sample;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Asymptotic Kolmogorov survival function Q(lambda) = P(K > lambda).
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form, fast where the alternating series is slow.
        let x = -PI * PI / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for j in 1..50 {
            let k = (2 * j - 1) as f64;
            let term = (k * k * x).exp();
            cdf += term;
            if term < 1e-17 * cdf {
                break;
            }
        }
        return (1.0 - (2.0 * PI).sqrt() / lambda * cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..200 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Largest ECDF gap between the samples, with the asymptotic p-value.
pub fn ks_two_sample(x: &Sample, y: &Sample) -> Result<KsTest> {
    ks_two_sample_slices(x.values(), y.values())
}

pub(crate) fn ks_two_sample_slices(x: &[f64], y: &[f64]) -> Result<KsTest> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::DegenerateSample("both samples must be nonempty"));
    }
    let mut xs: Vec<f64> = x.to_vec();
    let mut ys: Vec<f64> = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (nx, ny) = (xs.len(), ys.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    // Advance past every copy of the next pooled value before comparing, so ties
    // are measured after the jump of both ECDFs.
    while i < nx && j < ny {
        let v = xs[i].min(ys[j]);
        while i < nx && xs[i] == v {
            i += 1;
        }
        while j < ny && ys[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / nx as f64 - j as f64 / ny as f64).abs());
    }
    let d = d.min(1.0);
    let (nxf, nyf) = (nx as f64, ny as f64);
    let lambda = d * (nxf * nyf / (nxf + nyf)).sqrt();
    let p_value = if d == 0.0 { 1.0 } else { kolmogorov_q(lambda) };
    Ok(KsTest { statistic: d, p_value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum KsStatus {
    Tested,
    NotAvailable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KsReport {
    pub status: KsStatus,
    pub estimator: EstimatorKind,
    pub estimator_status: Status,
    pub alpha_hat: Option<f64>,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub n_x: usize,
    pub n_y: usize,
}

/// Fits alpha on `x`, draws a fresh sample of the same size from the fitted
/// model with `seed`, and compares the two with the KS test.
pub fn fit_and_test(
    x: &Sample,
    looks: f64,
    estimator: EstimatorKind,
    seed: u64,
    config: &EstimatorConfig,
) -> Result<KsReport> {
    let fit = estimator.estimate(x, looks, config);
    let n = x.len();
    let Some(alpha) = fit.alpha_hat else {
        return Ok(KsReport {
            status: KsStatus::NotAvailable,
            estimator,
            estimator_status: fit.status,
            alpha_hat: None,
            statistic: None,
            p_value: None,
            n_x: n,
            n_y: 0,
        });
    };
    let y = gi0_sample(&Gi0Params::unit_mean(alpha, looks)?, n, seed)?;
    let t = ks_two_sample(x, &y)?;
    Ok(KsReport {
        status: KsStatus::Tested,
        estimator,
        estimator_status: fit.status,
        alpha_hat: Some(alpha),
        statistic: Some(t.statistic),
        p_value: Some(t.p_value),
        n_x: n,
        n_y: y.len(),
    })
}
