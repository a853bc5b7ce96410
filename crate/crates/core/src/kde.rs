//! Asymmetric-kernel density estimates and the Freedman-Diaconis histogram.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::special::lgamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Kernel {
    #[default]
    InverseGaussian,
    Gamma,
}

/// b = n^(-1/2) / 5.
pub fn default_bandwidth(n: usize) -> f64 {
    0.2 / (n.max(1) as f64).sqrt()
}

fn check_args(t: f64, z: f64, b: f64) -> Result<()> {
    if !(t > 0.0 && z > 0.0 && b > 0.0) || !(t.is_finite() && z.is_finite() && b.is_finite()) {
        return Err(Error::Domain("kernel arguments must be finite and > 0"));
    }
    Ok(())
}

/// Inverse Gaussian kernel: the IG density in t with mean z and shape 1/b.
pub fn kernel_ig(t: f64, z: f64, b: f64) -> Result<f64> {
    check_args(t, z, b)?;
    Ok(ln_kernel_ig(t, z, b).exp())
}

#[inline]
fn ln_kernel_ig(t: f64, z: f64, b: f64) -> f64 {
    let u = 1.0 - t / z;
    -0.5 * (2.0 * PI * b * t * t * t).ln() - u * u / (2.0 * b * t)
}

/// Gamma kernel: the Gamma density in t with shape z/b + 1 and scale b.
pub fn kernel_gamma(t: f64, z: f64, b: f64) -> Result<f64> {
    check_args(t, z, b)?;
    let s = z / b;
    Ok((s * t.ln() - t / b - (s + 1.0) * b.ln() - lgamma(s + 1.0)).exp())
}

/// Mean of kernels centered at the sample points.
#[derive(Debug, Clone)]
pub struct DensityEstimate {
    kernel: Kernel,
    bandwidth: f64,
    // Sorted ascending, so the IG sum can be restricted to a window.
    points: Vec<f64>,
    // Gamma kernel: per-point shape z/b and log normalizer.
    shapes: Vec<f64>,
    ln_norms: Vec<f64>,
}

impl DensityEstimate {
    pub fn new(sample: &Sample, kernel: Kernel, bandwidth: Option<f64>) -> Result<Self> {
        let b = bandwidth.unwrap_or_else(|| default_bandwidth(sample.len()));
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::Domain("bandwidth must be finite and > 0"));
        }
        let points = sample.sorted();
        let (shapes, ln_norms) = match kernel {
            Kernel::InverseGaussian => (Vec::new(), Vec::new()),
            Kernel::Gamma => {
                let shapes: Vec<f64> = points.iter().map(|z| z / b).collect();
                let norms = shapes.iter().map(|s| (s + 1.0) * b.ln() + lgamma(s + 1.0)).collect();
                (shapes, norms)
            }
        };
        Ok(Self { kernel, bandwidth: b, points, shapes, ln_norms })
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || t.is_nan() {
            return Err(Error::Domain("density argument must be > 0"));
        }
        Ok(self.eval(t))
    }

    /// Unchecked evaluation; 0 for t below 1e-12 or non-finite t.
    pub fn eval(&self, t: f64) -> f64 {
        if !(t >= 1e-12) || !t.is_finite() {
            return 0.0;
        }
        let n = self.points.len() as f64;
        match self.kernel {
            Kernel::InverseGaussian => self.eval_ig(t) / n,
            Kernel::Gamma => {
                let lt = t.ln();
                let tb = t / self.bandwidth;
                let mut acc = 0.0;
                for (s, c) in self.shapes.iter().zip(&self.ln_norms) {
                    acc += (s * lt - tb - c).exp();
                }
                acc / n
            }
        }
    }

    fn eval_ig(&self, t: f64) -> f64 {
        let b = self.bandwidth;
        let ln_pre = -0.5 * (2.0 * PI * b * t * t * t).ln();
        // Skip points whose term is below exp(-60) relative to 1.
        let cut = 60.0 + ln_pre.max(0.0);
        let scale = 2.0 * b * t;
        // Term exponent is -(1 - t/z)^2 / (2 b t); keep |1 - t/z| < s.
        let s = (cut * scale).sqrt();
        let lo_z = t / (1.0 + s);
        let start = self.points.partition_point(|&z| z <= lo_z);
        let end = if s < 1.0 {
            let hi_z = t / (1.0 - s);
            self.points.partition_point(|&z| z < hi_z)
        } else {
            self.points.len()
        };
        let mut acc = 0.0;
        for &z in &self.points[start..end] {
            let u = 1.0 - t / z;
            acc += (-u * u / scale).exp();
        }
        acc * ln_pre.exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
}

impl Histogram {
    pub fn integral(&self) -> f64 {
        self.densities
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(d, w)| d * (w[1] - w[0]))
            .sum()
    }
}

/// Type-7 sample quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Bin counts above this are capped by widening the bins.
const MAX_BINS: usize = 1_000_000;

/// Histogram with bin width 2 IQR n^(-1/3) starting at the sample minimum.
pub fn fd_histogram(sample: &Sample) -> Result<Histogram> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::DegenerateSample("histogram needs at least two values"));
    }
    let sorted = sample.sorted();
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    if !(iqr > 0.0) {
        return Err(Error::DegenerateSample("interquartile range is zero"));
    }
    let (min, max) = (sorted[0], sorted[n - 1]);
    let mut width = 2.0 * iqr * (n as f64).powf(-1.0 / 3.0);
    let mut bins = (((max - min) / width).ceil() as usize).max(1);
    if bins > MAX_BINS {
        bins = MAX_BINS;
        width = (max - min) / bins as f64;
    }
    let edges: Vec<f64> = (0..=bins).map(|i| min + i as f64 * width).collect();
    let mut counts = alloc::vec![0usize; bins];
    for &v in &sorted {
        let k = (((v - min) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let densities = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (n as f64 * (w[1] - w[0])))
        .collect();
    Ok(Histogram { bin_edges: edges, densities })
}
