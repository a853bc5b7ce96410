//! The G_I^0(alpha, gamma, L) intensity distribution.
//!
//! Z = X * Y with backscatter X = gamma / G, G ~ Gamma(-alpha, 1), and speckle
//! Y ~ Gamma(L, rate L). Its density is
//!
//! ```text
//! f(z) = L^L Gamma(L - alpha) gamma^(-alpha) z^(L-1) (gamma + L z)^(alpha - L) / (Gamma(-alpha) Gamma(L))
//! ```
//!
//! and its CDF is the incomplete beta ratio I_w(L, -alpha) at w = L z / (L z + gamma).
//! Everything is evaluated in log space.

use alloc::vec::Vec;

use num_traits::Float;
use rand_core::Rng;

use crate::contamination::ContaminationSpec;
use crate::error::{Error, Result};
use crate::rng::{self, gamma_variate};
use crate::sample::{Provenance, Sample};
use crate::special::{inc_beta_xy, lgamma};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Gi0Params {
    alpha: f64,
    gamma: f64,
    looks: f64,
}

/// Scale that gives the model unit mean: gamma* = -alpha - 1. Requires alpha < -1.
pub fn unit_mean_scale(alpha: f64) -> Result<f64> {
    if !(alpha < -1.0) || !alpha.is_finite() {
        return Err(Error::Domain("unit-mean scale requires alpha < -1"));
    }
    Ok(-alpha - 1.0)
}

impl Gi0Params {
    pub fn new(alpha: f64, gamma: f64, looks: f64) -> Result<Self> {
        if !(alpha < 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams("alpha must be finite and < 0"));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParams("gamma must be finite and > 0"));
        }
        if !(looks >= 1.0) || !looks.is_finite() {
            return Err(Error::InvalidParams("looks must be finite and >= 1"));
        }
        Ok(Self { alpha, gamma, looks })
    }

    /// Parameters with gamma = -alpha - 1, so that E Z = 1.
    pub fn unit_mean(alpha: f64, looks: f64) -> Result<Self> {
        let gamma = unit_mean_scale(alpha).map_err(|_| {
            Error::InvalidParams("unit-mean parameters require alpha < -1")
        })?;
        Self::new(alpha, gamma, looks)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn looks(&self) -> f64 {
        self.looks
    }

    /// Same alpha and looks with the scale multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.alpha, self.gamma * factor, self.looks)
    }

    /// Frozen density with its normalizing constant precomputed.
    pub fn density(&self) -> Gi0Density {
        let (a, g, l) = (self.alpha, self.gamma, self.looks);
        let ln_norm = l * l.ln() + lgamma(l - a) - lgamma(-a) - lgamma(l) - a * g.ln();
        Gi0Density { alpha: a, gamma: g, looks: l, ln_norm }
    }

    pub fn pdf(&self, z: f64) -> Result<f64> {
        check_point(z)?;
        Ok(self.density().pdf(z))
    }

    pub fn ln_pdf(&self, z: f64) -> Result<f64> {
        check_point(z)?;
        Ok(self.density().ln_pdf(z))
    }

    pub fn cdf(&self, z: f64) -> Result<f64> {
        if z.is_nan() {
            return Err(Error::Domain("cdf argument is NaN"));
        }
        if z <= 0.0 {
            return Ok(0.0);
        }
        if z == f64::INFINITY {
            return Ok(1.0);
        }
        let lz = self.looks * z;
        let denom = lz + self.gamma;
        inc_beta_xy(self.looks, -self.alpha, lz / denom, self.gamma / denom)
    }

    /// Survival function 1 - F(z), accurate in the far tail.
    pub fn sf(&self, z: f64) -> Result<f64> {
        if z.is_nan() {
            return Err(Error::Domain("sf argument is NaN"));
        }
        if z <= 0.0 {
            return Ok(1.0);
        }
        if z == f64::INFINITY {
            return Ok(0.0);
        }
        let lz = self.looks * z;
        let denom = lz + self.gamma;
        inc_beta_xy(-self.alpha, self.looks, self.gamma / denom, lz / denom)
    }

    /// The point z with 1 - F(z) = `tail`, by bisection in log z.
    pub fn upper_quantile(&self, tail: f64) -> Result<f64> {
        if !(tail > 0.0 && tail < 1.0) {
            return Err(Error::Domain("tail probability must be in (0, 1)"));
        }
        let mut hi = (self.gamma / self.looks).max(1e-300);
        let mut steps = 0;
        while self.sf(hi)? > tail {
            hi *= 10.0;
            steps += 1;
            if steps > 700 {
                return Err(Error::NoConvergence("upper quantile bracket"));
            }
        }
        let mut lo = hi / 10.0;
        while self.sf(lo)? <= tail {
            lo /= 10.0;
            steps += 1;
            if steps > 1400 {
                return Err(Error::NoConvergence("upper quantile bracket"));
            }
        }
        let (mut a, mut b) = (lo.ln(), hi.ln());
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.sf(m.exp())? > tail {
                a = m;
            } else {
                b = m;
            }
            if b - a < 1e-13 {
                break;
            }
        }
        Ok(b.exp())
    }

    /// E(Z^r): (gamma/L)^r Gamma(-alpha-r) Gamma(L+r) / (Gamma(-alpha) Gamma(L)) when alpha < -r.
    pub fn moment(&self, order: MomentOrder) -> Moment {
        let r = order.get();
        let (a, g, l) = (self.alpha, self.gamma, self.looks);
        if a >= -r {
            return Moment::Infinite;
        }
        let ln_m = r * (g / l).ln() + lgamma(-a - r) - lgamma(-a) + lgamma(l + r) - lgamma(l);
        Moment::Finite(ln_m.exp())
    }

    pub fn tail_index(&self) -> f64 {
        1.0 - self.alpha
    }

    /// Log-log slope of the density between two far-tail abscissae, next to the tail index.
    pub fn tail_diagnostics(&self, x_lo: f64, x_hi: f64) -> Result<TailReport> {
        if !(x_lo > 0.0 && x_hi > x_lo) || !x_hi.is_finite() {
            return Err(Error::Domain("tail abscissae need 0 < x_lo < x_hi"));
        }
        let d = self.density();
        let slope = (d.ln_pdf(x_hi) - d.ln_pdf(x_lo)) / (x_hi.ln() - x_lo.ln());
        Ok(TailReport { tail_index: self.tail_index(), slope_estimate: slope, abscissae: (x_lo, x_hi) })
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g = gamma_variate(rng, -self.alpha);
        let y = gamma_variate(rng, self.looks) / self.looks;
        self.gamma / g * y
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        gi0_sample(self, n, seed)
    }
}

fn check_point(z: f64) -> Result<()> {
    if !(z > 0.0) || z.is_nan() {
        return Err(Error::Domain("density argument must be > 0"));
    }
    Ok(())
}

/// A G_I^0 density with the normalizing constant cached. Unchecked: callers pass z > 0.
#[derive(Debug, Clone, Copy)]
pub struct Gi0Density {
    alpha: f64,
    gamma: f64,
    looks: f64,
    ln_norm: f64,
}

impl Gi0Density {
    #[inline]
    pub fn ln_pdf(&self, z: f64) -> f64 {
        let mut v = self.ln_norm + (self.alpha - self.looks) * (self.gamma + self.looks * z).ln();
        if self.looks != 1.0 {
            v += (self.looks - 1.0) * z.ln();
        }
        v
    }

    #[inline]
    pub fn pdf(&self, z: f64) -> f64 {
        self.ln_pdf(z).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MomentOrder(f64);

impl MomentOrder {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain("moment order must be > 0"));
        }
        Ok(Self(r))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A moment of the model; infinite when alpha >= -r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    Finite(f64),
    Infinite,
}

impl Moment {
    pub fn finite(self) -> Option<f64> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailReport {
    pub tail_index: f64,
    pub slope_estimate: f64,
    pub abscissae: (f64, f64),
}

/// `n` independent draws, deterministic in (params, n, seed).
pub fn gi0_sample(params: &Gi0Params, n: usize, seed: u64) -> Result<Sample> {
    if n == 0 {
        return Err(Error::Domain("sample size must be >= 1"));
    }
    let mut rng = rng::stream_rng(seed, rng::stream::VALUES);
    let values: Vec<f64> = (0..n).map(|_| params.draw(&mut rng)).collect();
    Ok(Sample::with_provenance(
        values,
        Provenance {
            seed,
            alpha: params.alpha,
            gamma: params.gamma,
            looks: params.looks,
            contamination: ContaminationSpec::None,
        },
    ))
}
