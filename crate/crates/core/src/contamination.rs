//! Contaminated samplers: with probability epsilon an observation is replaced.
//!
//! * Case 1: a draw from G_I^0(alpha2, -alpha2 - 1, L).
//! * Case 2: the constant C (a corner-reflector spike).
//! * Case 3: a draw from the base law with its scale inflated by 10^k.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::Gi0Params;
use crate::rng::{self, open01};
use crate::sample::{Provenance, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "case", rename_all = "lowercase"))]
pub enum ContaminationSpec {
    #[default]
    None,
    Case1 { epsilon: f64, alpha2: f64 },
    Case2 { epsilon: f64, c_value: f64 },
    Case3 { epsilon: f64, k_exponent: u32 },
}

impl ContaminationSpec {
    pub fn epsilon(&self) -> f64 {
        match *self {
            ContaminationSpec::None => 0.0,
            ContaminationSpec::Case1 { epsilon, .. }
            | ContaminationSpec::Case2 { epsilon, .. }
            | ContaminationSpec::Case3 { epsilon, .. } => epsilon,
        }
    }

    pub fn case_name(&self) -> &'static str {
        match self {
            ContaminationSpec::None => "none",
            ContaminationSpec::Case1 { .. } => "case1",
            ContaminationSpec::Case2 { .. } => "case2",
            ContaminationSpec::Case3 { .. } => "case3",
        }
    }

    /// Epsilon may be 1 so that saturated samples can be produced on purpose.
    pub fn validate(&self) -> Result<()> {
        let eps = self.epsilon();
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidParams("epsilon must lie in [0, 1]"));
        }
        match *self {
            ContaminationSpec::Case1 { alpha2, .. } if !(alpha2 < -1.0) || !alpha2.is_finite() => {
                Err(Error::InvalidParams("alpha2 must be finite and < -1"))
            }
            ContaminationSpec::Case2 { c_value, .. } if !(c_value > 0.0) || !c_value.is_finite() => {
                Err(Error::InvalidParams("C must be finite and > 0"))
            }
            ContaminationSpec::Case3 { k_exponent, .. } if k_exponent == 0 || k_exponent > 300 => {
                Err(Error::InvalidParams("k must be in 1..=300"))
            }
            _ => Ok(()),
        }
    }

    fn component(&self, base: &Gi0Params) -> Result<Option<Gi0Params>> {
        match *self {
            ContaminationSpec::Case1 { alpha2, .. } => Ok(Some(Gi0Params::unit_mean(alpha2, base.looks())?)),
            ContaminationSpec::Case3 { k_exponent, .. } => {
                Ok(Some(base.scaled(10f64.powi(k_exponent as i32))?))
            }
            _ => Ok(None),
        }
    }
}

/// Draws `n` observations. Base values, indicators and contaminants use separate
/// streams of `seed`, so epsilon = 0 reproduces [`crate::gi0_sample`] bit for bit.
pub fn sample_contaminated(
    base: &Gi0Params,
    spec: &ContaminationSpec,
    n: usize,
    seed: u64,
) -> Result<Sample> {
    if n == 0 {
        return Err(Error::Domain("sample size must be >= 1"));
    }
    spec.validate()?;
    let eps = spec.epsilon();
    let other = spec.component(base)?;
    let mut values_rng = rng::stream_rng(seed, rng::stream::VALUES);
    let mut flag_rng = rng::stream_rng(seed, rng::stream::INDICATORS);
    let mut contaminant_rng = rng::stream_rng(seed, rng::stream::CONTAMINANT);

    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let v = base.draw(&mut values_rng);
        let replace = eps > 0.0 && open01(&mut flag_rng) < eps;
        values.push(if !replace {
            v
        } else {
            match (spec, &other) {
                (ContaminationSpec::Case2 { c_value, .. }, _) => *c_value,
                (_, Some(p)) => p.draw(&mut contaminant_rng),
                _ => v,
            }
        });
    }
    Ok(Sample::with_provenance(
        values,
        Provenance {
            seed,
            alpha: base.alpha(),
            gamma: base.gamma(),
            looks: base.looks(),
            contamination: *spec,
        },
    ))
}

/// CDF of the contaminated law. Case 2 contributes a unit step at C.
pub fn mixture_cdf(z: f64, base: &Gi0Params, spec: &ContaminationSpec) -> Result<f64> {
    spec.validate()?;
    let eps = spec.epsilon();
    let f0 = base.cdf(z)?;
    let f1 = match *spec {
        ContaminationSpec::None => return Ok(f0),
        ContaminationSpec::Case2 { c_value, .. } => {
            if z >= c_value {
                1.0
            } else {
                0.0
            }
        }
        _ => spec.component(base)?.map_or(Ok(f0), |p| p.cdf(z))?,
    };
    Ok(((1.0 - eps) * f0 + eps * f1).clamp(0.0, 1.0))
}
