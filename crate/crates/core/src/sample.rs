use alloc::vec::Vec;

use crate::contamination::ContaminationSpec;
use crate::error::{Error, Result};

/// Where a simulated sample came from. Enough to regenerate it bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Provenance {
    pub seed: u64,
    pub alpha: f64,
    pub gamma: f64,
    pub looks: f64,
    pub contamination: ContaminationSpec,
}

/// A nonempty collection of positive, finite intensities in draw order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    provenance: Option<Provenance>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegenerateSample("sample is empty"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain("sample values must be finite and > 0"));
        }
        Ok(Self { values, provenance: None })
    }

    pub(crate) fn with_provenance(values: Vec<f64>, provenance: Provenance) -> Self {
        debug_assert!(!values.is_empty());
        Self { values, provenance: Some(provenance) }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::MAX, f64::min)
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn all_equal(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}
