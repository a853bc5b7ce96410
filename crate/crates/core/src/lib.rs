//! Roughness estimation for the G_I^0 intensity model of SAR speckle.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It provides
//!
//! * the closed-form model: density, CDF, moments, sampling and tail diagnostics ([`model`]),
//! * asymmetric-kernel density estimates and the Freedman-Diaconis histogram ([`kde`]),
//! * adaptive Gauss-Kronrod quadrature ([`quadrature`]) and the triangular distance ([`distance`]),
//! * the four roughness estimators: maximum likelihood, 1/2-moment, log-cumulant and
//!   minimum triangular distance ([`estimators`]),
//! * contamination models ([`contamination`]), the Monte Carlo replicate/aggregate
//!   primitives ([`montecarlo`]) and the two-sample Kolmogorov-Smirnov test ([`gof`]).
//!
//! All randomness is driven by explicit `u64` seeds through ChaCha8 streams, so every
//! result is reproducible bit for bit on any platform.

#![no_std]
// Whenever std ends up linked its inherent float methods shadow `num_traits::Float`.
#![allow(unused_imports)]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod contamination;
pub mod distance;
pub mod error;
pub mod estimators;
pub mod gof;
pub mod kde;
pub mod model;
pub mod montecarlo;
mod optimize;
pub mod quadrature;
pub mod rng;
pub mod sample;
pub mod special;

pub use contamination::{mixture_cdf, sample_contaminated, ContaminationSpec};
pub use distance::{default_domain, triangular_distance, DistanceValue, TriangularObjective};
pub use error::{Error, Result};
pub use estimators::{
    estimate_all, estimate_logcum, estimate_logcum_from, estimate_ml, estimate_mom12,
    estimate_mom12_from, estimate_selected, estimate_triangular, estimate_triangular_with_density,
    Clock, EstimateOutcome, EstimatorConfig, EstimatorKind, NoClock, SearchRange, Status,
};
pub use gof::{fit_and_test, kolmogorov_q, ks_two_sample, KsReport, KsStatus, KsTest};
pub use kde::{default_bandwidth, fd_histogram, DensityEstimate, Histogram, Kernel};
pub use model::{gi0_sample, unit_mean_scale, Gi0Density, Gi0Params, Moment, MomentOrder, TailReport};
pub use montecarlo::{
    aggregate_cell, replicate_seed, run_cell, run_replicate, Cell, CellStats, DiscardPolicy, EstimatorStats, GridSpec,
    ReplicateOutcome,
};
pub use quadrature::{integrate_adaptive, integrate_with_breakpoints, Bound, Integral, IntegrationSpec};
pub use sample::{Provenance, Sample};
