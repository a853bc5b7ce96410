//! Adaptive Gauss-Kronrod quadrature (15-point Kronrod, embedded 7-point Gauss).
//!
//! Global subdivision: the interval with the largest error estimate is bisected
//! until the summed error meets the tolerance. Error estimates use the QUADPACK
//! rescaling. A semi-infinite range is mapped to [0, 1) by t = lower + u / (1 - u).

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Float;

use crate::error::{Error, Result};

pub(crate) const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

pub(crate) const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

pub(crate) const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Upper end of an integration range.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Bound {
    Finite(f64),
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegrationSpec {
    pub lower: f64,
    pub upper: Bound,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl IntegrationSpec {
    pub fn new(lower: f64, upper: Bound) -> Self {
        Self { lower, upper, rel_tol: 1e-8, abs_tol: 1e-10, max_subdivisions: 2000 }
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower >= 0.0) || !self.lower.is_finite() {
            return Err(Error::Domain("integration lower bound must be finite and >= 0"));
        }
        if let Bound::Finite(u) = self.upper {
            if !(u > self.lower) || !u.is_finite() {
                return Err(Error::Domain("integration upper bound must exceed the lower bound"));
            }
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Domain("tolerances must be > 0"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be >= 1"));
        }
        Ok(())
    }

    pub(crate) fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// One 15-point rule on [a, b]: (Kronrod estimate, error estimate, |f| integral).
pub(crate) fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = rescale_error((resk - resg) * h, resabs * h.abs(), resasc * h.abs());
    (resk * h, err, resabs * h.abs())
}

pub(crate) fn rescale_error(diff: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = diff.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrates `f` over the range in `spec`.
///
/// Fails with [`Error::QuadratureNonConvergence`] only when the subdivision
/// budget runs out with the error above ten times the tolerance.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(f: F, spec: &IntegrationSpec) -> Result<Integral> {
    integrate_with_breakpoints(f, spec, &[])
}

/// As [`integrate_adaptive`], with extra initial breakpoints inside a finite range.
pub fn integrate_with_breakpoints<F: FnMut(f64) -> f64>(
    mut f: F,
    spec: &IntegrationSpec,
    breakpoints: &[f64],
) -> Result<Integral> {
    spec.validate()?;
    match spec.upper {
        Bound::Finite(upper) => {
            let mut edges: Vec<f64> = breakpoints
                .iter()
                .copied()
                .filter(|&x| x > spec.lower && x < upper)
                .collect();
            edges.push(spec.lower);
            edges.push(upper);
            edges.extend(log_grid(spec.lower, upper));
            edges.sort_by(f64::total_cmp);
            edges.dedup();
            adapt(&mut f, &edges, spec)
        }
        Bound::Infinity => {
            let lower = spec.lower;
            let mut g = |u: f64| {
                let d = 1.0 - u;
                let t = lower + u / d;
                let v = f(t) / (d * d);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            };
            adapt(&mut g, &[0.0, 1.0], spec)
        }
    }
}

/// Four cells per decade across ranges spanning more than three decades, so that
/// narrow features far from the upper end are seen by the first rules.
fn log_grid(lower: f64, upper: f64) -> Vec<f64> {
    let start = lower.max(upper * 1e-12);
    if upper <= 1e3 * start {
        return Vec::new();
    }
    let step = 10f64.powf(0.25);
    let mut out = Vec::new();
    let mut t = start;
    while t < upper {
        out.push(t);
        t *= step;
    }
    out
}

fn adapt<F: FnMut(f64) -> f64>(f: &mut F, edges: &[f64], spec: &IntegrationSpec) -> Result<Integral> {
    let mut heap = BinaryHeap::with_capacity(spec.max_subdivisions + edges.len());
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in edges.windows(2) {
        let (v, e, _) = gk15(f, w[0], w[1]);
        evaluations += 15;
        value += v;
        error += e;
        heap.push(Piece { a: w[0], b: w[1], value: v, err: e });
    }
    // Pieces too narrow to split further are parked here.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut splits = 0;
    while error > spec.tolerance(value) && splits < spec.max_subdivisions {
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) || (p.b - p.a) <= 1e3 * f64::EPSILON * p.a.abs().max(p.b.abs()) {
            frozen_value += p.value;
            frozen_error += p.err;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let (v1, e1, _) = gk15(f, p.a, m);
        let (v2, e2, _) = gk15(f, m, p.b);
        evaluations += 30;
        splits += 1;
        value += v1 + v2 - p.value;
        error += e1 + e2 - p.err;
        heap.push(Piece { a: p.a, b: m, value: v1, err: e1 });
        heap.push(Piece { a: m, b: p.b, value: v2, err: e2 });
    }
    // Re-sum to shed the drift of the running totals.
    let mut value_sum = frozen_value;
    let mut error_sum = frozen_error;
    for p in heap.iter() {
        value_sum += p.value;
        error_sum += p.err;
    }
    let tol = spec.tolerance(value_sum);
    if error_sum > 10.0 * tol {
        return Err(Error::QuadratureNonConvergence { value: value_sum, abs_error: error_sum });
    }
    Ok(Integral { value: value_sum, abs_error: error_sum, evaluations })
}
