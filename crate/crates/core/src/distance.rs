//! The triangular distance d_T(f, g) = integral of (f - g)^2 / (f + g) over (0, inf).

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{Gi0Density, Gi0Params};
use crate::quadrature::{integrate_adaptive, rescale_error, Bound, IntegrationSpec, WG, WGK, XGK};
use crate::sample::Sample;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistanceValue {
    pub value: f64,
    pub est_abs_error: f64,
    pub evaluations: usize,
}

#[inline]
fn integrand(f: f64, g: f64) -> f64 {
    let s = f + g;
    if s > 0.0 {
        let d = f - g;
        d * d / s
    } else {
        0.0
    }
}

pub fn triangular_distance<F, G>(f: F, g: G, spec: &IntegrationSpec) -> Result<DistanceValue>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let r = integrate_adaptive(|t| integrand(f(t), g(t)), spec)?;
    let mut value = r.value;
    if value > 2.0 && value - 2.0 <= r.abs_error {
        value = 2.0;
    }
    Ok(DistanceValue { value, est_abs_error: r.abs_error, evaluations: r.evaluations })
}

/// Tail probability left beyond the model-driven cutoff.
pub(crate) const TAIL_CUTOFF: f64 = 1e-7;

/// [0, max(10 max z, z with 1 - F(z) = 1e-7)], rel 1e-8, abs 1e-10, 2000 subdivisions.
pub fn default_domain(sample: &Sample, params: &Gi0Params) -> IntegrationSpec {
    let q = params.upper_quantile(TAIL_CUTOFF).unwrap_or(0.0);
    IntegrationSpec::new(0.0, Bound::Finite((10.0 * sample.max()).max(q)))
}

/// Distance from the unit-mean model at any alpha to a fixed empirical density.
///
/// The quadrature partition is refined once, jointly for a set of probe alphas and
/// for the mass of the empirical density, and the empirical density is cached at
/// the final nodes. Every later evaluation is a fixed-node sum in the model density.
#[derive(Debug, Clone)]
pub struct TriangularObjective {
    looks: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    empirical: Vec<f64>,
    abs_error: f64,
    converged: bool,
    empirical_mass: f64,
}

struct Piece {
    a: f64,
    b: f64,
    emp: [f64; 15],
    values: Vec<f64>,
    errors: Vec<f64>,
}

fn nodes_of(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut t = [c; 15];
    for j in 0..7 {
        t[j] = c - h * XGK[j];
        t[14 - j] = c + h * XGK[j];
    }
    t
}

fn node_weights(a: f64, b: f64) -> [f64; 15] {
    let h = 0.5 * (b - a);
    let mut w = [WGK[7] * h; 15];
    for j in 0..7 {
        w[j] = WGK[j] * h;
        w[14 - j] = WGK[j] * h;
    }
    w
}

/// Kronrod and Gauss estimates for one set of 15 integrand values on a piece of half-width h.
fn rule(v: &[f64; 15], h: f64) -> (f64, f64) {
    let mut resk = WGK[7] * v[7];
    let mut resg = WG[3] * v[7];
    let mut resabs = resk.abs();
    for j in 0..7 {
        let s = v[j] + v[14 - j];
        resk += WGK[j] * s;
        resabs += WGK[j] * (v[j].abs() + v[14 - j].abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (v[7] - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((v[j] - mean).abs() + (v[14 - j] - mean).abs());
    }
    let err = rescale_error((resk - resg) * h, resabs * h, resasc * h);
    (resk * h, err)
}

fn evaluate_piece<E: Fn(f64) -> f64>(emp: &E, models: &[Gi0Density], a: f64, b: f64) -> Piece {
    let t = nodes_of(a, b);
    let h = 0.5 * (b - a);
    let mut k = [0.0; 15];
    for j in 0..15 {
        k[j] = emp(t[j]);
    }
    let mut values = Vec::with_capacity(models.len() + 1);
    let mut errors = Vec::with_capacity(models.len() + 1);
    let mut v = [0.0; 15];
    for m in models {
        for j in 0..15 {
            v[j] = integrand(m.pdf(t[j]), k[j]);
        }
        let (val, err) = rule(&v, h);
        values.push(val);
        errors.push(err);
    }
    let (val, err) = rule(&k, h);
    values.push(val);
    errors.push(err);
    Piece { a, b, emp: k, values, errors }
}

impl TriangularObjective {
    /// Refines a partition of [0, `upper`] for the probe `alphas` and builds the node cache.
    ///
    /// `breakpoints` seeds the partition (narrow kernel supports, for instance).
    /// Tolerances and the subdivision budget come from `spec`; its bounds are ignored.
    pub fn new<E: Fn(f64) -> f64>(
        empirical: E,
        looks: f64,
        upper: f64,
        alphas: &[f64],
        breakpoints: &[f64],
        spec: &IntegrationSpec,
    ) -> Result<Self> {
        if !(upper > 0.0) || !upper.is_finite() {
            return Err(Error::Domain("upper integration limit must be finite and > 0"));
        }
        let models: Vec<Gi0Density> = alphas
            .iter()
            .map(|&a| Gi0Params::unit_mean(a, looks).map(|p| p.density()))
            .collect::<Result<_>>()?;

        let edges = initial_edges(upper, breakpoints);
        let mut pieces: Vec<Piece> =
            edges.windows(2).map(|w| evaluate_piece(&empirical, &models, w[0], w[1])).collect();
        let m = models.len() + 1;
        let mut totals = alloc::vec![0.0; m];
        let mut errors = alloc::vec![0.0; m];
        for p in &pieces {
            for c in 0..m {
                totals[c] += p.values[c];
                errors[c] += p.errors[c];
            }
        }

        let mut splits = 0;
        loop {
            // Worst component relative to its tolerance.
            let (worst, ratio) = (0..m)
                .map(|c| (c, errors[c] / spec.tolerance(totals[c])))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            if ratio <= 1.0 || splits >= spec.max_subdivisions {
                break;
            }
            let idx = pieces
                .iter()
                .enumerate()
                .filter(|(_, p)| splittable(p.a, p.b))
                .max_by(|x, y| x.1.errors[worst].total_cmp(&y.1.errors[worst]))
                .map(|(i, _)| i);
            let Some(idx) = idx else { break };
            if pieces[idx].errors[worst] == 0.0 {
                break;
            }
            let p = pieces.swap_remove(idx);
            let mid = 0.5 * (p.a + p.b);
            let left = evaluate_piece(&empirical, &models, p.a, mid);
            let right = evaluate_piece(&empirical, &models, mid, p.b);
            for c in 0..m {
                totals[c] += left.values[c] + right.values[c] - p.values[c];
                errors[c] += left.errors[c] + right.errors[c] - p.errors[c];
            }
            pieces.push(left);
            pieces.push(right);
            splits += 1;
        }

        pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
        let mut totals = alloc::vec![0.0; m];
        let mut errors = alloc::vec![0.0; m];
        let mut nodes = Vec::with_capacity(15 * pieces.len());
        let mut weights = Vec::with_capacity(15 * pieces.len());
        let mut cache = Vec::with_capacity(15 * pieces.len());
        for p in &pieces {
            for c in 0..m {
                totals[c] += p.values[c];
                errors[c] += p.errors[c];
            }
            nodes.extend_from_slice(&nodes_of(p.a, p.b));
            weights.extend_from_slice(&node_weights(p.a, p.b));
            cache.extend_from_slice(&p.emp);
        }
        let converged = (0..m).all(|c| errors[c] <= 10.0 * spec.tolerance(totals[c]));
        let abs_error = errors.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            looks,
            nodes,
            weights,
            empirical: cache,
            abs_error,
            converged,
            empirical_mass: totals[m - 1],
        })
    }

    /// d_T between the unit-mean model at `alpha` and the cached empirical density.
    pub fn value(&self, alpha: f64) -> Result<f64> {
        let d = Gi0Params::unit_mean(alpha, self.looks)?.density();
        let mut acc = 0.0;
        for ((&t, &w), &k) in self.nodes.iter().zip(&self.weights).zip(&self.empirical) {
            acc += w * integrand(d.pdf(t), k);
        }
        Ok(acc.clamp(0.0, 2.0))
    }

    /// Largest summed error estimate over the refinement components.
    pub fn abs_error(&self) -> f64 {
        self.abs_error
    }

    /// Whether every component met ten times its tolerance.
    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Integral of the empirical density over the partition.
    pub fn empirical_mass(&self) -> f64 {
        self.empirical_mass
    }
}

fn splittable(a: f64, b: f64) -> bool {
    let m = 0.5 * (a + b);
    m > a && m < b && (b - a) > 1e3 * f64::EPSILON * b.abs()
}

/// Edges 0, t0 and a geometric grid of eight cells per decade up to `upper`, plus breakpoints.
fn initial_edges(upper: f64, breakpoints: &[f64]) -> Vec<f64> {
    let t0 = (upper * 1e-16).max(1e-12).min(upper * 0.5);
    let step = 10f64.powf(0.125);
    let mut edges = alloc::vec![0.0, t0];
    let mut t = t0 * step;
    while t < upper {
        edges.push(t);
        t *= step;
    }
    edges.push(upper);
    edges.extend(breakpoints.iter().copied().filter(|&x| x > 0.0 && x < upper));
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges
}
