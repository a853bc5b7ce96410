//! Sliding-window roughness maps.

use gi0_core::{EstimatorConfig, EstimatorKind, Sample};
use rayon::prelude::*;

use crate::raster::Raster;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapOptions {
    /// Odd window side, 3 to 11.
    pub window: usize,
    pub looks: f64,
    pub estimator: EstimatorKind,
    pub config: EstimatorConfig,
}

pub const WINDOW_SIDES: [usize; 5] = [3, 5, 7, 9, 11];

/// Per-pixel alpha estimates from the window centered on each pixel.
///
/// Pixels whose window leaves the image, contains a nonpositive or nodata
/// value, or on which the estimator fails are NaN. Rows are processed in
/// parallel on the current rayon pool; the output does not depend on scheduling.
pub fn roughness_map(input: &Raster, opts: &MapOptions) -> Raster {
    assert!(WINDOW_SIDES.contains(&opts.window), "window side must be one of 3, 5, 7, 9, 11");
    let (w, h) = (input.width, input.height);
    let half = opts.window / 2;
    let rows: Vec<Vec<f32>> = (0..h)
        .into_par_iter()
        .map(|r| {
            let mut out = vec![f32::NAN; w];
            if r < half || r + half >= h {
                return out;
            }
            let mut buf = Vec::with_capacity(opts.window * opts.window);
            for (c, px) in out.iter_mut().enumerate() {
                if c < half || c + half >= w {
                    continue;
                }
                buf.clear();
                for rr in r - half..=r + half {
                    let row = &input.pixels[rr * w..(rr + 1) * w];
                    buf.extend(row[c - half..=c + half].iter().map(|&v| f64::from(v)));
                }
                if let Ok(sample) = Sample::new(buf.clone()) {
                    let est = opts.estimator.estimate(&sample, opts.looks, &opts.config);
                    if let Some(a) = est.alpha_hat {
                        *px = a as f32;
                    }
                }
            }
            out
        })
        .collect();
    Raster::new(w, h, rows.concat())
}
