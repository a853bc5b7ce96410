//! File formats, the parallel Monte Carlo runner and roughness maps on top of `gi0-core`.

pub mod cli;
pub mod grid;
pub mod map;
pub mod raster;
pub mod sample_io;

use std::time::Instant;

use gi0_core::Clock;

/// Seconds since construction, from the monotonic system clock.
#[derive(Debug, Clone, Copy)]
pub struct MonotonicClock {
    origin: Instant,
}

impl MonotonicClock {
    pub fn new() -> Self {
        Self { origin: Instant::now() }
    }
}

impl Default for MonotonicClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for MonotonicClock {
    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}
