//! Time source abstraction for solver time limits.
//!
//! The branch-and-bound solver checks its deadline at node boundaries
//! through this trait, which keeps the core crate `no_std` and lets
//! tests drive time-limit behavior deterministically.

/// Monotonic elapsed-seconds source.
pub trait Clock {
    /// Seconds elapsed since the clock was created.
    fn elapsed_secs(&self) -> f64;
}

/// A clock that never advances; time limits are effectively disabled.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_secs(&self) -> f64 {
        0.0
    }
}

/// Wall-clock time from `std::time::Instant`.
#[cfg(feature = "std")]
#[derive(Debug, Clone)]
pub struct WallClock {
    start: std::time::Instant,
}

#[cfg(feature = "std")]
impl WallClock {
    pub fn start() -> Self {
        Self { start: std::time::Instant::now() }
    }
}

#[cfg(feature = "std")]
impl Default for WallClock {
    fn default() -> Self {
        Self::start()
    }
}

#[cfg(feature = "std")]
impl Clock for WallClock {
    fn elapsed_secs(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}
