//! Wall-clock accounting per run.

use std::time::{Duration, Instant};

/// Cost of one run: `T`, `T / cycles` and `T / cycles / cells`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingRecord {
    pub cells: usize,
    /// Unknowns: cells times velocity nodes (or conserved variables).
    pub dofs: usize,
    pub cycles: usize,
    /// Seconds spent in the time loop.
    pub wall: f64,
}

impl TimingRecord {
    pub fn time_per_cycle(&self) -> f64 {
        if self.cycles == 0 {
            0.0
        } else {
            self.wall / self.cycles as f64
        }
    }

    pub fn time_per_cell(&self) -> f64 {
        if self.cells == 0 {
            0.0
        } else {
            self.time_per_cycle() / self.cells as f64
        }
    }
}

/// Accumulates time over disjoint intervals on a monotonic clock.
#[derive(Debug, Default)]
pub struct Stopwatch {
    total: Duration,
    started: Option<Instant>,
}

impl Stopwatch {
    pub fn start(&mut self) {
        self.started = Some(Instant::now());
    }

    pub fn stop(&mut self) {
        if let Some(t) = self.started.take() {
            self.total += t.elapsed();
        }
    }

    pub fn seconds(&self) -> f64 {
        self.total.as_secs_f64()
    }
}
