//! Inputs shared by the criterion benches.

use trackbench_core::harness::{simulate_trial, SimScenario, SimTrial};
use trackbench_core::Point2;

/// Closed wavy loop of `n` twin points around `(250, 175)`.
pub fn wavy_loop(n: usize, phase: f64) -> Vec<Point2> {
    (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            let r = 1.0 + 0.05 * (7.0 * t + phase).sin();
            Point2::twin(250.0 + 150.0 * r * t.cos(), 175.0 + 90.0 * r * t.sin()).expect("finite")
        })
        .collect()
}

/// A noisy simulated oval trial.
pub fn noisy_trial() -> SimTrial {
    simulate_trial(&SimScenario::oval(20.0, 30.0, 2.0, 7)).expect("valid scenario")
}
