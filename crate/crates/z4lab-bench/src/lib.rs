//! Shared fixtures for the benchmark suite: the reference coefficient set,
//! a chaotic-regime parameter point, and a generic off-axis start state.

use z4lab_core::{PhysParams, State3, SystemCoefficients};

/// Built-in concrete coefficient set used by all benchmarks.
pub fn coefficients() -> SystemCoefficients {
    SystemCoefficients::concrete()
}

/// Reference parameter point inside the chaotic regime.
pub fn chaotic_point() -> PhysParams {
    PhysParams::new(0.07, 0.16, 0.02)
}

/// Off-axis, asymmetric start state.
pub fn start_state() -> State3 {
    State3::new(0.1, 0.1, 0.1)
}
