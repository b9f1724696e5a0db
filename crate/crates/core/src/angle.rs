//! Angle branches and circular comparisons.

use std::f64::consts::{PI, TAU};

/// Maps an angle into `(−π, π]`.
pub fn wrap_pi(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    // rem_euclid can land exactly on TAU for tiny negative inputs
    if t <= -PI {
        t += TAU;
    }
    t
}

/// Maps an angle into `[0, 2π)`.
pub fn wrap_two_pi(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Distance between two angles measured on the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}
