// Transcendentals go through libm so results do not depend on whether the
// final binary links std.

pub(crate) use libm::{atan, cos, exp, hypot, log, log10, log2, pow, sin, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;

/// Numerically stable logistic function.
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + exp(-x))
    } else {
        let e = exp(x);
        e / (1.0 + e)
    }
}
