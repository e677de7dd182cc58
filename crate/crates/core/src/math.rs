//! Shared numerical constants.

/// ln(2 pi), the normalizing constant of every Gaussian density in the crate.
pub(crate) const LN_TWO_PI: f64 = 1.8378770664093453;
