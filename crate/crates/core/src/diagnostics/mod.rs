//! Exponential weights, decay-index fits, moment estimates and the
//! coercivity / trilinear monitors.

mod fit;
mod moments;
mod smoothing;
mod weight;

pub use fit::{fit_decay, fit_decay_values, slices, Axis, FitReport, NOISE_FLOOR, NU_MAX, NU_MIN, NU_STEP};
pub use moments::{
    coercivity_check, fit_factorial_growth, moment_estimate, predicted_space_index, predicted_velocity_index,
    trilinear_quotient, trilinear_ratio, FactorialFit, TrilinearSample, MOMENT_PADDING,
};
pub use smoothing::{kolmogorov_min_ratio, kolmogorov_ratio, SmoothingGrid, SmoothingMinimum};
pub use weight::{
    apply_weight, bisect_weight_rate, critical_norm, saturation, weighted_norm_monitor, WeightSpec, WeightedState,
    EXPONENT_CAP,
};
