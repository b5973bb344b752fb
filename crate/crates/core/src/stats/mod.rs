//! Exact Gaussian moments, Cauchy rates and invariance tests.

pub mod invariance;
pub mod isserlis;
pub mod ks;
pub mod rate;

pub use invariance::{invariance_report, InvarianceConfig, InvarianceReport, Observable, ObservableResult};
pub use isserlis::{isserlis_expect, second_moment, Factor, Polynomial, MAX_DEGREE, PAIRING_BUDGET};
pub use ks::{weighted_two_sample, TwoSample};
pub use rate::{cauchy_rate, exact_hw_quartic_mean, exact_rate, fit_slope, RateFunctional, RatePoint, RateReport, SlopeFit};
