//! Shared numerical kernels: adaptive Gauss-Kronrod quadrature, windowed
//! time averaging with convergence control, first-threshold-crossing search,
//! and the scaled complementary error function on the complex half-plane.

mod faddeeva;
mod quad;
mod search;

pub use faddeeva::erfcx;
pub use quad::{
    integrate, integrate_complex, integrate_exp_tail, integrate_split, QuadResult, QuadResultC,
    QuadratureSpec,
};
pub use search::{first_crossing, Crossing, SearchSpec};

use crate::error::{ChannelError, Result};

/// Normalized sinc, `sin(pi x) / (pi x)`.
#[inline]
pub fn sinc(x: f64) -> f64 {
    sin_ratio(std::f64::consts::PI * x)
}

/// `sin(y) / y` with a series fallback near zero.
#[inline]
pub fn sin_ratio(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sin() / y
    }
}

/// Controls the window-doubling trapezoidal time average.
#[derive(Debug, Clone, Copy)]
pub struct TimeAverageSpec {
    /// Base window length; windows are `base * 2^k`.
    pub base_window_s: f64,
    /// Trapezoid points over the base window (step size stays fixed as the
    /// window doubles).
    pub samples_per_window: usize,
    /// Stop once successive window estimates differ by less than this
    /// relative amount.
    pub rel_tol: f64,
    /// Absolute floor for the convergence test, for averages near zero.
    pub abs_tol: f64,
    /// Give up after this many doublings.
    pub max_doublings: usize,
}

impl TimeAverageSpec {
    pub fn new(base_window_s: f64, samples_per_window: usize) -> Self {
        Self {
            base_window_s,
            samples_per_window,
            rel_tol: 5e-3,
            abs_tol: 1e-12,
            max_doublings: 10,
        }
    }
}

/// Averages `f` over `t in [0, T]`, doubling `T` until two successive
/// estimates agree to `spec.rel_tol`.
pub fn time_average(f: impl Fn(f64) -> f64, spec: &TimeAverageSpec) -> Result<f64> {
    if !(spec.base_window_s > 0.0) || spec.samples_per_window < 2 {
        return Err(ChannelError::InvalidParameter {
            name: "time_average",
            message: "window must be positive with at least 2 samples".into(),
        });
    }
    let mut previous: Option<f64> = None;
    for k in 0..=spec.max_doublings {
        let window = spec.base_window_s * (1u64 << k) as f64;
        let n = (spec.samples_per_window - 1) * (1usize << k) + 1;
        let dt = window / (n - 1) as f64;
        let mut acc = 0.5 * (f(0.0) + f(window));
        for j in 1..n - 1 {
            acc += f(j as f64 * dt);
        }
        let avg = acc * dt / window;
        if let Some(prev) = previous {
            if (avg - prev).abs() <= spec.rel_tol * avg.abs() + spec.abs_tol {
                return Ok(avg);
            }
        }
        previous = Some(avg);
    }
    Err(ChannelError::NumericFailure {
        context: "time_average window doubling".into(),
        achieved: previous.map(|p| p.abs()).unwrap_or(f64::NAN),
        requested: spec.rel_tol,
    })
}
