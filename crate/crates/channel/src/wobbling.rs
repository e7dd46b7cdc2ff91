//! UAV pitch-angle processes and their channel-facing kernels: increment
//! characteristic functions, the wobble-averaged weighted phasor
//! expectations (G kernels) that drive every coherence metric, and path
//! sampling for the Monte Carlo oracle.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, ChannelError, Result};
use crate::numerics::{integrate, integrate_split, sin_ratio, QuadratureSpec};
use crate::scenario::Scenario;

/// Pitch-angle process of the hovering platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum WobblingModel {
    /// Perfectly stable platform, theta(t) = 0.
    None,
    /// Independent stationary Gaussian increments,
    /// theta(t + dt) - theta(t) ~ N(0, scale * dt).
    Wiener {
        #[serde(default = "default_wiener_scale")]
        scale_per_s: f64,
    },
    /// Bounded oscillation theta(t) = L sin(2 pi Q t) with
    /// L ~ U[-theta_max, theta_max) and Q drawn once per path.
    Sinusoidal {
        theta_max_rad: f64,
        freq_dist: FrequencyDistribution,
    },
}

fn default_wiener_scale() -> f64 {
    1.0
}

/// Law of an oscillation frequency (Q of the sinusoidal processes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum FrequencyDistribution {
    Uniform { low_hz: f64, high_hz: f64 },
    PointMass { q_hz: f64 },
}

impl FrequencyDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FrequencyDistribution::Uniform { low_hz, high_hz } => {
                if !(low_hz > 0.0 && high_hz > low_hz) || !high_hz.is_finite() {
                    return Err(invalid(
                        "freq_dist",
                        format!("need 0 < low < high, got [{low_hz}, {high_hz})"),
                    ));
                }
            }
            FrequencyDistribution::PointMass { q_hz } => {
                if !(q_hz > 0.0) || !q_hz.is_finite() {
                    return Err(invalid("freq_dist", format!("q must be positive, got {q_hz}")));
                }
            }
        }
        Ok(())
    }

    /// Slowest frequency in the support; sets time-average window lengths.
    pub fn low_hz(&self) -> f64 {
        match *self {
            FrequencyDistribution::Uniform { low_hz, .. } => low_hz,
            FrequencyDistribution::PointMass { q_hz } => q_hz,
        }
    }

    /// Fastest frequency in the support; sets time-average sampling rates.
    pub fn high_hz(&self) -> f64 {
        match *self {
            FrequencyDistribution::Uniform { high_hz, .. } => high_hz,
            FrequencyDistribution::PointMass { q_hz } => q_hz,
        }
    }

    /// `E[f(Q)]`. `cycles_hint` estimates how many oscillations `f` makes
    /// across the support so the panel layout can track them.
    pub fn expect(
        &self,
        f: impl Fn(f64) -> f64,
        cycles_hint: f64,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        match *self {
            FrequencyDistribution::PointMass { q_hz } => Ok(f(q_hz)),
            FrequencyDistribution::Uniform { low_hz, high_hz } => {
                let width = high_hz - low_hz;
                let density = 1.0 / width;
                let g = |q: f64| f(q) * density;
                if cycles_hint > 5.0 {
                    let panels = (cycles_hint.ceil() as usize).min(400);
                    let breaks: Vec<f64> = (1..panels)
                        .map(|k| low_hz + width * k as f64 / panels as f64)
                        .collect();
                    Ok(integrate_split(g, low_hz, high_hz, &breaks, spec)?.value)
                } else {
                    Ok(integrate(g, low_hz, high_hz, spec)?.value)
                }
            }
        }
    }

    /// Closed form of `E[cos(2 pi Q x)]`.
    pub fn mean_cos(&self, x: f64) -> f64 {
        match *self {
            FrequencyDistribution::PointMass { q_hz } => {
                (2.0 * std::f64::consts::PI * q_hz * x).cos()
            }
            FrequencyDistribution::Uniform { low_hz, high_hz } => {
                let mid = 0.5 * (low_hz + high_hz);
                let width = high_hz - low_hz;
                (2.0 * std::f64::consts::PI * mid * x).cos()
                    * sin_ratio(std::f64::consts::PI * width * x)
            }
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            FrequencyDistribution::PointMass { q_hz } => q_hz,
            FrequencyDistribution::Uniform { low_hz, high_hz } => rng.gen_range(low_hz..high_hz),
        }
    }
}

impl WobblingModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            WobblingModel::None => Ok(()),
            WobblingModel::Wiener { scale_per_s } => {
                if !(*scale_per_s > 0.0) || !scale_per_s.is_finite() {
                    return Err(invalid("wiener scale", "must be finite and positive"));
                }
                Ok(())
            }
            WobblingModel::Sinusoidal {
                theta_max_rad,
                freq_dist,
            } => {
                if !(*theta_max_rad > 0.0) || !theta_max_rad.is_finite() {
                    return Err(invalid("theta_max_rad", "must be finite and positive"));
                }
                freq_dist.validate()
            }
        }
    }

    /// Whether increments theta(t + dt) - theta(t) depend on dt only.
    pub fn has_stationary_increments(&self) -> bool {
        !matches!(self, WobblingModel::Sinusoidal { .. })
    }
}

/// `sin(2 pi q (t + dt)) - sin(2 pi q t)`, the pitch swing seen by a path
/// between the two observation instants.
#[inline]
fn sin_delta(q: f64, t: f64, dt: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    (two_pi * q * (t + dt)).sin() - (two_pi * q * t).sin()
}

/// Characteristic function of the pitch increment,
/// `E[exp(j w (theta(t+dt) - theta(t)))]`. Real for all three models since
/// the increment laws are symmetric.
///
/// The Wiener branch uses |dt| so the resulting ACFs are even in lag.
pub fn increment_cf(
    model: &WobblingModel,
    omega: f64,
    t: f64,
    dt: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    match model {
        WobblingModel::None => Ok(1.0),
        WobblingModel::Wiener { scale_per_s } => {
            Ok((-0.5 * omega * omega * scale_per_s * dt.abs()).exp())
        }
        WobblingModel::Sinusoidal {
            theta_max_rad,
            freq_dist,
        } => {
            let theta_m = *theta_max_rad;
            let cycles = q_oscillation_hint(freq_dist, t, dt);
            freq_dist.expect(
                |q| sin_ratio(omega * theta_m * sin_delta(q, t, dt)),
                cycles,
                spec,
            )
        }
    }
}

fn q_oscillation_hint(freq_dist: &FrequencyDistribution, t: f64, dt: f64) -> f64 {
    match freq_dist {
        FrequencyDistribution::PointMass { .. } => 0.0,
        FrequencyDistribution::Uniform { low_hz, high_hz } => {
            (high_hz - low_hz) * t.abs().max((t + dt).abs())
        }
    }
}

/// Stationary-increments wobble kernel
/// `G_i(dt) = E[|alpha_i|^2 exp(-j (2 pi/lambda) y_D cos(w_i) theta(dt))]`:
/// the LoS branch is `2 N K P_a1 exp(-(2 pi^2/lambda^2) y_D^2 cos^2(w0) b dt)`
/// and the NLoS branch integrates the same factor against the Laplacian
/// angular profile. Only `None` and `Wiener` wobbling qualify.
///
/// Evaluated with |dt|; real and positive.
pub fn g_si(
    i: usize,
    dt: f64,
    scenario: &Scenario,
    model: &WobblingModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !model.has_stationary_increments() {
        return Err(ChannelError::WrongModel(
            "g_si needs a stationary-increments wobble model (none or wiener)".into(),
        ));
    }
    let powers = scenario.mpc_mean_powers();
    let at_zero = if i == 0 { 2.0 * powers.los } else { 2.0 * powers.nlos };
    let scale = match model {
        WobblingModel::None => return Ok(at_zero),
        WobblingModel::Wiener { scale_per_s } => *scale_per_s,
        WobblingModel::Sinusoidal { .. } => unreachable!(),
    };
    let dt = dt.abs();
    if dt == 0.0 {
        return Ok(at_zero);
    }
    if i == 0 {
        let gain = scenario.doppler_gain(scenario.aod_los_rad);
        return Ok(at_zero * (-0.5 * gain * gain * scale * dt).exp());
    }
    let beta = scenario.laplacian_beta;
    let w0 = scenario.aod_los_rad;
    let f = |w: f64| {
        let gain = scenario.doppler_gain(w);
        (-(w - w0).abs() / beta).exp() / (std::f64::consts::PI * beta)
            * (-0.5 * gain * gain * scale * dt).exp()
    };
    Ok(integrate_split(f, 0.0, std::f64::consts::FRAC_PI_2, &[w0], spec)?.value)
}

/// Non-stationary-increments wobble kernel
/// `G_i(t, dt) = E[|alpha_i|^2 exp(-j (2 pi/lambda) y_D cos(w_i)
/// (theta(t+dt) - theta(t)))]` for the sinusoidal pitch model: a sinc of the
/// pitch swing averaged over the frequency law (and, for NLoS paths, over
/// the Laplacian angular profile). Identical for every NLoS index by
/// construction.
pub fn g_nonsi(
    i: usize,
    t: f64,
    dt: f64,
    scenario: &Scenario,
    model: &WobblingModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (theta_m, freq_dist) = match model {
        WobblingModel::Sinusoidal {
            theta_max_rad,
            freq_dist,
        } => (*theta_max_rad, freq_dist),
        _ => {
            return Err(ChannelError::WrongModel(
                "g_nonsi needs the sinusoidal wobble model".into(),
            ))
        }
    };
    let powers = scenario.mpc_mean_powers();
    let at_zero = if i == 0 { 2.0 * powers.los } else { 2.0 * powers.nlos };
    if dt == 0.0 {
        return Ok(at_zero);
    }
    let cycles = q_oscillation_hint(freq_dist, t, dt);
    if i == 0 {
        let gain = scenario.doppler_gain(scenario.aod_los_rad);
        let cf = freq_dist.expect(
            |q| sin_ratio(gain * theta_m * sin_delta(q, t, dt)),
            cycles,
            spec,
        )?;
        return Ok(at_zero * cf);
    }
    let beta = scenario.laplacian_beta;
    let w0 = scenario.aod_los_rad;
    let f = |w: f64| -> Result<f64> {
        let gain = scenario.doppler_gain(w);
        let cf = freq_dist.expect(
            |q| sin_ratio(gain * theta_m * sin_delta(q, t, dt)),
            cycles,
            spec,
        )?;
        Ok((-(w - w0).abs() / beta).exp() / (std::f64::consts::PI * beta) * cf)
    };
    // Inner quadrature failures surface through a captured slot; the outer
    // integrand itself must be infallible.
    let inner_error = std::cell::RefCell::new(None);
    let value = integrate_split(
        |w| match f(w) {
            Ok(v) => v,
            Err(e) => {
                *inner_error.borrow_mut() = Some(e);
                0.0
            }
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        &[w0],
        spec,
    )?;
    if let Some(e) = inner_error.into_inner() {
        return Err(e);
    }
    Ok(value.value)
}

/// Dispatches to the wobble kernel matching the model family:
/// the constant mean powers for `None`, `g_si` for `Wiener`, and
/// `g_nonsi(t, .)` for `Sinusoidal`.
pub fn wobble_kernel(
    i: usize,
    t: f64,
    dt: f64,
    scenario: &Scenario,
    model: &WobblingModel,
    spec: &QuadratureSpec,
) -> Result<f64> {
    match model {
        WobblingModel::None | WobblingModel::Wiener { .. } => g_si(i, dt, scenario, model, spec),
        WobblingModel::Sinusoidal { .. } => g_nonsi(i, t, dt, scenario, model, spec),
    }
}

/// Draws one pitch path on `time_grid` (strictly increasing, starting at 0).
pub fn sample_path(
    model: &WobblingModel,
    time_grid: &[f64],
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    if time_grid.is_empty() {
        return Err(invalid("time_grid", "empty grid"));
    }
    if time_grid[0] != 0.0 {
        return Err(invalid("time_grid", "must start at t = 0"));
    }
    if time_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("time_grid", "must be strictly increasing"));
    }
    match model {
        WobblingModel::None => Ok(vec![0.0; time_grid.len()]),
        WobblingModel::Wiener { scale_per_s } => {
            let mut path = Vec::with_capacity(time_grid.len());
            let mut theta = 0.0;
            path.push(theta);
            for w in time_grid.windows(2) {
                let sd = (scale_per_s * (w[1] - w[0])).sqrt();
                theta += Normal::new(0.0, sd).expect("positive step").sample(rng);
                path.push(theta);
            }
            Ok(path)
        }
        WobblingModel::Sinusoidal {
            theta_max_rad,
            freq_dist,
        } => {
            let amplitude = rng.gen_range(-theta_max_rad..*theta_max_rad);
            let q = freq_dist.sample(rng);
            Ok(time_grid
                .iter()
                .map(|&t| amplitude * (2.0 * std::f64::consts::PI * q * t).sin())
                .collect())
        }
    }
}

/// Draws `(theta(t), theta(t + dt))` jointly, the minimal state the Monte
/// Carlo point estimators need.
pub fn sample_pitch_pair(
    model: &WobblingModel,
    t: f64,
    dt: f64,
    rng: &mut impl Rng,
) -> (f64, f64) {
    match model {
        WobblingModel::None => (0.0, 0.0),
        WobblingModel::Wiener { scale_per_s } => {
            let theta_t = if t > 0.0 {
                Normal::new(0.0, (scale_per_s * t).sqrt())
                    .expect("positive variance")
                    .sample(rng)
            } else {
                0.0
            };
            let inc = if dt != 0.0 {
                Normal::new(0.0, (scale_per_s * dt.abs()).sqrt())
                    .expect("positive variance")
                    .sample(rng)
            } else {
                0.0
            };
            (theta_t, theta_t + inc)
        }
        WobblingModel::Sinusoidal {
            theta_max_rad,
            freq_dist,
        } => {
            let amplitude = rng.gen_range(-theta_max_rad..*theta_max_rad);
            let q = freq_dist.sample(rng);
            let two_pi = 2.0 * std::f64::consts::PI;
            (
                amplitude * (two_pi * q * t).sin(),
                amplitude * (two_pi * q * (t + dt)).sin(),
            )
        }
    }
}
