//! Analytic channel metrics: the channel ACF in the time-delay and
//! time-frequency domains, the power delay profile, delay spreads, and the
//! coherence time / coherence bandwidth searches, including the WSS,
//! WSS-with-stationary-increments, and pure-LoS specializations.

use num_complex::Complex64;

use crate::curve::{
    Axis, CoherenceResult, CoherenceValue, CurveAtom, CurveMeta, CurvePoint, MetricCurve,
};
use crate::error::{invalid, ChannelError, Result};
use crate::impairments::{ImpairmentSet, MultiplicativeModel};
use crate::numerics::{
    first_crossing, integrate_complex, integrate_exp_tail, Crossing, QuadratureSpec, SearchSpec,
};
use crate::scenario::{Scenario, ThresholdSpec};
use crate::wobbling::{increment_cf, wobble_kernel, WobblingModel};

/// Default lag search grid for coherence time: 1 ns up to the 10 s ceiling.
pub fn coherence_time_search() -> SearchSpec {
    SearchSpec::new(1e-9, 10.0)
}

/// Default offset search grid for coherence bandwidth: 1 Hz up to 1 THz.
pub fn coherence_bandwidth_search() -> SearchSpec {
    SearchSpec::new(1.0, 1e12)
}

/// Channel ACF at one delay: continuous density plus the LoS atom riding at
/// the LoS delay (the atom is the same for every queried `tau`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayAcf {
    pub density: Complex64,
    pub atom_location_s: f64,
    pub atom_weight: Complex64,
}

/// PDP at one delay: continuous density plus the LoS atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayPower {
    pub density: f64,
    pub atom_location_s: f64,
    pub atom_weight: f64,
}

/// Sum of the NLoS delay densities at `tau`.
fn nlos_density_sum(scenario: &Scenario, tau: f64) -> f64 {
    let onset = scenario.uav_ue_delay_s;
    if tau < onset {
        return 0.0;
    }
    scenario
        .rho_per_mpc
        .iter()
        .map(|&rho| rho * (-rho * (tau - onset)).exp())
        .sum()
}

/// Channel ACF `A_c(tau; t, dt)`: for each path, the product of the
/// receiver-side multiplicative ACF at the observation times, the
/// transmitter-side multiplicative ACF at the delay-shifted times, the
/// wobble kernel, and the delay density. Real-valued for every representable
/// model; returned as complex for interface uniformity.
pub fn channel_acf(
    tau: f64,
    t: f64,
    dt: f64,
    scenario: &Scenario,
    wobbling: &WobblingModel,
    impairments: &ImpairmentSet,
    quad: &QuadratureSpec,
) -> Result<DelayAcf> {
    if tau < 0.0 {
        return Err(invalid("tau", "delay must be non-negative"));
    }
    scenario.validate()?;
    wobbling.validate()?;
    impairments.validate()?;
    let chi_r = impairments.chi_r.acf(t, dt);
    let tau0 = scenario.uav_ue_delay_s;

    let g_nlos = wobble_kernel(1, t, dt, scenario, wobbling, quad)?;
    let density =
        chi_r * impairments.chi_t.acf(t - tau, dt) * g_nlos * nlos_density_sum(scenario, tau);

    let g_los = wobble_kernel(0, t, dt, scenario, wobbling, quad)?;
    let atom_weight = chi_r * impairments.chi_t.acf(t - tau0, dt) * g_los;

    Ok(DelayAcf {
        density: Complex64::new(density, 0.0),
        atom_location_s: tau0,
        atom_weight: Complex64::new(atom_weight, 0.0),
    })
}

/// Power delay profile `P_c(tau; t)`: the per-path normalization constant
/// times the instantaneous multiplicative powers times the delay density.
/// Wobbling plays no role here, so it is not a parameter.
///
/// The zero-lag channel ACF equals exactly twice this profile; the factor
/// is the bookkeeping convention tying the normalization constant to the
/// ensemble mean power (see [`Scenario::mpc_mean_powers`]).
pub fn pdp(
    tau: f64,
    t: f64,
    scenario: &Scenario,
    impairments: &ImpairmentSet,
) -> Result<DelayPower> {
    if tau < 0.0 {
        return Err(invalid("tau", "delay must be non-negative"));
    }
    scenario.validate()?;
    impairments.validate()?;
    let powers = scenario.mpc_mean_powers();
    let p_chi_r = impairments.chi_r.power(t);
    let tau0 = scenario.uav_ue_delay_s;
    let density =
        powers.nlos * p_chi_r * impairments.chi_t.power(t - tau) * nlos_density_sum(scenario, tau);
    let atom_weight = powers.los * p_chi_r * impairments.chi_t.power(t - tau0);
    Ok(DelayPower {
        density,
        atom_location_s: tau0,
        atom_weight,
    })
}

/// Mean and rms delay spread.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DelaySpreads {
    pub mean_s: f64,
    pub rms_s: f64,
}

/// Delay spreads. With WSS (or ideal) transmitter-side multiplicative
/// distortion the closed forms apply:
/// `mu = tau0 + (1/(N(K+1))) sum 1/rho_i` and
/// `sigma = sqrt((2/(N(K+1))) sum 1/rho_i^2 - mu_excess^2)`.
/// A nonstationary transmitter-side model weighs the delay densities by its
/// instantaneous power at `t - tau` and needs `eval_time_s`.
///
/// `k_factor = +inf` collapses to `(tau0, 0)` exactly.
pub fn delay_spreads(
    scenario: &Scenario,
    impairments: &ImpairmentSet,
    eval_time_s: Option<f64>,
    quad: &QuadratureSpec,
) -> Result<DelaySpreads> {
    scenario.validate()?;
    impairments.validate()?;
    if impairments.chi_t.is_wss() {
        return Ok(delay_spreads_closed_form(scenario));
    }
    let t = eval_time_s.ok_or_else(|| {
        invalid(
            "eval_time_s",
            "nonstationary transmitter distortion needs an evaluation time",
        )
    })?;
    delay_spreads_quadrature(scenario, impairments, t, quad)
}

/// Closed forms of the WSS delay spreads.
pub fn delay_spreads_closed_form(scenario: &Scenario) -> DelaySpreads {
    let tau0 = scenario.uav_ue_delay_s;
    let nk1 = scenario.n_mpc as f64 * (scenario.k_factor + 1.0);
    let s1: f64 = scenario.rho_per_mpc.iter().map(|r| 1.0 / r).sum();
    let s2: f64 = scenario.rho_per_mpc.iter().map(|r| 1.0 / (r * r)).sum();
    let excess = s1 / nk1;
    let var = 2.0 * s2 / nk1 - excess * excess;
    DelaySpreads {
        mean_s: tau0 + excess,
        rms_s: var.max(0.0).sqrt(),
    }
}

/// Generic quadrature route for the delay spreads (any multiplicative
/// transmitter model); the dual of the closed forms above. The common
/// `P_alpha_1 P_chi_R(t)` factor cancels in both ratios and is dropped.
pub fn delay_spreads_quadrature(
    scenario: &Scenario,
    impairments: &ImpairmentSet,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<DelaySpreads> {
    let tau0 = scenario.uav_ue_delay_s;
    let nk = scenario.n_mpc as f64 * scenario.k_factor;
    let chi_t = &impairments.chi_t;

    let los_weight = nk * chi_t.power(t - tau0);
    let mut mass = los_weight;
    let mut first = los_weight * tau0;
    for &rho in &scenario.rho_per_mpc {
        let dens = |tau: f64| rho * (-rho * (tau - tau0)).exp();
        mass += integrate_exp_tail(|tau| chi_t.power(t - tau) * dens(tau), tau0, rho, quad)?.value;
        first +=
            integrate_exp_tail(|tau| tau * chi_t.power(t - tau) * dens(tau), tau0, rho, quad)?
                .value;
    }
    if !(mass > 0.0) {
        return Err(invalid(
            "eval_time_s",
            format!("delay-spread weight vanishes at t = {t}; pick another evaluation time"),
        ));
    }
    let mean = first / mass;
    let mut second_central = los_weight * (tau0 - mean).powi(2);
    for &rho in &scenario.rho_per_mpc {
        let dens = |tau: f64| rho * (-rho * (tau - tau0)).exp();
        second_central += integrate_exp_tail(
            |tau| (tau - mean).powi(2) * chi_t.power(t - tau) * dens(tau),
            tau0,
            rho,
            quad,
        )?
        .value;
    }
    Ok(DelaySpreads {
        mean_s: mean,
        rms_s: (second_central / mass).max(0.0).sqrt(),
    })
}

/// Frequency-flat channel ACF `A_C(t, dt)` (the coherence-time kernel).
/// With WSS impairments this is the product of the squared-exponential
/// multiplicative ACFs and `G_0 + N G_1`; nonstationary multiplicative
/// models integrate the transmitter ACF over each delay law.
pub fn acf_time(
    t: f64,
    dt: f64,
    scenario: &Scenario,
    wobbling: &WobblingModel,
    impairments: &ImpairmentSet,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    scenario.validate()?;
    wobbling.validate()?;
    impairments.validate()?;
    let n = scenario.n_mpc as f64;
    let g_los = wobble_kernel(0, t, dt, scenario, wobbling, quad)?;
    let g_nlos = wobble_kernel(1, t, dt, scenario, wobbling, quad)?;

    if let (Some(gr), Some(gt)) = (
        impairments.chi_r.as_gaussian(),
        impairments.chi_t.as_gaussian(),
    ) {
        let envelope = (-0.5 * (gr.inv_l_sq + gt.inv_l_sq) * dt * dt).exp();
        let value = gr.kappa_sq * gt.kappa_sq * envelope * (g_los + n * g_nlos);
        return Ok(Complex64::new(value, 0.0));
    }

    let tau0 = scenario.uav_ue_delay_s;
    let chi_r = impairments.chi_r.acf(t, dt);
    let chi_t = &impairments.chi_t;
    let mut total = chi_r * g_los * chi_t.acf(t - tau0, dt);
    let nlos_tail_sum = if chi_t.is_wss() {
        // WSS transmitter ACF does not depend on the delay; each delay law
        // integrates to one.
        n * chi_t.acf(0.0, dt)
    } else {
        let mut acc = 0.0;
        for &rho in &scenario.rho_per_mpc {
            acc += integrate_exp_tail(
                |tau| chi_t.acf(t - tau, dt) * rho * (-rho * (tau - tau0)).exp(),
                tau0,
                rho,
                quad,
            )?
            .value;
        }
        acc
    };
    total += chi_r * g_nlos * nlos_tail_sum;
    Ok(Complex64::new(total, 0.0))
}

/// Normalized coherence-time curve `|A_C(t, dt)| / |A_C(t, 0)|`, with the
/// pure-LoS branch taken algebraically when `k_factor` is infinite.
/// Returns the curve closure's value at one lag plus the normalization.
fn normalized_acf_time(
    t: f64,
    dt: f64,
    normalization: f64,
    scenario: &Scenario,
    wobbling: &WobblingModel,
    impairments: &ImpairmentSet,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if scenario.k_factor.is_infinite() {
        return los_normalized_acf_time(t, dt, scenario, wobbling, impairments, quad);
    }
    Ok(acf_time(t, dt, scenario, wobbling, impairments, quad)?.norm() / normalization)
}

/// LoS-only normalized time ACF (the `K -> inf` limit): the multiplicative
/// lag envelopes times the LoS wobble characteristic function.
fn los_normalized_acf_time(
    t: f64,
    dt: f64,
    scenario: &Scenario,
    wobbling: &WobblingModel,
    impairments: &ImpairmentSet,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let gain = scenario.doppler_gain(scenario.aod_los_rad);
    let cf = increment_cf(wobbling, gain, t, dt, quad)?;
    let tau0 = scenario.uav_ue_delay_s;
    let env_r = impairments.chi_r.acf(t, dt);
    let env_t = impairments.chi_t.acf(t - tau0, dt);
    let norm = impairments.chi_r.power(t) * impairments.chi_t.power(t - tau0);
    if !(norm > 0.0) {
        return Err(invalid(
            "eval_time_s",
            format!("multiplicative power vanishes at t = {t}; the normalized ACF is undefined"),
        ));
    }
    Ok((env_r * env_t * cf / norm).abs())
}

/// Coherence time: the first lag at which the normalized magnitude of
/// `A_C(t, .)` falls to `gamma_t`.
pub fn coherence_time(
    t: f64,
    scenario: &Scenario,
    wobbling: &WobblingModel,
    impairments: &ImpairmentSet,
    thresholds: &ThresholdSpec,
    search: &SearchSpec,
    quad: &QuadratureSpec,
) -> Result<CoherenceResult> {
    thresholds.validate()?;
    let normalization = if scenario.k_factor.is_infinite() {
        // The LoS branch normalizes inside the curve itself.
        los_normalized_acf_time(t, 0.0, scenario, wobbling, impairments, quad)?
    } else {
        acf_time(t, 0.0, scenario, wobbling, impairments, quad)?.norm()
    };
    if !(normalization > 0.0) || !normalization.is_finite() {
        return Err(invalid(
            "normalization",
            format!("zero-lag ACF magnitude {normalization} cannot normalize the search"),
        ));
    }
    let error_slot = std::cell::RefCell::new(None);
    let crossing = first_crossing(
        |dt| {
            match normalized_acf_time(t, dt, normalization, scenario, wobbling, impairments, quad)
            {
                Ok(v) => v,
                Err(e) => {
                    *error_slot.borrow_mut() = Some(e);
                    // Poison the scan upward so no spurious crossing is found.
                    f64::INFINITY
                }
            }
        },
        thresholds.gamma_t,
        search,
    )?;
    if let Some(e) = error_slot.into_inner() {
        return Err(e);
    }
    let eval_time_s = effective_eval_time(t, scenario, wobbling, impairments);
    Ok(match crossing {
        Crossing::Finite {
            location,
            resolution,
        } => CoherenceResult {
            value: CoherenceValue::Finite(location),
            threshold: thresholds.gamma_t,
            normalization,
            resolution,
            eval_time_s,
        },
        Crossing::Infinite => CoherenceResult {
            value: CoherenceValue::Infinite,
            threshold: thresholds.gamma_t,
            normalization,
            resolution: 0.0,
            eval_time_s,
        },
    })
}

/// The evaluation time is only meaningful when some model actually depends
/// on it.
fn effective_eval_time(
    t: f64,
    scenario: &Scenario,
    wobbling: &WobblingModel,
    impairments: &ImpairmentSet,
) -> Option<f64> {
    let _ = scenario;
    let stationary = wobbling.has_stationary_increments() && impairments.is_wss();
    if stationary {
        None
    } else {
        Some(t)
    }
}

/// Closed-form coherence time of the pure-LoS channel under WSS
/// multiplicative impairments and Wiener wobbling: the positive root of
/// `exp(-a dt^2 - c dt) = gamma` with `a = (inv_l_R + inv_l_T)/2` and
/// `c = gain^2 b / 2`.
pub fn coherence_time_los_closed_form(
    scenario: &Scenario,
    wiener_scale: f64,
    impairments: &ImpairmentSet,
    gamma_t: f64,
) -> Result<f64> {
    if !(gamma_t > 0.0 && gamma_t < 1.0) {
        return Err(invalid("gamma_t", "must lie strictly inside (0, 1)"));
    }
    let (gr, gt) = match (
        impairments.chi_r.as_gaussian(),
        impairments.chi_t.as_gaussian(),
    ) {
        (Some(r), Some(t)) => (r, t),
        _ => {
            return Err(ChannelError::WrongModel(
                "the LoS closed form needs WSS (or ideal) multiplicative impairments".into(),
            ))
        }
    };
    let inv_l_sum = gr.inv_l_sq + gt.inv_l_sq;
    let gain = scenario.doppler_gain(scenario.aod_los_rad);
    let c = 0.5 * gain * gain * wiener_scale;
    let ln_gamma = gamma_t.ln();
    if inv_l_sum == 0.0 {
        if c == 0.0 {
            return Err(ChannelError::WrongModel(
                "ideal impairments with zero Doppler never cross the threshold".into(),
            ));
        }
        return Ok(-ln_gamma / c);
    }
    Ok(((c * c - 2.0 * inv_l_sum * ln_gamma).sqrt() - c) / inv_l_sum)
}

/// Delay-transformed channel ACF kernel at `dt = 0` (the coherence-bandwidth
/// kernel), with the constant power prefactors dropped: they cancel under
/// normalization. With a WSS transmitter model the kernel is
/// `exp(-j 2 pi df tau0) [N K + sum rho_i / (rho_i + j 2 pi df)]`; the
/// nonstationary form replaces the bracket with `H_0(t) + sum H_i(df; t)`.
pub fn acf_freq(
    df: f64,
    t: Option<f64>,
    scenario: &Scenario,
    impairments: &ImpairmentSet,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    scenario.validate()?;
    impairments.validate()?;
    let tau0 = scenario.uav_ue_delay_s;
    let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * df * tau0);
    match &impairments.chi_t {
        m if m.is_wss() => {
            let nk = scenario.n_mpc as f64 * scenario.k_factor;
            let mut bracket = Complex64::new(nk, 0.0);
            for &rho in &scenario.rho_per_mpc {
                bracket += Complex64::new(rho, 0.0)
                    / Complex64::new(rho, 2.0 * std::f64::consts::PI * df);
            }
            Ok(phase * bracket)
        }
        MultiplicativeModel::SinusoidalNonstationary { freq_dist, .. } => {
            let t = t.ok_or_else(|| {
                invalid(
                    "eval_time_s",
                    "nonstationary transmitter distortion needs an evaluation time",
                )
            })?;
            let nk = scenario.n_mpc as f64 * scenario.k_factor;
            // H_0(t) = N K E_q[sin^2(2 pi q (t - tau0))].
            let h0 = nk * 0.5 * (1.0 - freq_dist.mean_cos(2.0 * (t - tau0)));
            let mut bracket = Complex64::new(h0, 0.0);
            let two_pi = 2.0 * std::f64::consts::PI;
            let elapsed = t - tau0;
            for &rho in &scenario.rho_per_mpc {
                let direct = Complex64::new(rho, 0.0) / Complex64::new(rho, two_pi * df) * 0.5;
                let osc = |q: f64| -> Complex64 {
                    let spin = Complex64::from_polar(1.0, 2.0 * two_pi * q * elapsed);
                    let denom_plus = Complex64::new(rho, two_pi * df + 2.0 * two_pi * q);
                    let denom_minus = Complex64::new(rho, two_pi * df - 2.0 * two_pi * q);
                    (spin / denom_plus + spin.conj() / denom_minus) * (rho / 4.0)
                };
                let correction = match freq_dist {
                    crate::wobbling::FrequencyDistribution::PointMass { q_hz } => osc(*q_hz),
                    crate::wobbling::FrequencyDistribution::Uniform { low_hz, high_hz } => {
                        let width = high_hz - low_hz;
                        integrate_complex(|q| osc(q) / width, *low_hz, *high_hz, quad)?.value
                    }
                };
                bracket += direct - correction;
            }
            Ok(phase * bracket)
        }
        _ => unreachable!("multiplicative models are either WSS or sinusoidal"),
    }
}

/// Coherence bandwidth: the first frequency offset at which the normalized
/// kernel magnitude falls to `gamma_b`.
///
/// With a WSS transmitter model the kernel decays from 1 to `K/(K+1)`, so
/// any `gamma_b <= K/(K+1)` (and any threshold under a pure-LoS channel)
/// yields the infinite sentinel without a search. The result depends on
/// neither the wobbling model nor the WSS impairment parameters.
pub fn coherence_bandwidth(
    t: Option<f64>,
    scenario: &Scenario,
    impairments: &ImpairmentSet,
    thresholds: &ThresholdSpec,
    search: &SearchSpec,
    quad: &QuadratureSpec,
) -> Result<CoherenceResult> {
    thresholds.validate()?;
    scenario.validate()?;
    let gamma_b = thresholds.gamma_b;
    let infinite = |normalization: f64| CoherenceResult {
        value: CoherenceValue::Infinite,
        threshold: gamma_b,
        normalization,
        resolution: 0.0,
        eval_time_s: t,
    };
    if scenario.k_factor.is_infinite() {
        return Ok(infinite(1.0));
    }
    let wss = impairments.chi_t.is_wss();
    let n = scenario.n_mpc as f64;
    if wss {
        let k = scenario.k_factor;
        let normalization = n * (k + 1.0);
        if gamma_b <= k / (k + 1.0) {
            return Ok(infinite(normalization));
        }
        let crossing = first_crossing(
            |df| {
                acf_freq(df, None, scenario, impairments, quad)
                    .map(|v| v.norm() / normalization)
                    .unwrap_or(f64::INFINITY)
            },
            gamma_b,
            search,
        )?;
        return Ok(finish_bandwidth(crossing, gamma_b, normalization, None));
    }
    let eval_t = t.ok_or_else(|| {
        invalid(
            "eval_time_s",
            "nonstationary transmitter distortion needs an evaluation time",
        )
    })?;
    let normalization = acf_freq(0.0, Some(eval_t), scenario, impairments, quad)?.norm();
    if !(normalization > 0.0) {
        return Err(invalid(
            "normalization",
            format!("zero-offset kernel vanishes at t = {eval_t}"),
        ));
    }
    let error_slot = std::cell::RefCell::new(None);
    let crossing = first_crossing(
        |df| match acf_freq(df, Some(eval_t), scenario, impairments, quad) {
            Ok(v) => v.norm() / normalization,
            Err(e) => {
                *error_slot.borrow_mut() = Some(e);
                f64::INFINITY
            }
        },
        gamma_b,
        search,
    )?;
    if let Some(e) = error_slot.into_inner() {
        return Err(e);
    }
    Ok(finish_bandwidth(
        crossing,
        gamma_b,
        normalization,
        Some(eval_t),
    ))
}

fn finish_bandwidth(
    crossing: Crossing,
    gamma_b: f64,
    normalization: f64,
    eval_time_s: Option<f64>,
) -> CoherenceResult {
    match crossing {
        Crossing::Finite {
            location,
            resolution,
        } => CoherenceResult {
            value: CoherenceValue::Finite(location),
            threshold: gamma_b,
            normalization,
            resolution,
            eval_time_s,
        },
        Crossing::Infinite => CoherenceResult {
            value: CoherenceValue::Infinite,
            threshold: gamma_b,
            normalization,
            resolution: 0.0,
            eval_time_s,
        },
    }
}

fn curve_meta(
    scenario: &Scenario,
    wobbling: Option<&WobblingModel>,
    impairments: &ImpairmentSet,
    eval_time_s: Option<f64>,
) -> CurveMeta {
    CurveMeta {
        scenario_digest: scenario.digest(),
        wobbling: wobbling
            .map(|w| crate::digest_json(w))
            .unwrap_or_else(|| "not-applicable".into()),
        impairments: crate::digest_json(impairments),
        eval_time_s,
        params: Default::default(),
    }
}

/// PDP sampled on a delay grid, the LoS spike carried as an atom.
pub fn pdp_curve(
    tau_grid: &[f64],
    t: f64,
    scenario: &Scenario,
    impairments: &ImpairmentSet,
) -> Result<MetricCurve> {
    let mut curve = MetricCurve::new(
        Axis::DelayS,
        curve_meta(scenario, None, impairments, Some(t)),
    );
    let mut atom = None;
    for &tau in tau_grid {
        let v = pdp(tau, t, scenario, impairments)?;
        if tau == v.atom_location_s {
            return Err(invalid(
                "tau_grid",
                "grid point collides with the LoS delay atom; offset the grid",
            ));
        }
        curve
            .samples
            .push(CurvePoint::new(tau, Complex64::new(v.density, 0.0)));
        atom = Some((v.atom_location_s, v.atom_weight));
    }
    if let Some((loc, w)) = atom {
        curve.atoms.push(CurveAtom::new(loc, Complex64::new(w, 0.0)));
    }
    curve.validate()?;
    Ok(curve)
}

/// Normalized time-ACF magnitude on a lag grid.
pub fn acf_time_curve(
    dt_grid: &[f64],
    t: f64,
    scenario: &Scenario,
    wobbling: &WobblingModel,
    impairments: &ImpairmentSet,
    quad: &QuadratureSpec,
) -> Result<MetricCurve> {
    let normalization = if scenario.k_factor.is_infinite() {
        los_normalized_acf_time(t, 0.0, scenario, wobbling, impairments, quad)?
    } else {
        acf_time(t, 0.0, scenario, wobbling, impairments, quad)?.norm()
    };
    let mut curve = MetricCurve::new(
        Axis::TimeLagS,
        curve_meta(scenario, Some(wobbling), impairments, Some(t)),
    );
    curve
        .meta
        .params
        .insert("normalization".into(), format!("{normalization:.9e}"));
    for &dt in dt_grid {
        let v = normalized_acf_time(t, dt, normalization, scenario, wobbling, impairments, quad)?;
        curve.samples.push(CurvePoint::new(dt, Complex64::new(v, 0.0)));
    }
    curve.validate()?;
    Ok(curve)
}

/// Normalized frequency-ACF kernel on an offset grid.
pub fn acf_freq_curve(
    df_grid: &[f64],
    t: Option<f64>,
    scenario: &Scenario,
    impairments: &ImpairmentSet,
    quad: &QuadratureSpec,
) -> Result<MetricCurve> {
    let normalization = acf_freq(0.0, t, scenario, impairments, quad)?.norm();
    if !(normalization > 0.0) {
        return Err(invalid("normalization", "zero-offset kernel vanishes"));
    }
    let mut curve = MetricCurve::new(
        Axis::FreqOffsetHz,
        curve_meta(scenario, None, impairments, t),
    );
    curve
        .meta
        .params
        .insert("normalization".into(), format!("{normalization:.9e}"));
    for &df in df_grid {
        let v = acf_freq(df, t, scenario, impairments, quad)? / normalization;
        curve.samples.push(CurvePoint::new(df, v));
    }
    curve.validate()?;
    Ok(curve)
}
