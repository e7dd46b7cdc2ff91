//! Physical and channel parameters: carrier, geometry, Rician factor,
//! Laplacian angular power profile, per-MPC delay distributions, and the
//! Doppler phase kernel that couples platform pitch to path phase.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::{integrate_exp_tail, QuadratureSpec};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Channel scenario: everything about the propagation environment that is
/// not a wobbling or impairment process.
///
/// The LoS path is indexed as MPC 0; NLoS MPCs are 1..=n_mpc.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    /// Number of NLoS multipath components, N.
    pub n_mpc: usize,
    /// Rician K factor (>= 0; 0 is Rayleigh). May be `+inf` programmatically
    /// for pure-LoS limits; JSON documents must keep it finite.
    pub k_factor: f64,
    /// Carrier frequency, Hz.
    pub carrier_freq_hz: f64,
    /// UAV-UE distance, m.
    pub uav_ue_distance_m: f64,
    /// UAV-UE propagation delay, s. Must equal distance / c.
    pub uav_ue_delay_s: f64,
    /// Angle of departure of the LoS path from the vertical axis, rad,
    /// in [0, pi/2).
    pub aod_los_rad: f64,
    /// Scale of the Laplacian angular power profile (> 0).
    pub laplacian_beta: f64,
    /// Antenna offset from the platform centroid, m.
    pub antenna_offset_m: f64,
    /// Reciprocal mean excess delay of each NLoS MPC, 1/s (one per MPC).
    pub rho_per_mpc: Vec<f64>,
    /// Two-sided AWGN power spectral density N0/2, W/Hz.
    pub awgn_psd_w: f64,
}

impl Scenario {
    /// Builds a scenario, deriving the UAV-UE delay from the distance.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_mpc: usize,
        k_factor: f64,
        carrier_freq_hz: f64,
        uav_ue_distance_m: f64,
        aod_los_rad: f64,
        laplacian_beta: f64,
        antenna_offset_m: f64,
        rho_per_mpc: Vec<f64>,
        awgn_psd_w: f64,
    ) -> Result<Self> {
        let scenario = Self {
            n_mpc,
            k_factor,
            carrier_freq_hz,
            uav_ue_distance_m,
            uav_ue_delay_s: uav_ue_distance_m / SPEED_OF_LIGHT_M_S,
            aod_los_rad,
            laplacian_beta,
            antenna_offset_m,
            rho_per_mpc,
            awgn_psd_w,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_mpc < 1 {
            return Err(invalid("n_mpc", "need at least one NLoS MPC"));
        }
        if self.rho_per_mpc.len() != self.n_mpc {
            return Err(invalid(
                "rho_per_mpc",
                format!("expected {} rates, got {}", self.n_mpc, self.rho_per_mpc.len()),
            ));
        }
        if self.rho_per_mpc.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(invalid("rho_per_mpc", "rates must be finite and positive"));
        }
        if !(self.k_factor >= 0.0) {
            return Err(invalid("k_factor", format!("must be >= 0, got {}", self.k_factor)));
        }
        if !(self.carrier_freq_hz > 0.0) || !self.carrier_freq_hz.is_finite() {
            return Err(invalid(
                "carrier_freq_hz",
                format!("must be finite and positive, got {}", self.carrier_freq_hz),
            ));
        }
        if !(self.uav_ue_distance_m > 0.0) || !self.uav_ue_distance_m.is_finite() {
            return Err(invalid("uav_ue_distance_m", "must be finite and positive"));
        }
        let derived = self.uav_ue_distance_m / SPEED_OF_LIGHT_M_S;
        if (self.uav_ue_delay_s - derived).abs() > 1e-12 * derived {
            return Err(invalid(
                "uav_ue_delay_s",
                format!(
                    "must equal distance/c = {derived:.17e}, got {:.17e}",
                    self.uav_ue_delay_s
                ),
            ));
        }
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&self.aod_los_rad) {
            return Err(invalid("aod_los_rad", "must lie in [0, pi/2)"));
        }
        if !(self.laplacian_beta > 0.0) || !self.laplacian_beta.is_finite() {
            return Err(invalid("laplacian_beta", "must be finite and positive"));
        }
        if !(self.antenna_offset_m >= 0.0) || !self.antenna_offset_m.is_finite() {
            return Err(invalid("antenna_offset_m", "must be finite and non-negative"));
        }
        if !(self.awgn_psd_w > 0.0) || !self.awgn_psd_w.is_finite() {
            return Err(invalid("awgn_psd_w", "must be finite and positive"));
        }
        Ok(())
    }

    /// Carrier wavelength c / f_c, m.
    pub fn wavelength(&self) -> Result<f64> {
        if !(self.carrier_freq_hz > 0.0) || !self.carrier_freq_hz.is_finite() {
            return Err(invalid(
                "carrier_freq_hz",
                format!("must be finite and positive, got {}", self.carrier_freq_hz),
            ));
        }
        Ok(SPEED_OF_LIGHT_M_S / self.carrier_freq_hz)
    }

    /// Per-MPC power normalization constant
    /// `(1/2pi) (2 - exp(-w0/beta) - exp(-(pi/2 - w0)/beta))`
    /// and the LoS constant `N K` times it.
    ///
    /// These are the constants that appear in the closed-form PDP, delay
    /// spreads, and coherence normalizations. Note that the ensemble mean
    /// of `|alpha_i|^2` under the uniform angle-of-departure law is twice
    /// the NLoS constant; the wobble-averaged phasor kernels (`g_si`,
    /// `g_nonsi`) evaluate to that ensemble mean at zero lag, and every
    /// normalized metric pairs the two consistently.
    pub fn mpc_mean_powers(&self) -> MpcMeanPowers {
        let w0 = self.aod_los_rad;
        let beta = self.laplacian_beta;
        let nlos = (2.0 - (-w0 / beta).exp()
            - (-(std::f64::consts::FRAC_PI_2 - w0) / beta).exp())
            / (2.0 * std::f64::consts::PI);
        let los = if self.k_factor == 0.0 {
            0.0
        } else {
            self.n_mpc as f64 * self.k_factor * nlos
        };
        MpcMeanPowers { nlos, los }
    }

    /// Laplacian squared amplitude `(1/2beta) exp(-|w - w0|/beta)` of an
    /// NLoS MPC departing at angle `omega_rad`.
    pub fn mpc_amplitude_sq(&self, omega_rad: f64) -> Result<f64> {
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&omega_rad) {
            return Err(invalid(
                "omega_rad",
                format!("angle of departure must lie in [0, pi/2), got {omega_rad}"),
            ));
        }
        let beta = self.laplacian_beta;
        Ok((-((omega_rad - self.aod_los_rad).abs()) / beta).exp() / (2.0 * beta))
    }

    /// Delay distribution of MPC `i` (0 = LoS atom, >= 1 shifted exponential).
    pub fn delay_distribution(&self, i: usize) -> Result<DelayPdf> {
        if i > self.n_mpc {
            return Err(invalid(
                "mpc index",
                format!("index {i} out of range 0..={}", self.n_mpc),
            ));
        }
        if i == 0 {
            Ok(DelayPdf::Atom {
                location_s: self.uav_ue_delay_s,
            })
        } else {
            Ok(DelayPdf::ShiftedExponential {
                rate_per_s: self.rho_per_mpc[i - 1],
                onset_s: self.uav_ue_delay_s,
            })
        }
    }

    /// Evaluates the delay pdf of MPC `i` at delay `tau_s`. The LoS pdf is
    /// an atom descriptor, never a numeric spike.
    pub fn delay_pdf(&self, i: usize, tau_s: f64) -> Result<DelayPdfValue> {
        if tau_s < 0.0 {
            return Err(invalid("tau_s", "delay must be non-negative"));
        }
        Ok(self.delay_distribution(i)?.evaluate(tau_s))
    }

    /// Doppler phase accumulated by a pitch change of `theta_diff_rad` for a
    /// path departing at `omega_rad`: `(2 pi / lambda) y_D cos(w) dtheta`.
    pub fn doppler_phase(&self, omega_rad: f64, theta_diff_rad: f64) -> f64 {
        self.doppler_gain(omega_rad) * theta_diff_rad
    }

    /// The pitch-to-phase gain `(2 pi / lambda) y_D cos(w)`, rad/rad.
    pub fn doppler_gain(&self, omega_rad: f64) -> f64 {
        let lambda = SPEED_OF_LIGHT_M_S / self.carrier_freq_hz;
        (2.0 * std::f64::consts::PI / lambda) * self.antenna_offset_m * omega_rad.cos()
    }

    /// Stable hex digest of the serialized scenario, for curve metadata.
    pub fn digest(&self) -> String {
        crate::digest_json(self)
    }
}

/// The power normalization constants of the angular model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpcMeanPowers {
    /// Per-NLoS-MPC constant P_alpha_1.
    pub nlos: f64,
    /// LoS constant N K P_alpha_1.
    pub los: f64,
}

/// Delay distribution of one MPC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayPdf {
    /// Deterministic delay (the LoS path): unit-weight atom.
    Atom { location_s: f64 },
    /// Onset-shifted exponential excess delay.
    ShiftedExponential { rate_per_s: f64, onset_s: f64 },
}

/// Pointwise evaluation of a delay pdf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayPdfValue {
    /// The queried distribution is a unit atom at the given location.
    Atom { location_s: f64, weight: f64 },
    /// Continuous density value at the queried delay.
    Density(f64),
}

impl DelayPdf {
    pub fn evaluate(&self, tau_s: f64) -> DelayPdfValue {
        match *self {
            DelayPdf::Atom { location_s } => DelayPdfValue::Atom {
                location_s,
                weight: 1.0,
            },
            DelayPdf::ShiftedExponential { rate_per_s, onset_s } => {
                DelayPdfValue::Density(shifted_exp_density(rate_per_s, onset_s, tau_s))
            }
        }
    }

    /// Continuous density (zero for the atom).
    pub fn density(&self, tau_s: f64) -> f64 {
        match *self {
            DelayPdf::Atom { .. } => 0.0,
            DelayPdf::ShiftedExponential { rate_per_s, onset_s } => {
                shifted_exp_density(rate_per_s, onset_s, tau_s)
            }
        }
    }

    /// Atom component, if any, as (location, weight).
    pub fn atom(&self) -> Option<(f64, f64)> {
        match *self {
            DelayPdf::Atom { location_s } => Some((location_s, 1.0)),
            DelayPdf::ShiftedExponential { .. } => None,
        }
    }

    pub fn mean_s(&self) -> f64 {
        match *self {
            DelayPdf::Atom { location_s } => location_s,
            DelayPdf::ShiftedExponential { rate_per_s, onset_s } => onset_s + 1.0 / rate_per_s,
        }
    }

    /// Fourier transform `E[exp(-j 2 pi df tau)]`.
    pub fn fourier(&self, df_hz: f64) -> Complex64 {
        match *self {
            DelayPdf::Atom { location_s } => {
                Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * df_hz * location_s)
            }
            DelayPdf::ShiftedExponential { rate_per_s, onset_s } => {
                let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * df_hz * onset_s);
                let rho = Complex64::new(rate_per_s, 0.0);
                phase * rho / Complex64::new(rate_per_s, 2.0 * std::f64::consts::PI * df_hz)
            }
        }
    }

    /// Expectation of `g(tau)` against this pdf; continuous parts are
    /// integrated with the exponential-tail rule.
    pub fn expect(&self, g: impl Fn(f64) -> f64, spec: &QuadratureSpec) -> Result<f64> {
        match *self {
            DelayPdf::Atom { location_s } => Ok(g(location_s)),
            DelayPdf::ShiftedExponential { rate_per_s, onset_s } => Ok(integrate_exp_tail(
                |tau| g(tau) * shifted_exp_density(rate_per_s, onset_s, tau),
                onset_s,
                rate_per_s,
                spec,
            )?
            .value),
        }
    }
}

fn shifted_exp_density(rate: f64, onset: f64, tau: f64) -> f64 {
    if tau < onset {
        0.0
    } else {
        rate * (-rate * (tau - onset)).exp()
    }
}

/// Coherence thresholds gamma_T / gamma_B, both strictly inside (0, 1).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub gamma_t: f64,
    pub gamma_b: f64,
}

impl ThresholdSpec {
    pub fn new(gamma_t: f64, gamma_b: f64) -> Result<Self> {
        let spec = Self { gamma_t, gamma_b };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma_t", self.gamma_t), ("gamma_b", self.gamma_b)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(invalid(
                    "threshold",
                    format!("{name} must lie strictly inside (0, 1), got {v}"),
                ));
            }
        }
        Ok(())
    }
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        Self {
            gamma_t: 0.5,
            gamma_b: 0.95,
        }
    }
}

/// Draws the per-MPC excess-delay rates uniformly from `[low, high)` under
/// the given seed. The draw is part of the scenario, so the seed travels
/// with it.
pub fn draw_rho_rates(n: usize, low: f64, high: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(low..high)).collect()
}
