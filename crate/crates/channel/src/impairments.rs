//! Aggregate transceiver distortion-noise models: multiplicative (chi) and
//! additive (eta) slots at both ends of the link, each wide-sense
//! stationary, nonstationary-sinusoidal (multiplicative only), or ideal.
//! Provides ACF evaluation, instantaneous power, and process sampling for
//! the Monte Carlo oracle.
//!
//! A Wiener multiplicative distortion is unrepresentable by construction:
//! its ACF grows without bound and every derived metric would diverge.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, ChannelError, Result};
use crate::wobbling::FrequencyDistribution;

/// Multiplicative distortion process (`chi`); ideal means `chi = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplicativeModel {
    Ideal,
    WssGaussian { kappa_sq_w: f64, length_scale_s: f64 },
    SinusoidalNonstationary {
        p_l_w: f64,
        freq_dist: FrequencyDistribution,
    },
}

/// Additive distortion process (`eta`); ideal means `eta = 0`. The
/// sinusoidal nonstationary family is deliberately not representable here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdditiveModel {
    Ideal,
    WssGaussian { kappa_sq_w: f64, length_scale_s: f64 },
}

/// Squared-exponential ACF parameters `kappa^2 exp(-dt^2 inv_l_sq / 2)`,
/// with the slot's ideal value folded in (`kappa^2 = 1` for an ideal
/// multiplicative slot, `0` for an ideal additive one).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAcf {
    pub kappa_sq: f64,
    pub inv_l_sq: f64,
}

impl GaussianAcf {
    #[inline]
    pub fn eval(&self, dt: f64) -> f64 {
        self.kappa_sq * (-0.5 * dt * dt * self.inv_l_sq).exp()
    }
}

fn validate_wss(kappa_sq: f64, l: f64) -> Result<()> {
    if !(kappa_sq > 0.0) || !kappa_sq.is_finite() {
        return Err(invalid("kappa_sq_w", "must be finite and positive"));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(invalid("length_scale_s", "must be finite and positive"));
    }
    Ok(())
}

impl MultiplicativeModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            MultiplicativeModel::Ideal => Ok(()),
            MultiplicativeModel::WssGaussian {
                kappa_sq_w,
                length_scale_s,
            } => validate_wss(*kappa_sq_w, *length_scale_s),
            MultiplicativeModel::SinusoidalNonstationary { p_l_w, freq_dist } => {
                if !(*p_l_w > 0.0) || !p_l_w.is_finite() {
                    return Err(invalid("p_l_w", "must be finite and positive"));
                }
                freq_dist.validate()
            }
        }
    }

    pub fn is_wss(&self) -> bool {
        !matches!(self, MultiplicativeModel::SinusoidalNonstationary { .. })
    }

    /// ACF `E[chi*(t) chi(t + dt)]`; real for every representable model.
    pub fn acf(&self, t: f64, dt: f64) -> f64 {
        match self {
            MultiplicativeModel::Ideal => 1.0,
            MultiplicativeModel::WssGaussian {
                kappa_sq_w,
                length_scale_s,
            } => kappa_sq_w * (-0.5 * (dt / length_scale_s).powi(2)).exp(),
            MultiplicativeModel::SinusoidalNonstationary { p_l_w, freq_dist } => {
                sinusoidal_acf(*p_l_w, freq_dist, t, dt)
            }
        }
    }

    /// Instantaneous power `E[|chi(t)|^2] = acf(t, 0)`.
    pub fn power(&self, t: f64) -> f64 {
        self.acf(t, 0.0)
    }

    /// Squared-exponential view for closed-form spectra (`None` for the
    /// sinusoidal family).
    pub fn as_gaussian(&self) -> Option<GaussianAcf> {
        match self {
            MultiplicativeModel::Ideal => Some(GaussianAcf {
                kappa_sq: 1.0,
                inv_l_sq: 0.0,
            }),
            MultiplicativeModel::WssGaussian {
                kappa_sq_w,
                length_scale_s,
            } => Some(GaussianAcf {
                kappa_sq: *kappa_sq_w,
                inv_l_sq: 1.0 / (length_scale_s * length_scale_s),
            }),
            MultiplicativeModel::SinusoidalNonstationary { .. } => None,
        }
    }

    /// One process realization on `grid`. The WSS model is sampled as a
    /// zero-mean circular complex Gaussian process whose ACF matches the
    /// model; `mean_offset` shifts the realization for sensitivity studies
    /// (the analytic metrics consume only ACFs, so the offset affects the
    /// Monte Carlo oracle alone).
    pub fn sample_path(
        &self,
        grid: &[f64],
        mean_offset: Complex64,
        rng: &mut impl Rng,
    ) -> Result<Vec<Complex64>> {
        match self {
            MultiplicativeModel::Ideal => {
                Ok(vec![Complex64::new(1.0, 0.0) + mean_offset; grid.len()])
            }
            MultiplicativeModel::WssGaussian {
                kappa_sq_w,
                length_scale_s,
            } => {
                let mut path = gaussian_process_path(*kappa_sq_w, *length_scale_s, grid, rng)?;
                for v in &mut path {
                    *v += mean_offset;
                }
                Ok(path)
            }
            MultiplicativeModel::SinusoidalNonstationary { p_l_w, freq_dist } => {
                Ok(sinusoidal_path(*p_l_w, freq_dist, grid, rng)
                    .into_iter()
                    .map(|v| Complex64::new(v, 0.0) + mean_offset)
                    .collect())
            }
        }
    }

    /// Joint draw of `(chi(t), chi(t + dt))`, enough state for the Monte
    /// Carlo point estimators.
    pub fn sample_pair(&self, t: f64, dt: f64, rng: &mut impl Rng) -> (Complex64, Complex64) {
        match self {
            MultiplicativeModel::Ideal => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
            MultiplicativeModel::WssGaussian {
                kappa_sq_w,
                length_scale_s,
            } => gaussian_pair(*kappa_sq_w, *length_scale_s, dt, rng),
            MultiplicativeModel::SinusoidalNonstationary { p_l_w, freq_dist } => {
                let amplitude = (3.0 * p_l_w).sqrt();
                let l = rng.gen_range(-amplitude..amplitude);
                let q = freq_dist.sample(rng);
                let two_pi = 2.0 * std::f64::consts::PI;
                (
                    Complex64::new(l * (two_pi * q * t).sin(), 0.0),
                    Complex64::new(l * (two_pi * q * (t + dt)).sin(), 0.0),
                )
            }
        }
    }
}

impl AdditiveModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            AdditiveModel::Ideal => Ok(()),
            AdditiveModel::WssGaussian {
                kappa_sq_w,
                length_scale_s,
            } => validate_wss(*kappa_sq_w, *length_scale_s),
        }
    }

    /// ACF `E[eta*(t) eta(t + dt)]`; never depends on `t` for the
    /// representable (WSS-only) additive models.
    pub fn acf(&self, _t: f64, dt: f64) -> f64 {
        match self {
            AdditiveModel::Ideal => 0.0,
            AdditiveModel::WssGaussian {
                kappa_sq_w,
                length_scale_s,
            } => kappa_sq_w * (-0.5 * (dt / length_scale_s).powi(2)).exp(),
        }
    }

    pub fn power(&self, t: f64) -> f64 {
        self.acf(t, 0.0)
    }

    pub fn as_gaussian(&self) -> GaussianAcf {
        match self {
            AdditiveModel::Ideal => GaussianAcf {
                kappa_sq: 0.0,
                inv_l_sq: 0.0,
            },
            AdditiveModel::WssGaussian {
                kappa_sq_w,
                length_scale_s,
            } => GaussianAcf {
                kappa_sq: *kappa_sq_w,
                inv_l_sq: 1.0 / (length_scale_s * length_scale_s),
            },
        }
    }

    pub fn sample_path(&self, grid: &[f64], rng: &mut impl Rng) -> Result<Vec<Complex64>> {
        match self {
            AdditiveModel::Ideal => Ok(vec![Complex64::new(0.0, 0.0); grid.len()]),
            AdditiveModel::WssGaussian {
                kappa_sq_w,
                length_scale_s,
            } => gaussian_process_path(*kappa_sq_w, *length_scale_s, grid, rng),
        }
    }

    pub fn sample_pair(&self, dt: f64, rng: &mut impl Rng) -> (Complex64, Complex64) {
        match self {
            AdditiveModel::Ideal => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
            AdditiveModel::WssGaussian {
                kappa_sq_w,
                length_scale_s,
            } => gaussian_pair(*kappa_sq_w, *length_scale_s, dt, rng),
        }
    }
}

/// `P_L E[sin(2 pi Q t) sin(2 pi Q (t + dt))]` through the product-to-sum
/// identity and the closed cosine mean of the frequency law.
fn sinusoidal_acf(p_l: f64, freq_dist: &FrequencyDistribution, t: f64, dt: f64) -> f64 {
    0.5 * p_l * (freq_dist.mean_cos(dt) - freq_dist.mean_cos(2.0 * t + dt))
}

fn sinusoidal_path(
    p_l: f64,
    freq_dist: &FrequencyDistribution,
    grid: &[f64],
    rng: &mut impl Rng,
) -> Vec<f64> {
    let amplitude = (3.0 * p_l).sqrt();
    let l = rng.gen_range(-amplitude..amplitude);
    let q = freq_dist.sample(rng);
    grid.iter()
        .map(|&t| l * (2.0 * std::f64::consts::PI * q * t).sin())
        .collect()
}

/// Correlated two-point draw of a circular complex Gaussian process with
/// squared-exponential ACF.
fn gaussian_pair(
    kappa_sq: f64,
    length_scale: f64,
    dt: f64,
    rng: &mut impl Rng,
) -> (Complex64, Complex64) {
    let corr = (-0.5 * (dt / length_scale).powi(2)).exp();
    let sigma = (kappa_sq / 2.0).sqrt();
    let draw = |rng: &mut dyn rand::RngCore| {
        Complex64::new(
            sigma * rng.sample::<f64, _>(StandardNormal),
            sigma * rng.sample::<f64, _>(StandardNormal),
        )
    };
    let z1 = draw(rng);
    let residual = (1.0 - corr * corr).max(0.0).sqrt();
    let z2 = z1 * corr + draw(rng) * residual;
    (z1, z2)
}

// Cholesky factors of squared-exponential covariance matrices are cached
// per (kappa^2, length scale, grid); spectral estimation reuses one grid
// across thousands of paths.
type FactorCache = Mutex<HashMap<(u64, u64, u64), Arc<DMatrix<f64>>>>;

fn factor_cache() -> &'static FactorCache {
    static CACHE: OnceLock<FactorCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn grid_key(grid: &[f64]) -> u64 {
    let mut h = DefaultHasher::new();
    for v in grid {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

fn cholesky_factor(kappa_sq: f64, length_scale: f64, grid: &[f64]) -> Result<Arc<DMatrix<f64>>> {
    let key = (kappa_sq.to_bits(), length_scale.to_bits(), grid_key(grid));
    if let Some(f) = factor_cache().lock().unwrap().get(&key) {
        return Ok(f.clone());
    }
    let n = grid.len();
    // Half power per quadrature component; re and im carry kappa^2/2 each.
    let half = kappa_sq / 2.0;
    let mut cov = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let d = (grid[i] - grid[j]) / length_scale;
            let v = half * (-0.5 * d * d).exp();
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    let mut jitter = 1e-12 * kappa_sq;
    let mut attempt = cov.clone();
    for _ in 0..4 {
        if let Some(chol) = attempt.clone().cholesky() {
            let factor = Arc::new(chol.unpack());
            let mut cache = factor_cache().lock().unwrap();
            if cache.len() >= 8 {
                cache.clear();
            }
            cache.insert(key, factor.clone());
            return Ok(factor);
        }
        for i in 0..n {
            attempt[(i, i)] = cov[(i, i)] + jitter;
        }
        jitter *= 100.0;
    }
    Err(ChannelError::NumericFailure {
        context: format!(
            "covariance factorization on {n}-point grid (length scale {length_scale} s); \
             grid may be too dense -- coarsen it or raise the jitter"
        ),
        achieved: jitter,
        requested: 1e-12 * kappa_sq,
    })
}

fn gaussian_process_path(
    kappa_sq: f64,
    length_scale: f64,
    grid: &[f64],
    rng: &mut impl Rng,
) -> Result<Vec<Complex64>> {
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("grid", "must be strictly increasing"));
    }
    let factor = cholesky_factor(kappa_sq, length_scale, grid)?;
    let n = grid.len();
    let re: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let im: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc_re = 0.0;
        let mut acc_im = 0.0;
        for j in 0..=i {
            let l = factor[(i, j)];
            acc_re += l * re[j];
            acc_im += l * im[j];
        }
        out[i] = Complex64::new(acc_re, acc_im);
    }
    Ok(out)
}

/// The four distortion slots of the link. Processes are mutually
/// independent by assumption; additive slots have zero mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpairmentSet {
    pub chi_t: MultiplicativeModel,
    pub chi_r: MultiplicativeModel,
    pub eta_t: AdditiveModel,
    pub eta_r: AdditiveModel,
}

impl ImpairmentSet {
    /// Fully ideal hardware: unit multiplicative, zero additive.
    pub fn ideal() -> Self {
        Self {
            chi_t: MultiplicativeModel::Ideal,
            chi_r: MultiplicativeModel::Ideal,
            eta_t: AdditiveModel::Ideal,
            eta_r: AdditiveModel::Ideal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.chi_t.validate()?;
        self.chi_r.validate()?;
        self.eta_t.validate()?;
        self.eta_r.validate()
    }

    /// Whether every slot is WSS (or ideal), the precondition for the
    /// simplified metric forms.
    pub fn is_wss(&self) -> bool {
        self.chi_t.is_wss() && self.chi_r.is_wss()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

    fn wss(kappa_sq: f64, l: f64) -> MultiplicativeModel {
        MultiplicativeModel::WssGaussian {
            kappa_sq_w: kappa_sq,
            length_scale_s: l,
        }
    }

    fn sinus(p_l: f64) -> MultiplicativeModel {
        MultiplicativeModel::SinusoidalNonstationary {
            p_l_w: p_l,
            freq_dist: FrequencyDistribution::Uniform {
                low_hz: 5.0,
                high_hz: 15.0,
            },
        }
    }

    #[test]
    fn wss_acf_peak_and_length_scale() {
        let m = wss(0.8, 0.05);
        assert_eq!(m.acf(3.0, 0.0), 0.8);
        assert_relative_eq!(m.acf(0.0, 0.05), 0.8 * (-0.5f64).exp(), max_relative = 1e-14);
        // t plays no role for a WSS slot.
        assert_eq!(m.acf(0.0, 0.02), m.acf(17.0, 0.02));
    }

    #[test]
    fn wss_acf_even_and_bounded() {
        let m = wss(1.3, 0.02);
        let peak = m.acf(0.0, 0.0);
        for &dt in &[1e-4, 5e-3, 0.02, 0.1, 1.0] {
            assert_eq!(m.acf(0.0, dt), m.acf(0.0, -dt));
            assert!(m.acf(0.0, dt).abs() <= peak);
        }
    }

    #[test]
    fn sinusoidal_acf_vanishes_at_origin_time() {
        let m = sinus(0.5);
        for &dt in &[0.0, 1e-3, 0.07, 1.3] {
            assert!(m.acf(0.0, dt).abs() < 1e-15, "A(0, {dt}) must vanish");
        }
    }

    #[test]
    fn sinusoidal_acf_product_to_sum_routes_agree() {
        let m = sinus(0.5);
        let dist = FrequencyDistribution::Uniform {
            low_hz: 5.0,
            high_hz: 15.0,
        };
        let spec = crate::numerics::QuadratureSpec::default();
        for &(t, dt) in &[(0.01, 0.003), (0.2, 0.04), (1.3, 0.25)] {
            let closed = m.acf(t, dt);
            let two_pi = 2.0 * std::f64::consts::PI;
            let direct = 0.5
                * dist
                    .expect(
                        |q| (two_pi * q * t).sin() * (two_pi * q * (t + dt)).sin(),
                        (15.0 - 5.0) * (t + dt.abs()),
                        &spec,
                    )
                    .unwrap();
            assert_relative_eq!(closed, direct, max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn power_examples() {
        assert_eq!(wss(0.7, 0.1).power(123.0), 0.7);
        assert_eq!(MultiplicativeModel::Ideal.power(5.0), 1.0);
        assert_eq!(AdditiveModel::Ideal.power(5.0), 0.0);
        // Point-mass frequency at t = 1/(8 q): sin^2(pi/4) = 1/2.
        let q0 = 12.0;
        let m = MultiplicativeModel::SinusoidalNonstationary {
            p_l_w: 0.5,
            freq_dist: FrequencyDistribution::PointMass { q_hz: q0 },
        };
        assert_relative_eq!(m.power(1.0 / (8.0 * q0)), 0.25, max_relative = 1e-12);
        // acf(t, 0) and power(t) are the same code path.
        assert_eq!(m.acf(0.37, 0.0), m.power(0.37));
    }

    #[test]
    fn ideal_multiplicative_samples_to_ones() {
        let grid: Vec<f64> = (0..64).map(|k| k as f64 * 1e-3).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let path = MultiplicativeModel::Ideal
            .sample_path(&grid, Complex64::new(0.0, 0.0), &mut rng)
            .unwrap();
        assert!(path.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn gaussian_pair_recovers_acf_at_length_scale() {
        let kappa_sq = 0.8;
        let l = 0.05;
        let m = wss(kappa_sq, l);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 10_000;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let (a, b) = m.sample_pair(0.0, l, &mut rng);
            let x = a.conj() * b;
            sum += x;
            sum_sq += x.norm_sqr();
        }
        let mean = sum / n as f64;
        let var = (sum_sq - sum.norm_sqr() / n as f64) / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        let expected = kappa_sq * (-0.5f64).exp();
        assert!(
            (mean.re - expected).abs() < 3.0 * se && mean.im.abs() < 3.0 * se,
            "sample ACF {mean} vs {expected} (se {se})"
        );
    }

    #[test]
    fn gaussian_path_recovers_acf_at_length_scale() {
        let kappa_sq = 1.0;
        let l = 0.05;
        let m = wss(kappa_sq, l);
        // Two-point grid at exactly one length scale of separation.
        let grid = [0.0, l];
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 10_000;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_sq = 0.0;
        let mut power_sum = 0.0;
        for _ in 0..n {
            let p = m
                .sample_path(&grid, Complex64::new(0.0, 0.0), &mut rng)
                .unwrap();
            let x = p[0].conj() * p[1];
            sum += x;
            sum_sq += x.norm_sqr();
            power_sum += p[0].norm_sqr();
        }
        let mean = sum / n as f64;
        let var = (sum_sq - sum.norm_sqr() / n as f64) / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        let expected = kappa_sq * (-0.5f64).exp();
        assert!((mean.re - expected).abs() < 3.0 * se, "ACF {mean} vs {expected}");
        let power_se = kappa_sq * (2.0 / n as f64).sqrt();
        assert!((power_sum / n as f64 - kappa_sq).abs() < 3.0 * power_se);
    }

    #[test]
    fn sinusoidal_amplitude_moment_recovered() {
        // L ~ U[-a, a) with a^2/3 = P_L. At t = 1/(4q) a point-mass process
        // reads the raw amplitude back: chi = L sin(pi/2) = L.
        let p_l = 0.5;
        let q = 10.0;
        let m = MultiplicativeModel::SinusoidalNonstationary {
            p_l_w: p_l,
            freq_dist: FrequencyDistribution::PointMass { q_hz: q },
        };
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 100_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            let (a, _) = m.sample_pair(1.0 / (4.0 * q), 0.0, &mut rng);
            let x = a.norm_sqr();
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = (sum_sq - sum * sum / n as f64) / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        assert!(
            (mean - p_l).abs() < 3.0 * se,
            "E[L^2] = {mean} vs P_L = {p_l} (se {se})"
        );

        // The random-frequency variant recovers its own ACF-at-zero power.
        let m = sinus(p_l);
        let t = 0.123;
        let expected = m.acf(t, 0.0);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            let (a, _) = m.sample_pair(t, 0.0, &mut rng);
            let x = a.norm_sqr();
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = (sum_sq - sum * sum / n as f64) / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "power {mean} vs {expected} (se {se})"
        );
    }

    #[test]
    fn additive_samples_have_zero_mean() {
        let m = AdditiveModel::WssGaussian {
            kappa_sq_w: 0.5,
            length_scale_s: 0.01,
        };
        let grid: Vec<f64> = (0..32).map(|k| k as f64 * 5e-3).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 2_000;
        let mut sum = Complex64::new(0.0, 0.0);
        for _ in 0..n {
            let p = m.sample_path(&grid, &mut rng).unwrap();
            for v in p {
                sum += v;
            }
        }
        let count = (n * grid.len()) as f64;
        let mean = sum / count;
        // Samples within a path are correlated; bound with the generous
        // one-path-scale standard error.
        let se = (0.5f64 / n as f64).sqrt();
        assert!(mean.norm() < 3.0 * se, "mean {mean} (se {se})");
    }

    #[test]
    fn impairment_set_serde_shape() {
        let set = ImpairmentSet {
            chi_t: wss(0.5, 0.05),
            chi_r: MultiplicativeModel::Ideal,
            eta_t: AdditiveModel::WssGaussian {
                kappa_sq_w: 1.0,
                length_scale_s: 0.01,
            },
            eta_r: AdditiveModel::Ideal,
        };
        let json = serde_json::to_string(&set).unwrap();
        for key in ["\"chi_t\"", "\"chi_r\"", "\"eta_t\"", "\"eta_r\""] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        let back: ImpairmentSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, set);

        // A sinusoidal additive slot is rejected at the type level.
        let bad = r#"{
            "chi_t": {"kind": "ideal"},
            "chi_r": {"kind": "ideal"},
            "eta_t": {"kind": "sinusoidal_nonstationary", "p_l_w": 0.5,
                      "freq_dist": {"dist": "point_mass", "q_hz": 10.0}},
            "eta_r": {"kind": "ideal"}
        }"#;
        assert!(serde_json::from_str::<ImpairmentSet>(bad).is_err());
    }

    #[test]
    fn dense_grid_factorization_uses_jitter() {
        // 64 nearly-coincident points: the raw kernel matrix is numerically
        // singular and needs the diagonal jitter path.
        let grid: Vec<f64> = (0..64).map(|k| k as f64 * 1e-7).collect();
        let m = wss(1.0, 0.05);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let path = m
            .sample_path(&grid, Complex64::new(0.0, 0.0), &mut rng)
            .unwrap();
        assert_eq!(path.len(), 64);
        // Nearly coincident points must produce nearly identical values.
        let spread: f64 = path
            .windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .fold(0.0, f64::max);
        assert!(spread < 1e-2, "spread {spread}");
    }
}
