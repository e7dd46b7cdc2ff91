//! Impairments-aware air-to-ground wireless channel model.
//!
//! Analytic evaluation of the channel autocorrelation function, power delay
//! profile, delay spreads, coherence time, coherence bandwidth, and the
//! power spectral density of the distortion-plus-noise process under two
//! UAV-wobbling processes (Wiener and sinusoidal pitch-angle models) and
//! aggregate transceiver hardware-impairment models (multiplicative and
//! additive distortion noise, stationary or nonstationary), cross-validated
//! by a built-in Monte Carlo oracle.

pub mod curve;
pub mod error;
pub mod numerics;
pub mod impairments;
pub mod metrics;
pub mod scenario;
pub mod wobbling;

pub use error::{ChannelError, Result};
pub use scenario::{Scenario, ThresholdSpec};

/// Short stable hex digest (sha-256 prefix) of a value's JSON form, used to
/// tie emitted curves and estimates back to their exact inputs.
pub fn digest_json<T: serde::Serialize>(value: &T) -> String {
    use sha2::{Digest, Sha256};
    let json = serde_json::to_string(value).expect("serializable value");
    let hash = Sha256::digest(json.as_bytes());
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}
