//! Sampled metric curves and coherence results, with the CSV/JSON forms the
//! command-line tools emit.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Independent variable of a metric curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Observation-time lag, seconds.
    TimeLagS,
    /// Frequency offset of the delay-transformed ACF, Hz.
    FreqOffsetHz,
    /// Multipath delay, seconds.
    DelayS,
    /// Spectral frequency, Hz.
    FrequencyHz,
}

/// One curve sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub re: f64,
    pub im: f64,
}

impl CurvePoint {
    pub fn new(x: f64, value: Complex64) -> Self {
        Self {
            x,
            re: value.re,
            im: value.im,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// A Dirac component riding on a curve (LoS delay spike, DC spectral line).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveAtom {
    pub location: f64,
    pub weight_re: f64,
    pub weight_im: f64,
}

impl CurveAtom {
    pub fn new(location: f64, weight: Complex64) -> Self {
        Self {
            location,
            weight_re: weight.re,
            weight_im: weight.im,
        }
    }

    pub fn weight(&self) -> Complex64 {
        Complex64::new(self.weight_re, self.weight_im)
    }
}

/// Provenance of a curve: digests and tags that reproduce the run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub scenario_digest: String,
    pub wobbling: String,
    pub impairments: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_time_s: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

/// Sampled 1-D metric with optional atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCurve {
    pub axis: Axis,
    pub samples: Vec<CurvePoint>,
    pub atoms: Vec<CurveAtom>,
    pub meta: CurveMeta,
}

impl MetricCurve {
    pub fn new(axis: Axis, meta: CurveMeta) -> Self {
        Self {
            axis,
            samples: Vec::new(),
            atoms: Vec::new(),
            meta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.windows(2).any(|w| w[1].x <= w[0].x) {
            return Err(invalid("curve samples", "x must be strictly increasing"));
        }
        for atom in &self.atoms {
            if self.samples.iter().any(|s| s.x == atom.location) {
                return Err(invalid(
                    "curve atoms",
                    format!("atom at {} collides with a sample location", atom.location),
                ));
            }
        }
        Ok(())
    }

    /// CSV rows `x,re,im,abs,is_atom` in scientific notation with nine
    /// significant digits; atom rows carry `is_atom = 1`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,re,im,abs,is_atom\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},0\n",
                sig9(s.x),
                sig9(s.re),
                sig9(s.im),
                sig9(s.value().norm())
            ));
        }
        for a in &self.atoms {
            out.push_str(&format!(
                "{},{},{},{},1\n",
                sig9(a.location),
                sig9(a.weight_re),
                sig9(a.weight_im),
                sig9(a.weight().norm())
            ));
        }
        out
    }
}

/// Nine significant digits, scientific notation.
pub fn sig9(v: f64) -> String {
    format!("{v:.8e}")
}

/// A coherence metric value; the infinite sentinel means the normalized
/// curve never reached the threshold below the configured ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoherenceValue {
    Finite(f64),
    Infinite,
}

impl CoherenceValue {
    pub fn as_finite(&self) -> Option<f64> {
        match self {
            CoherenceValue::Finite(v) => Some(*v),
            CoherenceValue::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, CoherenceValue::Infinite)
    }
}

impl Serialize for CoherenceValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CoherenceValue::Finite(v) => serializer.serialize_f64(*v),
            CoherenceValue::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for CoherenceValue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Ok(CoherenceValue::Finite(v)),
            Raw::Text(s) if s == "inf" => Ok(CoherenceValue::Infinite),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Outcome of a coherence-time or coherence-bandwidth search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherenceResult {
    /// Coherence time (s) or bandwidth (Hz).
    pub value: CoherenceValue,
    /// Threshold the normalized magnitude was compared against.
    pub threshold: f64,
    /// The zero-lag (or zero-offset) magnitude used for normalization.
    pub normalization: f64,
    /// Bracket width when the bisection stopped; 0 for the infinite sentinel.
    pub resolution: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_time_s: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> MetricCurve {
        let mut c = MetricCurve::new(Axis::DelayS, CurveMeta::default());
        c.samples = vec![
            CurvePoint::new(1e-6, Complex64::new(1.5, 0.0)),
            CurvePoint::new(2e-6, Complex64::new(0.5, -0.25)),
        ];
        c.atoms = vec![CurveAtom::new(9e-7, Complex64::new(3.0, 0.0))];
        c
    }

    #[test]
    fn curve_validates_ordering_and_atom_disjointness() {
        let mut c = curve();
        c.validate().unwrap();
        c.atoms[0].location = 1e-6;
        assert!(c.validate().is_err());
        let mut c = curve();
        c.samples.reverse();
        assert!(c.validate().is_err());
    }

    #[test]
    fn csv_has_nine_significant_digits_and_atom_flags() {
        let text = curve().to_csv();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x,re,im,abs,is_atom");
        let first = lines.next().unwrap();
        assert_eq!(first, "1.00000000e-6,1.50000000e0,0.00000000e0,1.50000000e0,0");
        assert!(text.lines().last().unwrap().ends_with(",1"));
    }

    #[test]
    fn coherence_value_serializes_inf_as_string() {
        let r = CoherenceResult {
            value: CoherenceValue::Infinite,
            threshold: 0.95,
            normalization: 1.0,
            resolution: 0.0,
            eval_time_s: None,
        };
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"value\":\"inf\""));
        let back: CoherenceResult = serde_json::from_str(&json).unwrap();
        assert!(back.value.is_infinite());

        let finite = CoherenceResult {
            value: CoherenceValue::Finite(6.43e-4),
            ..r
        };
        let json = serde_json::to_string(&finite).unwrap();
        let back: CoherenceResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back.value.as_finite(), Some(6.43e-4));
    }
}
