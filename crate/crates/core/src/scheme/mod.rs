//! Fault-tolerance scheme constants and scale-dependent noise laws.
//!
//! A noise law gives the physical error probability `eta^(k)` in a computer
//! large enough to run `k` levels of concatenation. Every law here is
//! nondecreasing in `k`.

mod fit;
mod logprob;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fit::{fit_noise_model, FitResult, FitVariant};
pub use logprob::LogProb;

/// `pi^2 / 16`: error of a resonant pi-pulse per unit inverse photon number.
pub const PI2_OVER_16: f64 = PI * PI / 16.0;

/// Overhead constants of a concatenated fault-tolerance scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FtScheme {
    /// Physical gates in an extended rectangle.
    #[serde(rename = "A")]
    pub a: u64,
    /// Physical gates in a rectangle.
    #[serde(rename = "A_prime")]
    pub a_prime: u64,
    /// Malignant fault pairs; the threshold is `1/B`.
    #[serde(rename = "B")]
    pub b: u64,
    /// Growth factor of the component count per level.
    #[serde(rename = "D")]
    pub d: u64,
    /// Clock cycles per level.
    #[serde(rename = "M")]
    pub m: u64,
}

impl FtScheme {
    pub const PRESETS: &'static [&'static str] = &["aliferis2006"];

    pub fn new(a: u64, a_prime: u64, b: u64, d: u64, m: u64) -> Result<Self> {
        let scheme = FtScheme { a, a_prime, b, d, m };
        scheme.validate()?;
        Ok(scheme)
    }

    /// Concatenated 7-qubit code with the exRec/Rec counts of Aliferis,
    /// Gottesman and Preskill (2006).
    pub fn aliferis2006() -> Self {
        FtScheme { a: 575, a_prime: 291, b: 10_000, d: 291, m: 3 }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "aliferis2006" => Ok(Self::aliferis2006()),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("A", self.a),
            ("A_prime", self.a_prime),
            ("B", self.b),
            ("D", self.d),
            ("M", self.m),
        ] {
            if value == 0 {
                return Err(Error::InvalidSchemeConstant { name, value });
            }
        }
        Ok(())
    }

    /// Scale-independent threshold `1/B`.
    pub fn threshold(&self) -> f64 {
        1.0 / self.b as f64
    }

    /// Exact physical gate count of a level-`k` logical gate, `A (A')^(k-1)`,
    /// as a base-10 logarithm. Level 0 is a single physical gate.
    ///
    /// Reporting only; the photon-budget law uses `A^k`.
    pub fn log10_gate_count(&self, k: u32) -> f64 {
        if k == 0 {
            return 0.0;
        }
        (self.a as f64).log10() + f64::from(k - 1) * (self.a_prime as f64).log10()
    }
}

/// Scale-dependent physical error law `eta^(k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseModel {
    /// `eta0 (1 + c k)`.
    Affine { eta0: f64, c: f64 },
    /// `eta0 D^(beta k)`, with `D` supplied by the scheme at evaluation.
    Exponential { eta0: f64, beta: f64 },
    /// `eta0 f(k)` for a monotone table with `f(0) = 1`.
    Tabulated { eta0: f64, f_values: Vec<f64> },
    /// Fixed total photon budget `n_tot` shared by `L A^k` pi-pulses:
    /// `(pi^2/16) L A^k / n_tot`.
    ShorPhoton {
        #[serde(rename = "L")]
        l: f64,
        n_tot: f64,
        #[serde(rename = "A")]
        a: u64,
    },
}

impl NoiseModel {
    pub fn affine(eta0: f64, c: f64) -> Result<Self> {
        let m = NoiseModel::Affine { eta0, c };
        m.validate()?;
        Ok(m)
    }

    pub fn exponential(eta0: f64, beta: f64) -> Result<Self> {
        let m = NoiseModel::Exponential { eta0, beta };
        m.validate()?;
        Ok(m)
    }

    pub fn tabulated(eta0: f64, f_values: Vec<f64>) -> Result<Self> {
        let m = NoiseModel::Tabulated { eta0, f_values };
        m.validate()?;
        Ok(m)
    }

    pub fn shor_photon(l: f64, n_tot: f64, a: u64) -> Result<Self> {
        let m = NoiseModel::ShorPhoton { l, n_tot, a };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidNoiseModel(msg));
        let check_eta0 = |eta0: f64| {
            if eta0 > 0.0 && eta0 < 1.0 {
                Ok(())
            } else {
                bad(format!("eta0 must lie in (0, 1), got {eta0}"))
            }
        };
        match self {
            NoiseModel::Affine { eta0, c } => {
                check_eta0(*eta0)?;
                if !(c.is_finite() && *c >= 0.0) {
                    return bad(format!("c must be finite and >= 0, got {c}"));
                }
            }
            NoiseModel::Exponential { eta0, beta } => {
                check_eta0(*eta0)?;
                if !(beta.is_finite() && *beta >= 0.0) {
                    return bad(format!("beta must be finite and >= 0, got {beta}"));
                }
            }
            NoiseModel::Tabulated { eta0, f_values } => {
                check_eta0(*eta0)?;
                match f_values.first() {
                    None => return bad("f_values is empty".into()),
                    Some(&f0) if f0 != 1.0 => return bad(format!("f(0) must be 1, got {f0}")),
                    _ => {}
                }
                if f_values.iter().any(|f| !f.is_finite()) {
                    return bad("f_values must be finite".into());
                }
                if let Some(w) = f_values.windows(2).position(|w| w[1] < w[0]) {
                    return bad(format!("f_values decreases between k={w} and k={}", w + 1));
                }
            }
            NoiseModel::ShorPhoton { l, n_tot, a } => {
                if !(l.is_finite() && *l >= 1.0) {
                    return bad(format!("L must be >= 1, got {l}"));
                }
                if !(n_tot.is_finite() && *n_tot > 0.0) {
                    return bad(format!("n_tot must be > 0, got {n_tot}"));
                }
                if *a == 0 {
                    return bad("A must be >= 1".into());
                }
            }
        }
        Ok(())
    }

    /// Unencoded error `eta^(0)`.
    pub fn eta0(&self) -> f64 {
        match self {
            NoiseModel::Affine { eta0, .. }
            | NoiseModel::Exponential { eta0, .. }
            | NoiseModel::Tabulated { eta0, .. } => *eta0,
            NoiseModel::ShorPhoton { l, n_tot, .. } => PI2_OVER_16 * l / n_tot,
        }
    }

    /// Largest level the law is defined at, if bounded.
    pub fn max_level(&self) -> Option<u32> {
        match self {
            NoiseModel::Tabulated { f_values, .. } => Some((f_values.len() - 1) as u32),
            _ => None,
        }
    }

    /// `log10 eta^(k)`. The exponential law takes `D` from `scheme`.
    pub fn eta_at_level(&self, scheme: &FtScheme, k: u32) -> Result<LogProb> {
        let kf = f64::from(k);
        let log10 = match self {
            NoiseModel::Affine { eta0, c } => (eta0 * (1.0 + c * kf)).log10(),
            NoiseModel::Exponential { eta0, beta } => {
                eta0.log10() + beta * kf * (scheme.d as f64).log10()
            }
            NoiseModel::Tabulated { eta0, f_values } => {
                let f = f_values.get(k as usize).ok_or(Error::LevelOutOfRange {
                    k,
                    max: (f_values.len() - 1) as u32,
                })?;
                (eta0 * f).log10()
            }
            NoiseModel::ShorPhoton { l, n_tot, a } => {
                PI2_OVER_16.log10() + (l.log10() - n_tot.log10()) + kf * (*a as f64).log10()
            }
        };
        Ok(LogProb::from_log10(log10))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn make_scheme_examples() {
        assert_eq!(FtScheme::new(575, 291, 10_000, 291, 3).unwrap(), FtScheme::aliferis2006());
        assert!(FtScheme::new(1, 1, 1, 1, 1).is_ok());
        assert_eq!(
            FtScheme::new(575, 0, 10_000, 291, 3),
            Err(Error::InvalidSchemeConstant { name: "A_prime", value: 0 })
        );
        assert_eq!(FtScheme::preset("aliferis2006").unwrap().b, 10_000);
        assert!(matches!(FtScheme::preset("steane"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn scheme_json_names() {
        let s = serde_json::to_string(&FtScheme::aliferis2006()).unwrap();
        assert_eq!(s, r#"{"A":575,"A_prime":291,"B":10000,"D":291,"M":3}"#);
        let neg: std::result::Result<FtScheme, _> =
            serde_json::from_str(r#"{"A":-1,"A_prime":291,"B":10000,"D":291,"M":3}"#);
        assert!(neg.is_err());
    }

    #[test]
    fn exact_gate_count() {
        let s = FtScheme::aliferis2006();
        assert_eq!(s.log10_gate_count(0), 0.0);
        assert_relative_eq!(10f64.powf(s.log10_gate_count(2)), 575.0 * 291.0, max_relative = 1e-12);
    }

    #[test]
    fn eta_examples() {
        let s = FtScheme::aliferis2006();
        let m = NoiseModel::affine(5e-6, 0.0).unwrap();
        assert_relative_eq!(m.eta_at_level(&s, 7).unwrap().log10(), -5.301029995663981, epsilon = 1e-12);
        let m = NoiseModel::affine(5e-6, 1.0).unwrap();
        assert_relative_eq!(m.eta_at_level(&s, 3).unwrap().log10(), (2e-5f64).log10(), epsilon = 1e-12);
        let m = NoiseModel::shor_photon(1e6, 1e12, 575).unwrap();
        // log10(pi^2/16 * 1e-6)
        assert_relative_eq!(m.eta_at_level(&s, 0).unwrap().log10(), PI2_OVER_16.log10() - 6.0, epsilon = 1e-12);
    }

    #[test]
    fn tabulated_range_and_monotonicity() {
        let s = FtScheme::aliferis2006();
        let m = NoiseModel::tabulated(1e-5, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m.eta_at_level(&s, 3), Err(Error::LevelOutOfRange { k: 3, max: 2 }));
        assert!(NoiseModel::tabulated(1e-5, vec![1.0, 3.0, 2.0]).is_err());
        assert!(NoiseModel::tabulated(1e-5, vec![2.0, 3.0]).is_err());
        assert!(NoiseModel::tabulated(1e-5, vec![]).is_err());
    }

    #[test]
    fn parameter_domains() {
        assert!(NoiseModel::affine(0.0, 1.0).is_err());
        assert!(NoiseModel::affine(1.0, 1.0).is_err());
        assert!(NoiseModel::affine(1e-3, -0.1).is_err());
        assert!(NoiseModel::exponential(1e-3, -1.0).is_err());
        assert!(NoiseModel::exponential(1e-3, f64::NAN).is_err());
        assert!(NoiseModel::shor_photon(0.5, 1e6, 575).is_err());
        // eta0 >= 1 is allowed for the photon law; it is a bound, not a probability
        assert!(NoiseModel::shor_photon(1.0, 0.1, 575).is_ok());
    }

    #[test]
    fn noise_model_json() {
        let m = NoiseModel::affine(5e-6, 1.0).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"variant":"affine","eta0":5e-6,"c":1.0}"#);
        let m = NoiseModel::shor_photon(1e6, 1e12, 575).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"variant":"shor_photon","L":1000000.0,"n_tot":1000000000000.0,"A":575}"#);
        let back: NoiseModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let unknown: std::result::Result<NoiseModel, _> =
            serde_json::from_str(r#"{"variant":"affine","eta0":1e-5,"c":1,"beta":2}"#);
        assert!(unknown.is_err());
    }
}
