use serde::{Deserialize, Serialize};

use super::NoiseModel;
use crate::error::{Error, Result};

/// Which law to fit measured `(k, eta)` samples to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitVariant {
    Affine,
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: NoiseModel,
    /// RMS misfit of `log10 eta` over the samples.
    pub residual: f64,
    pub n_points: usize,
}

/// Least-squares fit of a noise law to measured error rates.
///
/// The affine law is linear in `eta`; the exponential law is linear in
/// `log10 eta` with slope `beta log10 D`, so `d` is needed to recover `beta`.
pub fn fit_noise_model(samples: &[(u32, f64)], variant: FitVariant, d: u64) -> Result<FitResult> {
    if samples.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 samples, got {}", samples.len())));
    }
    if let Some(&(k, eta)) = samples.iter().find(|(_, eta)| !(*eta > 0.0 && *eta < 1.0)) {
        return Err(Error::Fit(format!("eta at k={k} must lie in (0, 1), got {eta}")));
    }
    let ks: Vec<f64> = samples.iter().map(|&(k, _)| f64::from(k)).collect();

    let model = match variant {
        FitVariant::Affine => {
            let ys: Vec<f64> = samples.iter().map(|&(_, eta)| eta).collect();
            let (intercept, slope) = linear_least_squares(&ks, &ys)?;
            if !(intercept > 0.0 && intercept < 1.0) {
                return Err(Error::Fit(format!("fitted eta0 = {intercept} outside (0, 1)")));
            }
            NoiseModel::Affine { eta0: intercept, c: nonnegative(slope / intercept, "c")? }
        }
        FitVariant::Exponential => {
            if d < 2 {
                return Err(Error::Fit(format!("exponential fit needs D >= 2, got {d}")));
            }
            let ys: Vec<f64> = samples.iter().map(|&(_, eta)| eta.log10()).collect();
            let (intercept, slope) = linear_least_squares(&ks, &ys)?;
            let eta0 = 10f64.powf(intercept);
            if !(eta0 > 0.0 && eta0 < 1.0) {
                return Err(Error::Fit(format!("fitted eta0 = {eta0} outside (0, 1)")));
            }
            let beta = nonnegative(slope / (d as f64).log10(), "beta")?;
            NoiseModel::Exponential { eta0, beta }
        }
    };

    let d_scheme = super::FtScheme { a: 1, a_prime: 1, b: 1, d: d.max(1), m: 1 };
    let mut sq = 0.0;
    for &(k, eta) in samples {
        let predicted = model.eta_at_level(&d_scheme, k)?.log10();
        sq += (predicted - eta.log10()).powi(2);
    }
    Ok(FitResult { model, residual: (sq / samples.len() as f64).sqrt(), n_points: samples.len() })
}

fn nonnegative(value: f64, name: &str) -> Result<f64> {
    // rounding on exactly flat data can land a hair below zero
    if value >= 0.0 {
        Ok(value)
    } else if value > -1e-12 {
        Ok(0.0)
    } else {
        Err(Error::Fit(format!("fitted {name} = {value} is negative; the law must grow with k")))
    }
}

/// Returns `(intercept, slope)`.
fn linear_least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate design matrix: all k are equal".into()));
    }
    let slope = sxy / sxx;
    Ok((y_mean - slope * x_mean, slope))
}
