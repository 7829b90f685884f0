//! Logical error curves and the optimal concatenation level.
//!
//! For `k` levels of concatenation the logical error is bounded by
//! `p^(k) = (1/B) (B eta^(k))^(2^k)`. When `eta^(k)` grows with `k` the curve
//! turns around and there is a best level `k_max`. Everything is evaluated in
//! log10 space: at `k = 17` the bound is already around `1e-6000`.

use std::f64::consts::LN_2;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::{FtScheme, LogProb, NoiseModel};

/// Default scan bound. `2^64`-fold squaring is far past any physical regime.
pub const DEFAULT_K_CAP: u32 = 64;
/// Keeps `2^k log10(...)` finite in f64.
pub const MAX_K_CAP: u32 = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptStatus {
    OptimumFound,
    /// `p^(k)` is still strictly decreasing at the scan bound.
    UnboundedImprovement,
    /// Encoding never beats the bare physical gate.
    NoEncodingBest,
}

impl OptStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            OptStatus::OptimumFound => "optimum-found",
            OptStatus::UnboundedImprovement => "unbounded-improvement",
            OptStatus::NoEncodingBest => "no-encoding-best",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: u32,
    pub log10_p: LogProb,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub k_max: u32,
    pub log10_p_min: LogProb,
    pub status: OptStatus,
    /// Last level scanned. Smaller than the requested cap when a tabulated law
    /// ends earlier.
    pub k_cap: u32,
    pub curve: Vec<CurvePoint>,
}

impl OptResult {
    /// Writes the curve as CSV with header `k,log10_p`.
    pub fn write_curve_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,log10_p")?;
        for point in &self.curve {
            writeln!(out, "{},{}", point.k, point.log10_p.log10())?;
        }
        Ok(())
    }
}

/// `log10 p^(k)` given `log10 B` and `log10 eta^(k)`.
///
/// `B` is real here so that the crosstalk mapping (`B -> 2e^(2+1/e) B^2`) can
/// reuse it. At `k = 0` this returns `eta^(0)` untouched.
pub fn logical_error_from_eta(log10_b: f64, eta_k: LogProb, k: u32) -> LogProb {
    if k == 0 {
        return eta_k;
    }
    let value = -log10_b + 2f64.powi(k as i32) * (log10_b + eta_k.log10());
    LogProb::from_log10(value.min(f64::MAX))
}

/// `log10 p^(k)` for a scheme and a scale-dependent noise law.
pub fn logical_error_log10(scheme: &FtScheme, model: &NoiseModel, k: u32) -> Result<LogProb> {
    let eta_k = model.eta_at_level(scheme, k)?;
    Ok(logical_error_from_eta((scheme.b as f64).log10(), eta_k, k))
}

/// Exhaustive scan of `k = 0..=k_cap`; `k_max` is the smallest global argmin.
///
/// Tabulated laws are scanned only as far as their table reaches.
pub fn find_kmax(scheme: &FtScheme, model: &NoiseModel, k_cap: u32) -> Result<OptResult> {
    model.validate()?;
    let k_cap = match model.max_level() {
        Some(max) => k_cap.min(max.max(1)),
        None => k_cap,
    };
    if model.max_level() == Some(0) {
        return Err(Error::InvalidArgument("tabulated law needs at least two levels".into()));
    }
    scan_levels(k_cap, |k| logical_error_log10(scheme, model, k))
}

/// Scan any level-indexed logical error law.
pub fn scan_levels<F>(k_cap: u32, mut p_at: F) -> Result<OptResult>
where
    F: FnMut(u32) -> Result<LogProb>,
{
    if !(1..=MAX_K_CAP).contains(&k_cap) {
        return Err(Error::InvalidArgument(format!("k_cap must lie in 1..={MAX_K_CAP}, got {k_cap}")));
    }
    let curve = (0..=k_cap)
        .map(|k| Ok(CurvePoint { k, log10_p: p_at(k)? }))
        .collect::<Result<Vec<_>>>()?;

    // min_by_key keeps the first of equal minima, so ties go to the smaller k
    let best = curve.iter().min_by_key(|p| p.log10_p).expect("curve is nonempty");
    let status = if best.k == 0 {
        OptStatus::NoEncodingBest
    } else if best.k == k_cap {
        OptStatus::UnboundedImprovement
    } else {
        OptStatus::OptimumFound
    };
    Ok(OptResult { k_max: best.k, log10_p_min: best.log10_p, status, k_cap, curve })
}

/// Largest affine slope for which one level of encoding still helps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalSlope {
    pub c_star: f64,
    /// False when `B eta0 >= 1`: no `c >= 0` makes encoding useful.
    pub helps: bool,
}

/// `c* = 1/sqrt(B eta0) - 1`; for the affine law, `p^(1) < p^(0)` iff `c < c*`.
pub fn affine_usefulness_threshold(b: u64, eta0: f64) -> Result<CriticalSlope> {
    if !(eta0 > 0.0 && eta0.is_finite()) || b == 0 {
        return Err(Error::InvalidArgument(format!("need B >= 1 and eta0 > 0, got B={b}, eta0={eta0}")));
    }
    let b_eta = b as f64 * eta0;
    if b_eta >= 1.0 {
        return Ok(CriticalSlope { c_star: 0.0, helps: false });
    }
    Ok(CriticalSlope { c_star: 1.0 / b_eta.sqrt() - 1.0, helps: true })
}

/// Upper bound on `k_max` for a tabulated law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum KmaxBound {
    Finite(f64),
    /// The table never reaches `1/(B eta0)`: no turnaround within it.
    Unbounded,
}

/// `1 + f^-1(1/(B eta0))` for a tabulated law `eta^(k) = eta0 f(k)`.
///
/// `f^-1` is piecewise linear in `ln f` between integer levels, which is exact
/// for exponential tables and for any target that falls on a table point.
pub fn generic_kmax_bound(scheme: &FtScheme, model: &NoiseModel) -> Result<KmaxBound> {
    let NoiseModel::Tabulated { eta0, f_values } = model else {
        return Err(Error::InvalidArgument("generic_kmax_bound needs a tabulated law".into()));
    };
    model.validate()?;
    let target = 1.0 / (scheme.b as f64 * eta0);
    if target < 1.0 {
        return Ok(KmaxBound::Finite(1.0));
    }
    let Some(j) = f_values.iter().position(|&f| f >= target) else {
        return Ok(KmaxBound::Unbounded);
    };
    if j == 0 {
        return Ok(KmaxBound::Finite(1.0));
    }
    let (lo, hi) = (f_values[j - 1].ln(), f_values[j].ln());
    let t = (target.ln() - lo) / (hi - lo);
    Ok(KmaxBound::Finite(1.0 + (j - 1) as f64 + t))
}

/// Closed-form levels and error bounds for the exponential law
/// `eta^(k) = eta0 D^(beta k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// Stationary point of the continuous curve.
    pub k_st: f64,
    /// Level where `p^(k) = p^(k-1)`; the integer optimum lies in `[k_tilde - 1, k_tilde]`.
    pub k_tilde: f64,
    /// `p^(k_st)`, a lower bound on `p^(k_max)`.
    pub log10_p_lower: LogProb,
    /// `p^(k_tilde)`, an upper bound on `p^(k_max)`.
    pub log10_p_upper: LogProb,
    /// Whether one level of encoding beats none.
    pub useful: bool,
}

pub fn exp_model_bounds(scheme: &FtScheme, eta0: f64, beta: f64) -> Result<BoundsReport> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be > 0, got {beta}")));
    }
    if !(eta0 > 0.0 && eta0 < 1.0) {
        return Err(Error::InvalidArgument(format!("eta0 must lie in (0, 1), got {eta0}")));
    }
    if scheme.d < 2 {
        return Err(Error::InvalidArgument(format!("D must be >= 2, got {}", scheme.d)));
    }
    let ln_b = (scheme.b as f64).ln();
    let ln_d = (scheme.d as f64).ln();
    let ln_b_eta = ln_b + eta0.ln();
    let slope = beta * ln_d;

    let k_st = -1.0 / LN_2 - ln_b_eta / slope;
    let k_tilde = -ln_b_eta / slope - 1.0;

    let g1 = ln_d / 2.0;
    let g2 = LN_2 / ln_d;
    let ln_lower = -ln_b - (beta / g2) * (-1.0 - g2 * ln_b_eta / beta).exp();
    let ln_upper = -ln_b - g1 * beta * (-(g2 / beta) * ln_b_eta).exp();

    let useful = eta0.ln() < -ln_b - 2.0 * slope;
    Ok(BoundsReport {
        k_st,
        k_tilde,
        log10_p_lower: ln_to_logprob(ln_lower),
        log10_p_upper: ln_to_logprob(ln_upper),
        useful,
    })
}

fn ln_to_logprob(ln: f64) -> LogProb {
    LogProb::from_log10(ln / std::f64::consts::LN_10)
}

/// Largest `eta0` for which one level of encoding helps: `1 / (B D^(2 beta))`.
pub fn one_level_condition(b: u64, d: u64, beta: f64) -> f64 {
    10f64.powf(-((b as f64).log10() + 2.0 * beta * (d as f64).log10()))
}
