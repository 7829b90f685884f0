//! Power-law crosstalk `||H_ij|| = delta |r_i - r_j|^(-z)` on chains and square
//! lattices, for the long-ranged regime `z <= d` where the error strength
//!
//! ```text
//! Delta = max_i sum_j ||H_ij||
//! ```
//!
//! grows with the number of qubits. Lattice quantities are returned in units
//! of `delta / a^z`, so they are pure numbers of unit-spacing lattice sums.
//!
//! `t0 Delta` is an error strength, not an error probability per gate. The
//! mapping to local noise below is an upper bound and should be read as one.

use std::f64::consts::{E, PI};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::concat::{self, OptResult};
use crate::error::{Error, Result};
use crate::scheme::{FtScheme, LogProb};

/// Largest chain the direct sum accepts.
pub const MAX_CHAIN_SITES: u64 = 1_000_000;
/// Largest square-lattice side the direct sum accepts.
pub const MAX_SQUARE_SIDE: u64 = 10_000;
/// Largest lattice for the all-sites maximum.
pub const MAX_BRUTE_FORCE_SITES: u64 = 4096;

/// `2 e^(2 + 1/e)`: the factor that maps `B` to `2e^(2+1/e) B^2` for crosstalk.
pub fn crosstalk_factor() -> f64 {
    2.0 * (2.0 + 1.0 / E).exp()
}

/// `e^(1 + 1/(2e))`.
pub fn local_noise_factor() -> f64 {
    (1.0 + 1.0 / (2.0 * E)).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aspect {
    Chain,
    Square,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub d: u32,
    pub z: f64,
    pub delta: f64,
    pub a: f64,
    #[serde(rename = "N0")]
    pub n0: u64,
    pub aspect: Aspect,
}

impl LatticeSpec {
    /// Unit prefactor and spacing.
    pub fn chain(z: f64, n0: u64) -> Result<Self> {
        let spec = LatticeSpec { d: 1, z, delta: 1.0, a: 1.0, n0, aspect: Aspect::Chain };
        spec.validate()?;
        Ok(spec)
    }

    /// `side x side` square lattice with unit prefactor and spacing.
    pub fn square(z: f64, side: u64) -> Result<Self> {
        let spec = LatticeSpec { d: 2, z, delta: 1.0, a: 1.0, n0: side * side, aspect: Aspect::Square };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match (self.d, self.aspect) {
            (1, Aspect::Chain) | (2, Aspect::Square) => {}
            (d, aspect) => return bad(format!("dimension {d} does not match lattice {aspect:?}")),
        }
        if self.n0 < 2 {
            return bad(format!("N0 must be >= 2, got {}", self.n0));
        }
        if !(self.z.is_finite() && self.z >= 0.0) {
            return bad(format!("z must be finite and >= 0, got {}", self.z));
        }
        if !(self.delta > 0.0 && self.a > 0.0) {
            return bad("delta and a must be > 0".into());
        }
        if self.aspect == Aspect::Square && self.side() * self.side() != self.n0 {
            return bad(format!("square lattice needs a perfect-square N0, got {}", self.n0));
        }
        Ok(())
    }

    /// Side length of a square lattice (the chain length for a chain).
    pub fn side(&self) -> u64 {
        match self.aspect {
            Aspect::Chain => self.n0,
            Aspect::Square => {
                let s = (self.n0 as f64).sqrt().round() as u64;
                // correct the float root for large inputs
                (s.saturating_sub(1)..=s + 1).find(|r| r * r >= self.n0).unwrap_or(s)
            }
        }
    }

    /// `delta / a^z`, converting lattice sums to an error strength.
    pub fn prefactor(&self) -> f64 {
        self.delta / self.a.powf(self.z)
    }

    fn candidate_centres(&self) -> Vec<(u64, u64)> {
        let mid = |n: u64| if n % 2 == 1 { vec![n / 2] } else { vec![n / 2 - 1, n / 2] };
        match self.aspect {
            Aspect::Chain => mid(self.n0).into_iter().map(|i| (i, 0)).collect(),
            Aspect::Square => {
                let m = mid(self.side());
                m.iter().flat_map(|&x| m.iter().map(move |&y| (x, y))).collect()
            }
        }
    }

    fn row_sum(&self, site: (u64, u64)) -> f64 {
        let z = self.z;
        match self.aspect {
            Aspect::Chain => pairwise_sum(0, self.n0 as usize, &|j| {
                let r = (j as f64 - site.0 as f64).abs();
                if r == 0.0 { 0.0 } else { r.powf(-z) }
            }),
            Aspect::Square => {
                let side = self.side() as usize;
                pairwise_sum(0, side * side, &|idx| {
                    let dx = (idx % side) as f64 - site.0 as f64;
                    let dy = (idx / side) as f64 - site.1 as f64;
                    let r2 = dx * dx + dy * dy;
                    if r2 == 0.0 { 0.0 } else { r2.powf(-z / 2.0) }
                })
            }
        }
    }
}

/// Fixed-order pairwise summation; results are bitwise reproducible.
fn pairwise_sum(lo: usize, hi: usize, term: &dyn Fn(usize) -> f64) -> f64 {
    if hi - lo <= 64 {
        return (lo..hi).map(term).sum();
    }
    let mid = lo + (hi - lo) / 2;
    pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term)
}

/// `max_i sum_j |r_i - r_j|^(-z)` by direct summation, in units of `delta/a^z`.
///
/// The maximising site of a chain or square lattice is central; only the one
/// to four central sites are summed. [`delta_lattice_brute_force`] checks this
/// on small lattices.
pub fn delta_lattice_oracle(spec: &LatticeSpec) -> Result<f64> {
    spec.validate()?;
    match spec.aspect {
        Aspect::Chain if spec.n0 > MAX_CHAIN_SITES => {
            return Err(Error::LatticeTooLarge(format!("chain of {} > {MAX_CHAIN_SITES} sites", spec.n0)));
        }
        Aspect::Square if spec.side() > MAX_SQUARE_SIDE => {
            return Err(Error::LatticeTooLarge(format!("side {} > {MAX_SQUARE_SIDE}", spec.side())));
        }
        _ => {}
    }
    Ok(spec
        .candidate_centres()
        .into_iter()
        .map(|site| spec.row_sum(site))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Maximum row sum over every site. `O(N0^2)`.
pub fn delta_lattice_brute_force(spec: &LatticeSpec) -> Result<f64> {
    spec.validate()?;
    if spec.n0 > MAX_BRUTE_FORCE_SITES {
        return Err(Error::LatticeTooLarge(format!("{} > {MAX_BRUTE_FORCE_SITES} sites", spec.n0)));
    }
    let sites: Vec<(u64, u64)> = match spec.aspect {
        Aspect::Chain => (0..spec.n0).map(|i| (i, 0)).collect(),
        Aspect::Square => {
            let s = spec.side();
            (0..s).flat_map(|y| (0..s).map(move |x| (x, y))).collect()
        }
    };
    Ok(sites.into_iter().map(|site| spec.row_sum(site)).fold(f64::NEG_INFINITY, f64::max))
}

/// `C_z = integral_0^(pi/4) cos(theta)^(z-2) d theta`.
pub fn square_lattice_cz(z: f64) -> f64 {
    let out = quadrature::integrate(|t: f64| t.cos().powf(z - 2.0), 0.0, PI / 4.0, 1e-12);
    debug_assert!(out.error_estimate <= 1e-10);
    out.integral
}

/// Large-`N0` continuum approximation of the central row sum, in units of
/// `delta/a^z`.
///
/// For `z = d` the result is the log-growing constant `C_0`; the order-one
/// `kappa` inside the logarithm defaults to 1.
pub fn delta0_asymptotic(spec: &LatticeSpec, kappa: Option<f64>) -> Result<f64> {
    spec.validate()?;
    let d = f64::from(spec.d);
    let z = spec.z;
    if z > d {
        return Err(Error::ShortRanged { z, d: spec.d });
    }
    let n0 = spec.n0 as f64;
    if spec.n0 < 100 {
        log::warn!("continuum approximation used with only N0 = {} sites", spec.n0);
    }
    let kappa = kappa.unwrap_or(1.0);
    let value = match (spec.aspect, z == d) {
        (Aspect::Chain, false) => 2f64.powf(z) * n0.powf(1.0 - z) / (1.0 - z),
        (Aspect::Chain, true) => 2.0 * (kappa * n0 / 2.0).ln(),
        (Aspect::Square, false) => {
            2f64.powf(z + 1.0) * n0.powf(1.0 - z / 2.0) * square_lattice_cz(z) / (2.0 - z)
        }
        (Aspect::Square, true) => PI * (kappa * n0 / 4.0).ln(),
    };
    Ok(value)
}

/// For `z = d`, the `kappa` that makes the continuum form match `lattice_sum`.
pub fn fit_kappa(spec: &LatticeSpec, lattice_sum: f64) -> Result<f64> {
    spec.validate()?;
    if spec.z != f64::from(spec.d) {
        return Err(Error::InvalidArgument("kappa is only defined for z = d".into()));
    }
    let n0 = spec.n0 as f64;
    Ok(match spec.aspect {
        Aspect::Chain => 2.0 / n0 * (lattice_sum / 2.0).exp(),
        Aspect::Square => 4.0 / n0 * (lattice_sum / PI).exp(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    #[serde(rename = "N0")]
    pub n0: u64,
    pub oracle: f64,
    pub asymptotic: f64,
    pub rel_err: f64,
}

impl OracleComparison {
    pub const CSV_HEADER: &'static str = "N0,oracle,asymptotic,rel_err";

    pub fn write_csv_row<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{},{},{},{}", self.n0, self.oracle, self.asymptotic, self.rel_err)
    }
}

pub fn compare_oracle(spec: &LatticeSpec, kappa: Option<f64>) -> Result<OracleComparison> {
    let oracle = delta_lattice_oracle(spec)?;
    let asymptotic = delta0_asymptotic(spec, kappa)?;
    Ok(OracleComparison {
        n0: spec.n0,
        oracle,
        asymptotic,
        rel_err: (asymptotic - oracle).abs() / oracle,
    })
}

/// Local error strength that error correction handles at least as well as
/// crosstalk of strength `t0 Delta`: `e^(1+1/(2e)) sqrt(2 t0 Delta)`.
pub fn effective_local_error(t0_delta: f64) -> Result<f64> {
    if !(t0_delta >= 0.0 && t0_delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("t0*Delta must be >= 0, got {t0_delta}")));
    }
    Ok(local_noise_factor() * (2.0 * t0_delta).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkResult {
    /// Physical-level `t0 Delta^(0)`.
    pub t0_delta: f64,
    pub k: u32,
    /// `log10 t0 Delta_L^(k)` between logical qubits.
    pub log10_t0_delta_l: LogProb,
}

/// Bound on crosstalk between level-`k` logical qubits when `Delta` grows as
/// `N^beta`:
///
/// ```text
/// t0 Delta_L^(k) = (Bx t0 Delta^(0))^(2^k) / Bx * D^(beta 2^k k),   Bx = 2e^(2+1/e) B^2
/// ```
pub fn logical_crosstalk_log10(scheme: &FtScheme, t0_delta0: f64, beta: f64, k: u32) -> Result<CrosstalkResult> {
    if !(t0_delta0 >= 0.0 && t0_delta0.is_finite()) {
        return Err(Error::InvalidArgument(format!("t0*Delta must be >= 0, got {t0_delta0}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be >= 0, got {beta}")));
    }
    let log10_bx = crosstalk_factor().log10() + 2.0 * (scheme.b as f64).log10();
    let log10_t0_delta_l = if k == 0 {
        t0_delta0.log10()
    } else {
        let fold = 2f64.powi(k as i32);
        fold * (log10_bx + t0_delta0.log10()) - log10_bx
            + beta * fold * f64::from(k) * (scheme.d as f64).log10()
    };
    Ok(CrosstalkResult { t0_delta: t0_delta0, k, log10_t0_delta_l: LogProb::from_log10(log10_t0_delta_l) })
}

/// Optimal level against growing crosstalk.
pub fn optimize_crosstalk(scheme: &FtScheme, t0_delta0: f64, beta: f64, k_cap: u32) -> Result<OptResult> {
    if t0_delta0 <= 0.0 {
        return Err(Error::InvalidArgument(format!("t0*Delta must be > 0, got {t0_delta0}")));
    }
    concat::scan_levels(k_cap, |k| Ok(logical_crosstalk_log10(scheme, t0_delta0, beta, k)?.log10_t0_delta_l))
}

/// Largest `t0 Delta^(0)` for which one level helps: `1 / (2e^(2+1/e) B^2 D^(2 beta))`.
pub fn crosstalk_usefulness_threshold(b: u64, d: u64, beta: f64) -> f64 {
    let log10 = crosstalk_factor().log10() + 2.0 * (b as f64).log10() + 2.0 * beta * (d as f64).log10();
    10f64.powf(-log10)
}
