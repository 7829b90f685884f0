//! Photon and energy budgets for running Shor's algorithm on concatenated
//! logical qubits driven by waveguide photons.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::concat::{find_kmax, OptResult, DEFAULT_K_CAP};
use crate::error::{Error, Result};
use crate::scheme::{FtScheme, LogProb, NoiseModel, PI2_OVER_16};

/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054571817e-34;
/// Upper end of the photon-budget search.
pub const MAX_LOG10_BUDGET: f64 = 30.0;
/// Relative precision of the returned minimum budget.
pub const BUDGET_REL_TOL: f64 = 0.01;
/// `(omega0/gamma)/n_g` at or below which the drive is flagged.
pub const RWA_FLAG_MARGIN: f64 = 100.0;

pub const BILL_CSV_HEADER: &str = "R,n_L,k,E_tot_J,P_W,T_tot_s,tau_g_s";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShorProblem {
    /// Key length in bits.
    #[serde(rename = "R")]
    pub r: u64,
    /// Number of logical gates.
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "P_target")]
    pub p_target: f64,
}

impl ShorProblem {
    /// `L = R^2`, success probability 2/3.
    pub fn new(r: u64) -> Result<Self> {
        let problem = ShorProblem { r, l: (r as f64) * (r as f64), p_target: 2.0 / 3.0 };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_gate_count(mut self, l: f64) -> Result<Self> {
        self.l = l;
        self.validate()?;
        Ok(self)
    }

    pub fn with_target(mut self, p_target: f64) -> Result<Self> {
        self.p_target = p_target;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 2 {
            return Err(Error::InvalidArgument(format!("R must be >= 2, got {}", self.r)));
        }
        if !(self.l >= 1.0 && self.l.is_finite()) {
            return Err(Error::InvalidArgument(format!("L must be >= 1, got {}", self.l)));
        }
        if !(self.p_target > 0.5 && self.p_target < 1.0) {
            return Err(Error::InvalidArgument(format!("P_target must lie in (1/2, 1), got {}", self.p_target)));
        }
        Ok(())
    }
}

/// Largest tolerable error per logical gate.
pub fn target_logical_error(problem: &ShorProblem) -> f64 {
    if problem.p_target == 2.0 / 3.0 {
        1.0 / (3.0 * problem.l)
    } else {
        -problem.p_target.ln() / problem.l
    }
}

fn photon_model(problem: &ShorProblem, n_l: f64, scheme: &FtScheme) -> Result<NoiseModel> {
    NoiseModel::shor_photon(problem.l, n_l * problem.l, scheme.a)
}

/// Optimal concatenation level when every logical gate gets `n_l` photons.
pub fn optimize_photon_budget(problem: &ShorProblem, n_l: f64, scheme: &FtScheme) -> Result<OptResult> {
    problem.validate()?;
    if !(n_l > 0.0 && n_l.is_finite()) {
        return Err(Error::InvalidArgument(format!("n_L must be > 0, got {n_l}")));
    }
    find_kmax(scheme, &photon_model(problem, n_l, scheme)?, DEFAULT_K_CAP)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum PhotonBudget {
    Feasible {
        #[serde(rename = "n_L")]
        n_l: f64,
        k: u32,
        log10_p_min: f64,
        log10_target: f64,
    },
    /// Even `10^30` photons per logical gate miss the target.
    Infeasible { log10_p_at_cap: f64, log10_target: f64 },
}

/// Smallest photons-per-logical-gate meeting the target of `problem`.
pub fn min_photon_budget(problem: &ShorProblem, scheme: &FtScheme) -> Result<PhotonBudget> {
    min_photon_budget_for_target(problem, scheme, LogProb::from_linear(target_logical_error(problem)))
}

/// As [`min_photon_budget`], with an explicit per-gate error target.
///
/// The best error is non-increasing in the budget, so the feasible set is a
/// half-line and bisection on `log10 n_L` over `[0, 30]` finds its edge.
pub fn min_photon_budget_for_target(problem: &ShorProblem, scheme: &FtScheme, target: LogProb) -> Result<PhotonBudget> {
    problem.validate()?;
    let log10_target = target.log10();
    let best_at = |log10_n: f64| -> Result<OptResult> { optimize_photon_budget(problem, 10f64.powf(log10_n), scheme) };
    let meets = |r: &OptResult| r.log10_p_min.log10() <= log10_target;

    let at_cap = best_at(MAX_LOG10_BUDGET)?;
    if !meets(&at_cap) {
        return Ok(PhotonBudget::Infeasible { log10_p_at_cap: at_cap.log10_p_min.log10(), log10_target });
    }
    let at_one = best_at(0.0)?;
    if meets(&at_one) {
        return Ok(PhotonBudget::Feasible { n_l: 1.0, k: at_one.k_max, log10_p_min: at_one.log10_p_min.log10(), log10_target });
    }

    let step = (1.0 + BUDGET_REL_TOL).log10();
    let (mut lo, mut hi) = (0.0, MAX_LOG10_BUDGET);
    let (mut lo_res, mut hi_res) = (at_one, at_cap);
    while hi - lo > step {
        let mid = 0.5 * (lo + hi);
        let res = best_at(mid)?;
        if meets(&res) {
            hi = mid;
            hi_res = res;
        } else {
            lo = mid;
            lo_res = res;
        }
    }
    if lo_res.log10_p_min < hi_res.log10_p_min {
        log::warn!("best logical error is not monotone in n_L near 10^{hi:.4}");
    }
    Ok(PhotonBudget::Feasible { n_l: 10f64.powf(hi), k: hi_res.k_max, log10_p_min: hi_res.log10_p_min.log10(), log10_target })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBill {
    #[serde(rename = "n_L")]
    pub n_l: f64,
    pub n_g: f64,
    pub k: u32,
    #[serde(rename = "E_tot")]
    pub e_tot: f64,
    #[serde(rename = "P_avg")]
    pub p_avg: f64,
    pub tau_g: f64,
    #[serde(rename = "tau_L")]
    pub tau_l: f64,
    #[serde(rename = "T_tot")]
    pub t_tot: f64,
}

impl EnergyBill {
    pub fn write_csv_row<W: Write>(&self, r: u64, mut out: W) -> io::Result<()> {
        writeln!(out, "{},{:e},{},{:e},{:e},{:e},{:e}", r, self.n_l, self.k, self.e_tot, self.p_avg, self.t_tot, self.tau_g)
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be > 0, got {v}")))
    }
}

/// Energy, power and timing of a sequential run with `n_l` photons per
/// logical gate at level `k`.
pub fn energy_bill(problem: &ShorProblem, n_l: f64, k: u32, gamma: f64, omega0: f64, scheme: &FtScheme) -> Result<EnergyBill> {
    problem.validate()?;
    check_positive("n_L", n_l)?;
    check_positive("gamma", gamma)?;
    check_positive("omega0", omega0)?;
    let n_g = n_l / (scheme.a as f64).powi(k as i32);
    let tau_g = PI * PI / (4.0 * gamma * n_g);
    let tau_l = (scheme.m as f64).powi(k as i32) * tau_g;
    let t_tot = problem.l * tau_l;
    let e_tot = HBAR * omega0 * problem.l * n_l;
    Ok(EnergyBill { n_l, n_g, k, e_tot, p_avg: e_tot / t_tot, tau_g, tau_l, t_tot })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RwaMargin {
    pub ratio: f64,
    pub marginal: bool,
}

/// `(omega0/gamma)/n_g` with `n_g = n_L/A^k`.
pub fn rwa_margin(n_l: f64, k: u32, gamma: f64, omega0: f64, scheme: &FtScheme) -> Result<RwaMargin> {
    check_positive("n_L", n_l)?;
    check_positive("gamma", gamma)?;
    check_positive("omega0", omega0)?;
    let n_g = n_l / (scheme.a as f64).powi(k as i32);
    let ratio = omega0 / gamma / n_g;
    Ok(RwaMargin { ratio, marginal: ratio <= RWA_FLAG_MARGIN })
}

/// Photon count of a pi-pulse giving physical error `eta` at `k = 0`.
pub fn photons_for_error(eta: f64) -> f64 {
    PI2_OVER_16 / eta
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn feasible(b: PhotonBudget) -> (f64, u32) {
        match b {
            PhotonBudget::Feasible { n_l, k, .. } => (n_l, k),
            other => panic!("expected a feasible budget, got {other:?}"),
        }
    }

    #[test]
    fn target_examples() {
        assert_relative_eq!(target_logical_error(&ShorProblem::new(2048).unwrap()), 7.947e-8, max_relative = 1e-3);
        assert_relative_eq!(target_logical_error(&ShorProblem::new(1000).unwrap()), 1.0 / 3e6, max_relative = 1e-15);
        let single = ShorProblem::new(2).unwrap().with_gate_count(1.0).unwrap();
        assert_relative_eq!(target_logical_error(&single), 1.0 / 3.0, max_relative = 1e-15);
        let p = ShorProblem::new(10).unwrap().with_target(0.9).unwrap();
        assert_relative_eq!(target_logical_error(&p), -(0.9f64).ln() / 100.0, max_relative = 1e-15);
    }

    #[test]
    fn problem_validation() {
        assert!(ShorProblem::new(1).is_err());
        assert!(ShorProblem::new(10).unwrap().with_target(0.5).is_err());
        assert!(ShorProblem::new(10).unwrap().with_target(1.0).is_err());
        assert!(ShorProblem::new(10).unwrap().with_gate_count(0.5).is_err());
    }

    #[test]
    fn small_key_needs_no_encoding() {
        let s = FtScheme::aliferis2006();
        let r = optimize_photon_budget(&ShorProblem::new(1000).unwrap(), 1e6, &s).unwrap();
        assert_eq!(r.k_max, 0);
        assert!(optimize_photon_budget(&ShorProblem::new(1000).unwrap(), 0.0, &s).is_err());
    }

    #[test]
    fn budget_at_k0_matches_closed_form() {
        let s = FtScheme::aliferis2006();
        let problem = ShorProblem::new(1000).unwrap();
        let (n_l, k) = feasible(min_photon_budget(&problem, &s).unwrap());
        assert_eq!(k, 0);
        let exact = photons_for_error(target_logical_error(&problem));
        assert_relative_eq!(exact, 1.8506e6, max_relative = 1e-4);
        assert!(n_l >= exact && n_l <= exact * (1.0 + BUDGET_REL_TOL));
    }

    #[test]
    fn trivial_target_needs_one_photon() {
        let s = FtScheme::aliferis2006();
        let problem = ShorProblem::new(1000).unwrap();
        let b = min_photon_budget_for_target(&problem, &s, LogProb::from_linear(PI2_OVER_16)).unwrap();
        assert_eq!(feasible(b), (1.0, 0));
    }

    #[test]
    fn unreachable_target_is_reported() {
        let s = FtScheme::aliferis2006();
        let problem = ShorProblem::new(1000).unwrap();
        let b = min_photon_budget_for_target(&problem, &s, LogProb::from_log10(-1e6)).unwrap();
        assert!(matches!(b, PhotonBudget::Infeasible { .. }));
    }

    #[test]
    fn bill_small_key() {
        let s = FtScheme::aliferis2006();
        let bill = energy_bill(&ShorProblem::new(1000).unwrap(), 1e6, 0, 10.0, 1e10, &s).unwrap();
        assert_relative_eq!(bill.e_tot, 1.0546e-12, max_relative = 1e-4);
        assert_relative_eq!(bill.tau_g, 2.4674e-7, max_relative = 1e-4);
        assert_relative_eq!(bill.t_tot, 0.24674, max_relative = 1e-4);
        assert_relative_eq!(bill.p_avg, 4.274e-12, max_relative = 1e-3);
        assert_eq!(bill.tau_l, bill.tau_g);
    }

    #[test]
    fn bill_medium_key() {
        let s = FtScheme::aliferis2006();
        let bill = energy_bill(&ShorProblem::new(100_000).unwrap(), 1e9, 1, 10.0, 1e10, &s).unwrap();
        assert_relative_eq!(bill.e_tot, 1.0546e-5, max_relative = 1e-4);
        assert!(bill.t_tot > 3e3 && bill.t_tot < 5e3);
        assert!(bill.p_avg > 1e-9 && bill.p_avg < 1e-8);
    }

    #[test]
    fn bill_csv_row() {
        let s = FtScheme::aliferis2006();
        let bill = energy_bill(&ShorProblem::new(1000).unwrap(), 1e6, 0, 10.0, 1e10, &s).unwrap();
        let mut buf = Vec::new();
        bill.write_csv_row(1000, &mut buf).unwrap();
        let line = String::from_utf8(buf).unwrap();
        assert_eq!(line.trim_end().split(',').count(), BILL_CSV_HEADER.split(',').count());
        assert!(line.starts_with("1000,1e6,0,"));
    }

    #[test]
    fn rwa_examples() {
        let s = FtScheme::aliferis2006();
        let m = rwa_margin(1e6, 0, 10.0, 1e10, &s).unwrap();
        assert_relative_eq!(m.ratio, 1e3, max_relative = 1e-12);
        assert!(!m.marginal);
        let m = rwa_margin(1e9, 0, 10.0, 1e10, &s).unwrap();
        assert_relative_eq!(m.ratio, 1.0, max_relative = 1e-12);
        assert!(m.marginal);
        let m = rwa_margin(1e11, 2, 10.0, 1e10, &s).unwrap();
        assert_relative_eq!(m.ratio, 3306.25, max_relative = 1e-9);
    }
}
