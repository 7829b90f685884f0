//! Executes a resolved configuration and renders its report.

use ftscale::concat::{
    affine_usefulness_threshold, exp_model_bounds, find_kmax, generic_kmax_bound, BoundsReport, CriticalSlope,
    CurvePoint, KmaxBound, MAX_K_CAP,
};
use ftscale::gate_sim::{asymptotic_pauli_errors, evolve_noisy_gate, pulse_params, GateSpec, PulseParams, QubitChannel};
use ftscale::long_range::{
    crosstalk_usefulness_threshold, delta0_asymptotic, delta_lattice_oracle, optimize_crosstalk, LatticeSpec,
    OracleComparison,
};
use ftscale::scheme::fit_noise_model;
use ftscale::shor::{
    energy_bill, min_photon_budget, optimize_photon_budget, rwa_margin, target_logical_error, EnergyBill,
    PhotonBudget, RwaMargin, ShorProblem, BILL_CSV_HEADER,
};
use ftscale::{FitResult, FtScheme, LogProb, NoiseModel, OptResult, OptStatus};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::*;
use crate::error::CliError;

/// Linear probabilities are only printed when `|log10 p|` is below this.
pub const LINEAR_LIMIT: f64 = 300.0;

pub const CURVE_CSV_HEADER: &str = "k,log10_p";
pub const SWEEP_OUTPUT_COLUMNS: [&str; 4] = ["k_max", "log10_p_min", "status", "p_min"];
pub const GATESIM_CSV_HEADER: &str = "theta,gamma,n_g,tau,chi_00,p_x,p_y,p_z,converged";
pub const FIT_CSV_HEADER: &str = "variant,eta0,slope,residual,n_points";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct Report<'a, R: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    result: &'a R,
}

/// Rendered output plus whether the run hit an infeasible target.
pub struct Rendered {
    pub text: String,
    pub infeasible: bool,
}

fn linear(p: LogProb) -> Option<f64> {
    let v = p.log10();
    (v.abs() < LINEAR_LIMIT).then(|| p.to_linear())
}

/// Shortest round-trip text; exponent form outside `[1e-4, 1e15)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn header_of(text: &str) -> Vec<&str> {
    text.split(',').collect()
}

pub fn execute(config: &RunConfig, format: Format) -> Result<Rendered, CliError> {
    let scheme = config.scheme.resolve()?;
    let json = |result: &dyn erased::Erased| -> Result<String, CliError> { Ok(report_json(config, &result.to_value())) };
    match &config.command {
        CommandConfig::Optimize(c) => {
            let result = optimize(&scheme, c)?;
            let text = match format {
                Format::Json => json(&result)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> =
                        result.curve.iter().map(|p| vec![p.k.to_string(), num(p.log10_p.log10())]).collect();
                    csv_text(&header_of(CURVE_CSV_HEADER), &rows)?
                }
            };
            Ok(Rendered { text, infeasible: false })
        }
        CommandConfig::Sweep(c) => {
            let result = sweep(&scheme, c)?;
            let text = match format {
                Format::Json => json(&result)?,
                Format::Csv => {
                    let mut header: Vec<&str> = c.axes.iter().map(|a| a.name.name()).collect();
                    header.extend(SWEEP_OUTPUT_COLUMNS);
                    let rows: Vec<Vec<String>> = result
                        .rows
                        .iter()
                        .map(|r| {
                            let mut row: Vec<String> = r.point.iter().map(|v| num(*v)).collect();
                            row.push(r.k_max.to_string());
                            row.push(num(r.log10_p_min.log10()));
                            row.push(r.status.as_str().to_string());
                            row.push(opt_num(r.p_min));
                            row
                        })
                        .collect();
                    csv_text(&header, &rows)?
                }
            };
            Ok(Rendered { text, infeasible: false })
        }
        CommandConfig::Gatesim(c) => {
            let result = gatesim(c)?;
            let text = match format {
                Format::Json => json(&result)?,
                Format::Csv => {
                    let ch = &result.channel;
                    let row = vec![
                        num(c.theta),
                        num(c.gamma),
                        num(c.n_g),
                        num(result.pulse.tau),
                        num(ch.chi_diag[0]),
                        num(ch.chi_diag[1]),
                        num(ch.chi_diag[2]),
                        num(ch.chi_diag[3]),
                        ch.converged.to_string(),
                    ];
                    csv_text(&header_of(GATESIM_CSV_HEADER), &[row])?
                }
            };
            Ok(Rendered { text, infeasible: false })
        }
        CommandConfig::Longrange(c) => {
            let result = longrange(&scheme, c)?;
            let text = match format {
                Format::Json => json(&result)?,
                Format::Csv => {
                    let cmp = result.comparison.as_ref();
                    let row = vec![
                        c.n0.to_string(),
                        opt_num(cmp.map(|r| r.oracle)),
                        opt_num(result.asymptotic),
                        opt_num(cmp.map(|r| r.rel_err)),
                    ];
                    csv_text(&header_of(OracleComparison::CSV_HEADER), &[row])?
                }
            };
            Ok(Rendered { text, infeasible: false })
        }
        CommandConfig::Shor(c) => {
            let result = shor(&scheme, c)?;
            let infeasible = result.n_l.is_none();
            let text = match format {
                Format::Json => json(&result)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = result
                        .bill
                        .iter()
                        .map(|b| {
                            vec![
                                c.r.to_string(),
                                num(b.n_l),
                                b.k.to_string(),
                                num(b.e_tot),
                                num(b.p_avg),
                                num(b.t_tot),
                                num(b.tau_g),
                            ]
                        })
                        .collect();
                    csv_text(&header_of(BILL_CSV_HEADER), &rows)?
                }
            };
            Ok(Rendered { text, infeasible })
        }
        CommandConfig::Fit(c) => {
            let result = fit(&scheme, c)?;
            let text = match format {
                Format::Json => json(&result)?,
                Format::Csv => {
                    let (variant, eta0, slope) = match result.model {
                        NoiseModel::Affine { eta0, c } => ("affine", eta0, c),
                        NoiseModel::Exponential { eta0, beta } => ("exp", eta0, beta),
                        _ => unreachable!("fits produce affine or exponential laws"),
                    };
                    let row = vec![
                        variant.to_string(),
                        num(eta0),
                        num(slope),
                        num(result.residual),
                        result.n_points.to_string(),
                    ];
                    csv_text(&header_of(FIT_CSV_HEADER), &[row])?
                }
            };
            Ok(Rendered { text, infeasible: false })
        }
    }
}

/// Pretty JSON of `{command, config, result}` with a trailing newline.
pub fn report_json<R: Serialize>(config: &RunConfig, result: &R) -> String {
    let report = Report { command: config.command.name(), config, result };
    serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
}

mod erased {
    use serde::Serialize;

    /// Lets one closure serialize any result type.
    pub trait Erased {
        fn to_value(&self) -> serde_json::Value;
    }

    impl<T: Serialize> Erased for T {
        fn to_value(&self) -> serde_json::Value {
            serde_json::to_value(self).expect("result serializes")
        }
    }
}

fn check_k_cap(k_cap: u32) -> Result<(), CliError> {
    if k_cap > MAX_K_CAP {
        return Err(CliError::Usage(format!("k_cap must be <= {MAX_K_CAP}, got {k_cap}")));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Analysis {
    AffineThreshold(CriticalSlope),
    ExponentialBounds(BoundsReport),
    TableBound { k_max_bound: KmaxBound },
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizeResult {
    pub k_max: u32,
    pub log10_p_min: LogProb,
    pub p_min: Option<f64>,
    pub status: OptStatus,
    pub k_cap: u32,
    pub analysis: Option<Analysis>,
    pub curve: Vec<CurvePoint>,
}

pub fn optimize(scheme: &FtScheme, c: &OptimizeConfig) -> Result<OptimizeResult, CliError> {
    check_k_cap(c.k_cap)?;
    let model = c.model.build(scheme)?;
    let r = find_kmax(scheme, &model, c.k_cap)?;
    let analysis = match &model {
        NoiseModel::Affine { eta0, .. } => Some(Analysis::AffineThreshold(affine_usefulness_threshold(scheme.b, *eta0)?)),
        NoiseModel::Exponential { eta0, beta } if *beta > 0.0 && scheme.d >= 2 => {
            Some(Analysis::ExponentialBounds(exp_model_bounds(scheme, *eta0, *beta)?))
        }
        NoiseModel::Tabulated { .. } => Some(Analysis::TableBound { k_max_bound: generic_kmax_bound(scheme, &model)? }),
        _ => None,
    };
    Ok(OptimizeResult {
        k_max: r.k_max,
        log10_p_min: r.log10_p_min,
        p_min: linear(r.log10_p_min),
        status: r.status,
        k_cap: r.k_cap,
        analysis,
        curve: r.curve,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub point: Vec<f64>,
    pub k_max: u32,
    pub log10_p_min: LogProb,
    pub status: OptStatus,
    pub p_min: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

pub fn validate_sweep(c: &SweepConfig) -> Result<(), CliError> {
    check_k_cap(c.k_cap)?;
    if c.axes.is_empty() || c.axes.len() > 2 {
        return Err(CliError::Usage(format!("a sweep needs one or two axes, got {}", c.axes.len())));
    }
    for (i, axis) in c.axes.iter().enumerate() {
        axis.validate().map_err(CliError::Usage)?;
        if c.axes[..i].iter().any(|a| a.name == axis.name) {
            return Err(CliError::Usage(format!("axis {} given twice", axis.name.name())));
        }
        let fits = match axis.name {
            AxisParam::Eta0 | AxisParam::BEta0 => !matches!(c.model, ModelConfig::Shor { .. }),
            AxisParam::C => matches!(c.model, ModelConfig::Affine { .. }),
            AxisParam::Beta => matches!(c.model, ModelConfig::Exp { .. }),
            AxisParam::NL | AxisParam::L => matches!(c.model, ModelConfig::Shor { .. }),
            AxisParam::B | AxisParam::D => true,
        };
        if !fits {
            return Err(CliError::Usage(format!("axis {} does not apply to this model", axis.name.name())));
        }
    }
    if c.axes.iter().any(|a| a.name == AxisParam::Eta0) && c.axes.iter().any(|a| a.name == AxisParam::BEta0) {
        return Err(CliError::Usage("axes eta0 and b_eta0 both set eta0".into()));
    }
    Ok(())
}

fn apply_point(scheme: &FtScheme, base: &ModelConfig, axes: &[Axis], point: &[f64]) -> Result<(FtScheme, ModelConfig), CliError> {
    let mut scheme = *scheme;
    let mut model = base.clone();
    // integer constants take the nearest integer of the grid value
    let as_count = |v: f64, name: &str| -> Result<u64, CliError> {
        let r = v.round();
        if r >= 1.0 && r <= u64::MAX as f64 {
            Ok(r as u64)
        } else {
            Err(CliError::Usage(format!("{name} must be a positive integer, got {v}")))
        }
    };
    // scheme constants first so that b_eta0 sees the swept B
    for (axis, &v) in axes.iter().zip(point) {
        match axis.name {
            AxisParam::B => scheme.b = as_count(v, "B")?,
            AxisParam::D => scheme.d = as_count(v, "D")?,
            _ => {}
        }
    }
    let mut n_l = None;
    for (axis, &v) in axes.iter().zip(point) {
        match (axis.name, &mut model) {
            (AxisParam::Eta0, ModelConfig::Affine { eta0, .. } | ModelConfig::Exp { eta0, .. } | ModelConfig::Table { eta0, .. }) => *eta0 = v,
            (AxisParam::BEta0, ModelConfig::Affine { eta0, .. } | ModelConfig::Exp { eta0, .. } | ModelConfig::Table { eta0, .. }) => {
                *eta0 = v / scheme.b as f64
            }
            (AxisParam::C, ModelConfig::Affine { c, .. }) => *c = v,
            (AxisParam::Beta, ModelConfig::Exp { beta, .. }) => *beta = v,
            (AxisParam::L, ModelConfig::Shor { l, .. }) => *l = v,
            (AxisParam::NL, ModelConfig::Shor { .. }) => n_l = Some(v),
            _ => {}
        }
    }
    if let (Some(n), ModelConfig::Shor { l, n_tot }) = (n_l, &mut model) {
        *n_tot = n * *l;
    }
    scheme.validate()?;
    Ok((scheme, model))
}

pub fn sweep(scheme: &FtScheme, c: &SweepConfig) -> Result<SweepResult, CliError> {
    validate_sweep(c)?;
    let values: Vec<Vec<f64>> = c.axes.iter().map(Axis::values).collect();
    // outer axis varies slowest
    let points: Vec<Vec<f64>> = match values.as_slice() {
        [a] => a.iter().map(|&x| vec![x]).collect(),
        [a, b] => a.iter().flat_map(|&x| b.iter().map(move |&y| vec![x, y])).collect(),
        _ => unreachable!("validated axis count"),
    };
    let rows: Vec<SweepRow> = points
        .into_par_iter()
        .map(|point| -> Result<SweepRow, CliError> {
            let (s, m) = apply_point(scheme, &c.model, &c.axes, &point)?;
            let model = m.build(&s).map_err(|e| CliError::Usage(format!("at sweep point {point:?}: {e}")))?;
            let r: OptResult = find_kmax(&s, &model, c.k_cap)?;
            Ok(SweepRow { point, k_max: r.k_max, log10_p_min: r.log10_p_min, status: r.status, p_min: linear(r.log10_p_min) })
        })
        .collect::<Result<_, _>>()?;
    let mut columns: Vec<String> = c.axes.iter().map(|a| a.name.name().to_string()).collect();
    columns.extend(SWEEP_OUTPUT_COLUMNS.iter().map(|s| s.to_string()));
    Ok(SweepResult { columns, rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct PauliErrors {
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GateResult {
    pub pulse: PulseParams,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
    pub asymptotic: PauliErrors,
    pub rwa_marginal: Option<bool>,
    pub channel: QubitChannel,
}

pub fn gatesim(c: &GateConfig) -> Result<GateResult, CliError> {
    let mut spec = GateSpec::new(c.theta, c.gamma, c.n_g)?;
    if let Some(w) = c.omega0 {
        spec = spec.with_omega0(w)?;
    }
    let channel = evolve_noisy_gate(&spec)?;
    let [ax, ay, az] = asymptotic_pauli_errors(c.n_g);
    Ok(GateResult {
        pulse: pulse_params(&spec),
        p_x: channel.p_x(),
        p_y: channel.p_y(),
        p_z: channel.p_z(),
        asymptotic: PauliErrors { p_x: ax, p_y: ay, p_z: az },
        rwa_marginal: spec.rwa_margin().map(|m| m <= ftscale::gate_sim::RWA_WARN_MARGIN),
        channel,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CrosstalkSummary {
    pub t0_delta: f64,
    pub beta: f64,
    pub threshold: f64,
    pub k_max: u32,
    pub log10_p_min: LogProb,
    pub status: OptStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct LongRangeResult {
    pub lattice: LatticeSpec,
    /// Absent when the interaction is short-ranged (`z > d`).
    pub asymptotic: Option<f64>,
    pub comparison: Option<OracleComparison>,
    pub crosstalk: Option<CrosstalkSummary>,
}

pub fn longrange(scheme: &FtScheme, c: &LongRangeConfig) -> Result<LongRangeResult, CliError> {
    check_k_cap(c.k_cap)?;
    let spec = c.lattice_spec()?;
    let asymptotic = match delta0_asymptotic(&spec, c.kappa) {
        Ok(v) => Some(v),
        Err(ftscale::Error::ShortRanged { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let comparison = if c.compare {
        let oracle = delta_lattice_oracle(&spec)?;
        Some(match asymptotic {
            Some(a) => OracleComparison { n0: spec.n0, oracle, asymptotic: a, rel_err: ((a - oracle) / oracle).abs() },
            None => OracleComparison { n0: spec.n0, oracle, asymptotic: f64::NAN, rel_err: f64::NAN },
        })
    } else {
        None
    };
    let crosstalk = match c.t0_delta {
        None => None,
        Some(t) => {
            let beta = (1.0 - spec.z / f64::from(spec.d)).max(0.0);
            let r = optimize_crosstalk(scheme, t, beta, c.k_cap)?;
            Some(CrosstalkSummary {
                t0_delta: t,
                beta,
                threshold: crosstalk_usefulness_threshold(scheme.b, scheme.d, beta),
                k_max: r.k_max,
                log10_p_min: r.log10_p_min,
                status: r.status,
            })
        }
    };
    Ok(LongRangeResult { lattice: spec, asymptotic, comparison, crosstalk })
}

#[derive(Clone, Debug, Serialize)]
pub struct ShorResult {
    pub p_err: f64,
    pub log10_p_err: f64,
    /// `given` or `minimum`.
    pub n_l_source: &'static str,
    #[serde(rename = "n_L")]
    pub n_l: Option<f64>,
    pub k: Option<u32>,
    pub log10_p_min: Option<f64>,
    pub meets_target: bool,
    pub bill: Option<EnergyBill>,
    pub rwa: Option<RwaMargin>,
}

pub fn shor(scheme: &FtScheme, c: &ShorConfig) -> Result<ShorResult, CliError> {
    let problem = ShorProblem { r: c.r, l: c.l, p_target: c.p_target };
    problem.validate()?;
    let p_err = target_logical_error(&problem);
    let log10_p_err = p_err.log10();
    let (source, point) = match c.n_l {
        Some(n_l) => {
            let r = optimize_photon_budget(&problem, n_l, scheme)?;
            ("given", Some((n_l, r.k_max, r.log10_p_min.log10())))
        }
        None => match min_photon_budget(&problem, scheme)? {
            PhotonBudget::Feasible { n_l, k, log10_p_min, .. } => ("minimum", Some((n_l, k, log10_p_min))),
            PhotonBudget::Infeasible { .. } => ("minimum", None),
        },
    };
    let Some((n_l, k, log10_p_min)) = point else {
        return Ok(ShorResult {
            p_err,
            log10_p_err,
            n_l_source: source,
            n_l: None,
            k: None,
            log10_p_min: None,
            meets_target: false,
            bill: None,
            rwa: None,
        });
    };
    let bill = energy_bill(&problem, n_l, k, c.gamma, c.omega0, scheme)?;
    let rwa = rwa_margin(n_l, k, c.gamma, c.omega0, scheme)?;
    if rwa.marginal {
        log::warn!("rotating-wave margin {:.3} <= 100; the gate model is marginal", rwa.ratio);
    }
    Ok(ShorResult {
        p_err,
        log10_p_err,
        n_l_source: source,
        n_l: Some(n_l),
        k: Some(k),
        log10_p_min: Some(log10_p_min),
        meets_target: log10_p_min <= log10_p_err,
        bill: Some(bill),
        rwa: Some(rwa),
    })
}

pub fn fit(scheme: &FtScheme, c: &FitConfig) -> Result<FitResult, CliError> {
    let samples: Vec<(u32, f64)> = c.samples.iter().map(|s| (s.k, s.eta)).collect();
    Ok(fit_noise_model(&samples, c.variant.into(), scheme.d)?)
}
