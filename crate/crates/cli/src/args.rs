//! Command-line flags and their translation into a [`RunConfig`].

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ftscale::concat::DEFAULT_K_CAP;

use crate::config::*;
use crate::error::CliError;
use crate::run::Format;

#[derive(Debug, Parser)]
#[command(name = "ftscale", version, about = "Optimal concatenation depth under scale-dependent noise")]
pub struct Cli {
    /// Scheme preset name or explicit constants `A,A',B,D,M`.
    #[arg(long, global = true)]
    pub scheme: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Run a JSON configuration (or a previous report) instead of a subcommand.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Print the JSON schema of run configurations and exit.
    #[arg(long)]
    pub print_schema: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Logical-error curve and optimal level for one noise law.
    Optimize(OptimizeArgs),
    /// Optimal level over a grid of one or two parameters.
    Sweep(SweepArgs),
    /// Noise channel of a photon-driven rotation.
    Gatesim(GateArgs),
    /// Long-range lattice sums and crosstalk.
    Longrange(LongRangeArgs),
    /// Photon and energy budget for Shor's algorithm.
    Shor(ShorArgs),
    /// Fit an affine or exponential law to measured errors.
    Fit(FitArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Affine,
    Exp,
    Table,
    Shor,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    #[arg(long)]
    pub eta0: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Comma-separated f(0), f(1), ... for the table law.
    #[arg(long = "f", value_delimiter = ',')]
    pub f_values: Option<Vec<f64>>,
    /// Logical gate count for the Shor law.
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Total photon budget for the Shor law.
    #[arg(long)]
    pub n_tot: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_K_CAP)]
    pub kcap: u32,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// `name:min:max:count[:lin|log]`; at most two, the first varies slowest.
    #[arg(long = "axis", required = true, value_parser = Axis::parse)]
    pub axes: Vec<Axis>,
    #[arg(long, default_value_t = DEFAULT_K_CAP)]
    pub kcap: u32,
}

#[derive(Debug, Args)]
pub struct GateArgs {
    /// Rotation angle: a number, `pi`, `pi/N`, `Kpi` or `Kpi/N`.
    #[arg(long, value_parser = parse_angle)]
    pub theta: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long = "ng")]
    pub n_g: f64,
    #[arg(long)]
    pub omega0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LongRangeArgs {
    #[arg(long, value_enum)]
    pub lattice: LatticeKind,
    #[arg(long)]
    pub z: f64,
    #[arg(long = "N0", value_parser = parse_count)]
    pub n0: u64,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Also run the direct lattice sum.
    #[arg(long)]
    pub compare: bool,
    /// Physical crosstalk strength `t0 Delta^(0)`.
    #[arg(long)]
    pub t0_delta: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_K_CAP)]
    pub kcap: u32,
}

#[derive(Debug, Args)]
pub struct ShorArgs {
    /// Key length in bits.
    #[arg(long = "R", value_parser = parse_count)]
    pub r: u64,
    /// Logical gate count; `R^2` when absent.
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long, default_value_t = 2.0 / 3.0)]
    pub p_target: f64,
    #[arg(long, default_value_t = 10.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1e10)]
    pub omega0: f64,
    /// Photons per logical gate; the minimum budget is searched when absent.
    #[arg(long = "n-L")]
    pub n_l: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub variant: FitKind,
    /// CSV file with header `k,eta`.
    #[arg(long, conflicts_with = "points")]
    pub data: Option<PathBuf>,
    /// Inline samples `k:eta,k:eta,...`.
    #[arg(long)]
    pub points: Option<String>,
}

/// Parses a non-negative integer, also accepting forms like `1e3`.
pub fn parse_count(text: &str) -> Result<u64, String> {
    if let Ok(v) = text.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = text.parse().map_err(|_| format!("`{text}` is not a count"))?;
    if v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(63) {
        Ok(v as u64)
    } else {
        Err(format!("`{text}` is not a non-negative integer"))
    }
}

/// Parses `1.57`, `pi`, `pi/2`, `2pi`, `3*pi/4`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let bad = || format!("`{text}` is not an angle (number, pi, pi/N, Kpi, Kpi/N)");
    let Some((coef, rest)) = t.split_once("pi") else {
        return t.parse().map_err(|_| bad());
    };
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let k: f64 = if coef.is_empty() { 1.0 } else { coef.parse().map_err(|_| bad())? };
    let n: f64 = match rest.strip_prefix('/') {
        Some(den) => den.parse().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    if n == 0.0 {
        return Err(bad());
    }
    Ok(k * PI / n)
}

fn parse_points(text: &str) -> Result<Vec<Sample>, String> {
    text.split(',')
        .map(|pair| {
            let (k, eta) = pair.split_once(':').ok_or_else(|| format!("sample `{pair}` must be k:eta"))?;
            Ok(Sample {
                k: k.trim().parse().map_err(|_| format!("bad level `{k}`"))?,
                eta: eta.trim().parse().map_err(|_| format!("bad error rate `{eta}`"))?,
            })
        })
        .collect()
}

fn read_samples(path: &PathBuf) -> Result<Vec<Sample>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    reader
        .deserialize()
        .collect::<Result<Vec<Sample>, _>>()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn need(v: Option<f64>, flag: &str, model: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --model {model}")))
}

impl ModelArgs {
    /// `fill` supplies values for parameters a sweep axis will override.
    fn to_config(&self, fill: &dyn Fn(&str) -> Option<f64>) -> Result<ModelConfig, CliError> {
        let pick = |v: Option<f64>, name: &str| v.or_else(|| fill(name));
        Ok(match self.model {
            ModelKind::Affine => ModelConfig::Affine {
                eta0: need(pick(self.eta0, "eta0"), "eta0", "affine")?,
                c: need(pick(self.c, "c"), "c", "affine")?,
            },
            ModelKind::Exp => ModelConfig::Exp {
                eta0: need(pick(self.eta0, "eta0"), "eta0", "exp")?,
                beta: need(pick(self.beta, "beta"), "beta", "exp")?,
            },
            ModelKind::Table => ModelConfig::Table {
                eta0: need(pick(self.eta0, "eta0"), "eta0", "table")?,
                f_values: self.f_values.clone().ok_or_else(|| CliError::Usage("--f is required for --model table".into()))?,
            },
            ModelKind::Shor => {
                let l = need(pick(self.l, "L"), "L", "shor")?;
                ModelConfig::Shor { l, n_tot: need(pick(self.n_tot, "n_tot").or_else(|| fill("n_L").map(|n| n * l)), "n-tot", "shor")? }
            }
        })
    }
}

impl Command {
    /// Resolves flags and defaults into a complete configuration.
    pub fn to_config(&self, scheme: SchemeConfig) -> Result<RunConfig, CliError> {
        let command = match self {
            Command::Optimize(a) => {
                CommandConfig::Optimize(OptimizeConfig { model: a.model.to_config(&|_| None)?, k_cap: a.kcap })
            }
            Command::Sweep(a) => {
                let scheme_b = scheme.resolve()?.b as f64;
                let fill = |name: &str| -> Option<f64> {
                    a.axes.iter().find_map(|axis| match (axis.name, name) {
                        (AxisParam::Eta0, "eta0") => Some(axis.min),
                        (AxisParam::BEta0, "eta0") => Some(axis.min / scheme_b),
                        _ if axis.name.name() == name => Some(axis.min),
                        _ => None,
                    })
                };
                let config = SweepConfig { model: a.model.to_config(&fill)?, axes: a.axes.clone(), k_cap: a.kcap };
                crate::run::validate_sweep(&config)?;
                CommandConfig::Sweep(config)
            }
            Command::Gatesim(a) => {
                CommandConfig::Gatesim(GateConfig { theta: a.theta, gamma: a.gamma, n_g: a.n_g, omega0: a.omega0 })
            }
            Command::Longrange(a) => CommandConfig::Longrange(LongRangeConfig {
                lattice: a.lattice,
                z: a.z,
                n0: a.n0,
                delta: a.delta,
                a: a.a,
                kappa: a.kappa,
                compare: a.compare,
                t0_delta: a.t0_delta,
                k_cap: a.kcap,
            }),
            Command::Shor(a) => CommandConfig::Shor(ShorConfig {
                r: a.r,
                l: a.l.unwrap_or((a.r as f64) * (a.r as f64)),
                p_target: a.p_target,
                gamma: a.gamma,
                omega0: a.omega0,
                n_l: a.n_l,
            }),
            Command::Fit(a) => {
                let samples = match (&a.data, &a.points) {
                    (Some(path), _) => read_samples(path)?,
                    (None, Some(text)) => parse_points(text).map_err(CliError::Usage)?,
                    (None, None) => return Err(CliError::Usage("fit needs --data or --points".into())),
                };
                CommandConfig::Fit(FitConfig { variant: a.variant, samples })
            }
        };
        Ok(RunConfig { scheme, command })
    }
}

/// Reads a configuration file, accepting either a bare configuration or a
/// report whose `config` field holds one.
pub fn load_config(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let inner = match value.get("config") {
        Some(c) if value.get("result").is_some() => c.clone(),
        _ => value,
    };
    serde_json::from_value(inner).map_err(|e| CliError::Usage(format!("{}: invalid configuration: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e3").unwrap(), 1000);
        assert_eq!(parse_count("10001").unwrap(), 10001);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-2").is_err());
    }

    #[test]
    fn axes() {
        let a = Axis::parse("c:0:10:101").unwrap();
        assert_eq!(a.spacing, Spacing::Lin);
        assert_eq!(a.values().len(), 101);
        assert_eq!(a.values()[100], 10.0);
        let a = Axis::parse("n_L:1e3:1e9:7:log").unwrap();
        assert!((a.values()[1] - 1e4).abs() < 1e-6);
        assert!(Axis::parse("c:1:0:3").is_err());
        assert!(Axis::parse("c:0:1:0").is_err());
        assert!(Axis::parse("q:0:1:2").is_err());
        assert!(Axis::parse("eta0:0:1:2:log").is_err());
    }

    #[test]
    fn schemes() {
        assert_eq!(SchemeConfig::parse("aliferis2006").unwrap(), SchemeConfig::Preset("aliferis2006".into()));
        let SchemeConfig::Constants(c) = SchemeConfig::parse("575,291,10000,291,3").unwrap() else { panic!() };
        assert_eq!((c.a, c.b, c.m), (575, 10000, 3));
        assert!(SchemeConfig::parse("1,2,3").is_err());
    }
}
