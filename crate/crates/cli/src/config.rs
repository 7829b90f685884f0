//! Fully resolved run configurations. A report embeds the configuration that
//! produced it, so feeding a report back through `--config` reruns it.

use ftscale::long_range::{Aspect, LatticeSpec};
use ftscale::scheme::FitVariant;
use ftscale::{FtScheme, NoiseModel};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: SchemeConfig,
    pub command: CommandConfig,
}

/// A preset name or the five scheme constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum SchemeConfig {
    Preset(String),
    Constants(SchemeConstants),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SchemeConstants {
    #[serde(rename = "A")]
    pub a: u64,
    #[serde(rename = "A_prime")]
    pub a_prime: u64,
    #[serde(rename = "B")]
    pub b: u64,
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(rename = "M")]
    pub m: u64,
}

impl SchemeConfig {
    pub fn resolve(&self) -> Result<FtScheme, CliError> {
        Ok(match self {
            SchemeConfig::Preset(name) => FtScheme::preset(name)?,
            SchemeConfig::Constants(c) => FtScheme::new(c.a, c.a_prime, c.b, c.d, c.m)?,
        })
    }

    /// Parses `aliferis2006` or `A,A',B,D,M`.
    pub fn parse(text: &str) -> Result<Self, String> {
        if !text.contains(',') {
            return Ok(SchemeConfig::Preset(text.trim().to_string()));
        }
        let parts: Vec<u64> = text
            .split(',')
            .map(|p| p.trim().parse::<u64>().map_err(|e| format!("bad scheme constant `{p}`: {e}")))
            .collect::<Result<_, _>>()?;
        let [a, a_prime, b, d, m] = parts[..] else {
            return Err(format!("expected five constants A,A',B,D,M, got {}", parts.len()));
        };
        Ok(SchemeConfig::Constants(SchemeConstants { a, a_prime, b, d, m }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum CommandConfig {
    Optimize(OptimizeConfig),
    Sweep(SweepConfig),
    Gatesim(GateConfig),
    Longrange(LongRangeConfig),
    Shor(ShorConfig),
    Fit(FitConfig),
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Optimize(_) => "optimize",
            CommandConfig::Sweep(_) => "sweep",
            CommandConfig::Gatesim(_) => "gatesim",
            CommandConfig::Longrange(_) => "longrange",
            CommandConfig::Shor(_) => "shor",
            CommandConfig::Fit(_) => "fit",
        }
    }
}

/// Noise law; the Shor law takes its `A` from the scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Affine { eta0: f64, c: f64 },
    Exp { eta0: f64, beta: f64 },
    Table { eta0: f64, f_values: Vec<f64> },
    Shor {
        #[serde(rename = "L")]
        l: f64,
        n_tot: f64,
    },
}

impl ModelConfig {
    pub fn build(&self, scheme: &FtScheme) -> Result<NoiseModel, CliError> {
        Ok(match self {
            ModelConfig::Affine { eta0, c } => NoiseModel::affine(*eta0, *c)?,
            ModelConfig::Exp { eta0, beta } => NoiseModel::exponential(*eta0, *beta)?,
            ModelConfig::Table { eta0, f_values } => NoiseModel::tabulated(*eta0, f_values.clone())?,
            ModelConfig::Shor { l, n_tot } => NoiseModel::shor_photon(*l, *n_tot, scheme.a)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub model: ModelConfig,
    pub k_cap: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Lin,
    Log,
}

/// Parameters a sweep axis can drive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub enum AxisParam {
    #[serde(rename = "eta0")]
    Eta0,
    /// `B eta0`, with `B` from the scheme.
    #[serde(rename = "b_eta0")]
    BEta0,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "beta")]
    Beta,
    /// Photons per logical gate; sets `n_tot = n_L L`.
    #[serde(rename = "n_L")]
    NL,
    #[serde(rename = "L")]
    L,
    #[serde(rename = "B")]
    B,
    #[serde(rename = "D")]
    D,
}

impl AxisParam {
    pub const ALL: [AxisParam; 8] =
        [AxisParam::Eta0, AxisParam::BEta0, AxisParam::C, AxisParam::Beta, AxisParam::NL, AxisParam::L, AxisParam::B, AxisParam::D];

    pub fn name(self) -> &'static str {
        match self {
            AxisParam::Eta0 => "eta0",
            AxisParam::BEta0 => "b_eta0",
            AxisParam::C => "c",
            AxisParam::Beta => "beta",
            AxisParam::NL => "n_L",
            AxisParam::L => "L",
            AxisParam::B => "B",
            AxisParam::D => "D",
        }
    }

    pub fn parse(name: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|p| p.name() == name).ok_or_else(|| {
            let known: Vec<_> = Self::ALL.iter().map(|p| p.name()).collect();
            format!("unknown sweep parameter `{name}` (known: {})", known.join(", "))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: AxisParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    /// Parses `name:min:max:count[:lin|log]`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(format!("axis `{text}` must look like name:min:max:count[:lin|log]"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("bad number `{s}` in axis `{text}`: {e}"));
        let spacing = match parts.get(4).copied().unwrap_or("lin") {
            "lin" => Spacing::Lin,
            "log" => Spacing::Log,
            other => return Err(format!("spacing must be lin or log, got `{other}`")),
        };
        let axis = Axis {
            name: AxisParam::parse(parts[0])?,
            min: num(parts[1])?,
            max: num(parts[2])?,
            count: parts[3].parse().map_err(|e| format!("bad count `{}`: {e}", parts[3]))?,
            spacing,
        };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.count < 1 {
            return Err(format!("axis {} needs count >= 1", self.name.name()));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            return Err(format!("axis {} needs finite min <= max", self.name.name()));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(format!("log axis {} needs min > 0", self.name.name()));
        }
        if self.count == 1 && self.min != self.max {
            return Err(format!("axis {} has one point but min != max", self.name.name()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / n;
                match self.spacing {
                    Spacing::Lin => self.min + (self.max - self.min) * t,
                    Spacing::Log => 10f64.powf(self.min.log10() + (self.max.log10() - self.min.log10()) * t),
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelConfig,
    pub axes: Vec<Axis>,
    pub k_cap: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GateConfig {
    pub theta: f64,
    pub gamma: f64,
    pub n_g: f64,
    pub omega0: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct LongRangeConfig {
    pub lattice: LatticeKind,
    pub z: f64,
    #[serde(rename = "N0")]
    pub n0: u64,
    pub delta: f64,
    pub a: f64,
    pub kappa: Option<f64>,
    /// Also run the direct lattice sum and report the relative error.
    pub compare: bool,
    /// Physical crosstalk strength `t0 Delta^(0)`; enables the logical crosstalk optimum.
    pub t0_delta: Option<f64>,
    pub k_cap: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Chain,
    Square,
}

impl LongRangeConfig {
    pub fn lattice_spec(&self) -> Result<LatticeSpec, CliError> {
        let (d, aspect) = match self.lattice {
            LatticeKind::Chain => (1, Aspect::Chain),
            LatticeKind::Square => (2, Aspect::Square),
        };
        let spec = LatticeSpec { d, z: self.z, delta: self.delta, a: self.a, n0: self.n0, aspect };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ShorConfig {
    #[serde(rename = "R")]
    pub r: u64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "P_target")]
    pub p_target: f64,
    pub gamma: f64,
    pub omega0: f64,
    /// Photons per logical gate; the minimum budget is searched when absent.
    #[serde(rename = "n_L")]
    pub n_l: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    Affine,
    Exp,
}

impl From<FitKind> for FitVariant {
    fn from(k: FitKind) -> Self {
        match k {
            FitKind::Affine => FitVariant::Affine,
            FitKind::Exp => FitVariant::Exponential,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Sample {
    pub k: u32,
    pub eta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub variant: FitKind,
    pub samples: Vec<Sample>,
}
