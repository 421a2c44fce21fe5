//! JSON run configuration read by the command-line tool.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::copulas::{CopulaModel, Fgm4Params};
use crate::engine::EvalConfig;
use crate::error::{Error, Result};
use crate::marginals::MarginalModel;
use crate::simulate::Target;
use crate::system::SystemSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarginalConfig {
    Exponential { rate: f64 },
    Lomax { shape: f64, scale: f64 },
    Weibull { shape: f64, scale: f64 },
    /// `(time, cdf)` knots of a piecewise-linear CDF.
    Tabulated { points: Vec<(f64, f64)> },
}

impl MarginalConfig {
    pub fn build(&self) -> Result<MarginalModel> {
        match self {
            MarginalConfig::Exponential { rate } => MarginalModel::exponential(*rate),
            MarginalConfig::Lomax { shape, scale } => MarginalModel::lomax(*shape, *scale),
            MarginalConfig::Weibull { shape, scale } => MarginalModel::weibull(*shape, *scale),
            MarginalConfig::Tabulated { points } => MarginalModel::tabulated(points.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum CopulaConfig {
    Independence {},
    Fgm4 {
        theta11: f64,
        theta12: f64,
        theta21: f64,
        theta22: f64,
        theta31: f64,
    },
    FgmPairwise { theta_cc: f64, theta_cs: f64 },
}

impl CopulaConfig {
    /// Builds the copula for `n` components plus the standby.
    pub fn build(&self, n: usize) -> Result<CopulaModel> {
        match *self {
            CopulaConfig::Independence {} => CopulaModel::independence(n + 1),
            CopulaConfig::Fgm4 { theta11, theta12, theta21, theta22, theta31 } => {
                CopulaModel::fgm4(Fgm4Params::new(theta11, theta12, theta21, theta22, theta31))
            }
            CopulaConfig::FgmPairwise { theta_cc, theta_cs } => CopulaModel::fgm_pairwise(n + 1, theta_cc, theta_cs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n: usize,
    pub k: usize,
    pub marginal: MarginalConfig,
    /// Defaults to the component marginal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standby_marginal: Option<MarginalConfig>,
    pub copula: CopulaConfig,
}

impl SystemConfig {
    pub fn build(&self) -> Result<SystemSpec> {
        let component = self.marginal.build()?;
        let standby = match &self.standby_marginal {
            Some(m) => m.build()?,
            None => component.clone(),
        };
        let copula = self.copula.build(self.n)?;
        SystemSpec::new(self.n, self.k, component, standby, copula)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridConfig {
    /// Parses `start:stop:points`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || Error::Config(format!("grid `{spec}` is not start:stop:points"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let g = GridConfig {
            start: parts[0].trim().parse().map_err(|_| bad())?,
            stop: parts[1].trim().parse().map_err(|_| bad())?,
            points: parts[2].trim().parse().map_err(|_| bad())?,
        };
        g.values()?;
        Ok(g)
    }

    /// Evenly spaced, strictly increasing, nonnegative points.
    pub fn values(&self) -> Result<Vec<f64>> {
        let GridConfig { start, stop, points } = *self;
        if points == 0 {
            return Err(Error::Config("grid.points must be >= 1".into()));
        }
        if !(start.is_finite() && stop.is_finite() && start >= 0.0) {
            return Err(Error::Config(format!("grid [{start}, {stop}] must be finite with start >= 0")));
        }
        if points == 1 {
            return Ok(vec![start]);
        }
        if !(stop > start) {
            return Err(Error::Config(format!("grid stop {stop} must exceed start {start}")));
        }
        let step = (stop - start) / (points - 1) as f64;
        Ok((0..points).map(|i| if i + 1 == points { stop } else { start + step * i as f64 }).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub count: usize,
    pub targets: Vec<Target>,
}

/// Published values to compare a table row against. Any cell may be absent.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceValues {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mttf_bare: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mttf_standby: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_rate_bare: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_rate_standby: Option<f64>,
}

fn default_unit_cost() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub system: SystemConfig,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default = "default_unit_cost", skip_serializing_if = "is_one")]
    pub unit_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceValues>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Field-level checks that need no model construction.
    pub fn check(&self) -> Result<()> {
        self.eval.validate()?;
        if let Some(g) = &self.grid {
            g.values()?;
        }
        if !(self.unit_cost.is_finite() && self.unit_cost > 0.0) {
            return Err(Error::Config(format!("unit_cost = {} must be > 0", self.unit_cost)));
        }
        if let Some(s) = &self.simulate {
            if s.count == 0 {
                return Err(Error::Config("simulate.count must be >= 1".into()));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<SystemSpec> {
        self.system.build()
    }
}
