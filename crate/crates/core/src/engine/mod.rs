//! Numerical machinery shared by the analytic modules: adaptive quadrature,
//! deterministic Monte Carlo substreams, and the two evaluation routes for
//! the standby integral (factored quadrature and importance-weighted Monte
//! Carlo).

mod quadrature;
mod standby;
mod streams;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use quadrature::{integrate_1d, try_integrate_1d};
pub(crate) use quadrature::try_integrate_graded;
pub use standby::{factored_integral_standby, mc_integral_standby};
pub(crate) use standby::{factored_window, mc_window, Window};
pub(crate) use streams::{run_substreams, MeanAccumulator};

/// Tolerances, truncation and sampling settings for every evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub quad_rel_tol: f64,
    pub quad_abs_tol: f64,
    pub quad_max_depth: u32,
    pub mc_samples: usize,
    pub seed: u64,
    /// Probability mass left beyond the truncation point of infinite limits.
    pub tail_cut: f64,
    /// Number of RNG substreams Monte Carlo work is split into. Results are
    /// bit-identical for a fixed value regardless of thread count.
    pub substreams: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            quad_rel_tol: 1e-8,
            quad_abs_tol: 1e-10,
            quad_max_depth: 50,
            mc_samples: 1_000_000,
            seed: 42,
            tail_cut: 1e-10,
            substreams: 64,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.quad_rel_tol > 0.0) {
            bad.push(format!("quad_rel_tol = {} must be > 0", self.quad_rel_tol));
        }
        if !(self.quad_abs_tol > 0.0) {
            bad.push(format!("quad_abs_tol = {} must be > 0", self.quad_abs_tol));
        }
        if self.quad_max_depth == 0 {
            bad.push("quad_max_depth must be >= 1".to_string());
        }
        if self.mc_samples < 1000 {
            bad.push(format!("mc_samples = {} must be >= 1000", self.mc_samples));
        }
        if !(self.tail_cut > 0.0 && self.tail_cut <= 1e-4) {
            bad.push(format!("tail_cut = {} must lie in (0, 1e-4]", self.tail_cut));
        }
        if self.substreams == 0 {
            bad.push("substreams must be >= 1".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad.join("; ")))
        }
    }
}

/// Which route produced an [`Estimate`]. Ordered by how much numerical
/// approximation is involved; combining estimates keeps the larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPath {
    ClosedForm,
    Quadrature,
    FactoredQuadrature,
    MonteCarlo,
}

impl EvalPath {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalPath::ClosedForm => "closed_form",
            EvalPath::Quadrature => "quadrature",
            EvalPath::FactoredQuadrature => "factored_quadrature",
            EvalPath::MonteCarlo => "monte_carlo",
        }
    }
}

/// A value with an error bound: a quadrature error estimate, or one
/// standard error for Monte Carlo results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error_bound: f64,
    pub path: EvalPath,
}

impl Estimate {
    pub fn new(value: f64, error_bound: f64, path: EvalPath) -> Self {
        Self { value, error_bound: error_bound.abs(), path }
    }

    pub fn closed_form(value: f64) -> Self {
        Self::new(value, 0.0, EvalPath::ClosedForm)
    }

    pub fn scale(self, factor: f64) -> Self {
        Self::new(self.value * factor, self.error_bound * factor.abs(), self.path)
    }

    /// `self / denom` with first-order error propagation.
    pub fn ratio(self, denom: Estimate) -> Self {
        let v = self.value / denom.value;
        let e = self.error_bound / denom.value.abs()
            + self.value.abs() * denom.error_bound / (denom.value * denom.value);
        Self::new(v, e, self.path.max(denom.path))
    }

    pub fn with_path(self, path: EvalPath) -> Self {
        Self { path, ..self }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;

    fn add(self, rhs: Estimate) -> Estimate {
        Estimate::new(
            self.value + rhs.value,
            self.error_bound + rhs.error_bound,
            self.path.max(rhs.path),
        )
    }
}

impl std::ops::Sub for Estimate {
    type Output = Estimate;

    fn sub(self, rhs: Estimate) -> Estimate {
        Estimate::new(
            self.value - rhs.value,
            self.error_bound + rhs.error_bound,
            self.path.max(rhs.path),
        )
    }
}
