//! Exact sampling from the joint lifetime model and Monte Carlo estimates
//! of the quantities the analytic modules compute.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{run_substreams, MeanAccumulator};
use crate::error::{Error, Result};
use crate::system::SystemSpec;

/// Substream count used when none is given.
pub const DEFAULT_SUBSTREAMS: usize = 64;

/// Fewest draws a conditional mean is computed from.
pub const MIN_CONDITIONING_DRAWS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct JointSample {
    pub z: Vec<f64>,
    pub standby: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "at")]
pub enum Target {
    SurvivalAt(Vec<f64>),
    Psi1At(Vec<f64>),
    Psi2At(Vec<f64>),
    Psi3At(Vec<f64>),
    Mttf,
}

impl Target {
    fn name(&self) -> &'static str {
        match self {
            Target::SurvivalAt(_) => "survival_t",
            Target::Psi1At(_) => "psi1",
            Target::Psi2At(_) => "psi2",
            Target::Psi3At(_) => "psi3",
            Target::Mttf => "mttf",
        }
    }

    fn points(&self) -> &[f64] {
        match self {
            Target::SurvivalAt(p) | Target::Psi1At(p) | Target::Psi2At(p) | Target::Psi3At(p) => p,
            Target::Mttf => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetEstimate {
    pub quantity: String,
    /// Time argument; absent for the mean time to failure.
    pub at: Option<f64>,
    pub value: f64,
    pub standard_error: f64,
    /// Draws that entered the estimate.
    pub draws: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub sample_count: usize,
    pub seed: u64,
    pub proposals: u64,
    pub acceptance_rate: f64,
    pub estimates: Vec<TargetEstimate>,
}

/// Rejection sampler on the copula scale with the corner maximum of the
/// density as envelope.
struct Sampler<'a> {
    spec: &'a SystemSpec,
    bound: f64,
}

impl<'a> Sampler<'a> {
    fn new(spec: &'a SystemSpec) -> Result<Self> {
        let report = spec.copula().validate();
        if !report.is_proper_density {
            return Err(Error::ImproperDensity { min_corner: report.min_corner_density });
        }
        let bound = report.max_corner_density;
        if 1.0 / bound < 1e-3 {
            return Err(Error::Efficiency { rate: 1.0 / bound });
        }
        Ok(Self { spec, bound })
    }

    /// Fills `z` and returns the standby lifetime and the proposals used.
    fn draw(&self, rng: &mut ChaCha8Rng, u: &mut [f64], z: &mut [f64]) -> (f64, u64) {
        let copula = self.spec.copula();
        let mut proposals = 0;
        loop {
            proposals += 1;
            u.iter_mut().for_each(|x| *x = rng.random::<f64>());
            let accept = rng.random::<f64>() * self.bound;
            if accept < copula.density_unchecked(u) {
                break;
            }
        }
        let f = self.spec.component();
        for (zi, &ui) in z.iter_mut().zip(u.iter()) {
            *zi = f.quantile_unchecked(ui);
        }
        (self.spec.standby().quantile_unchecked(u[u.len() - 1]), proposals)
    }
}

/// `count` draws of `(component lifetimes, standby lifetime)` from the
/// joint model. Deterministic for fixed `(count, seed)`.
pub fn sample_joint(spec: &SystemSpec, count: usize, seed: u64) -> Result<Vec<JointSample>> {
    let sampler = Sampler::new(spec)?;
    let n = spec.n();
    let parts = run_substreams(seed, count, DEFAULT_SUBSTREAMS, |m, rng| {
        let mut u = vec![0.0; n + 1];
        (0..m)
            .map(|_| {
                let mut z = vec![0.0; n];
                let (standby, _) = sampler.draw(rng, &mut u, &mut z);
                JointSample { z, standby }
            })
            .collect::<Vec<_>>()
    });
    Ok(parts.into_iter().flatten().collect())
}

pub fn simulate_metrics(spec: &SystemSpec, targets: &[Target], count: usize, seed: u64) -> Result<SimulationResult> {
    simulate_metrics_with(spec, targets, count, seed, DEFAULT_SUBSTREAMS)
}

/// [`simulate_metrics`] with an explicit substream count.
pub fn simulate_metrics_with(
    spec: &SystemSpec,
    targets: &[Target],
    count: usize,
    seed: u64,
    substreams: usize,
) -> Result<SimulationResult> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    for t in targets {
        if let Some(bad) = t.points().iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::Domain(format!("{} point {bad} must be finite and >= 0", t.name())));
        }
    }
    let sampler = Sampler::new(spec)?;
    let n = spec.n();
    let slots: usize = targets.iter().map(|t| t.points().len().max(1)).sum();
    let parts = run_substreams(seed, count, substreams, |m, rng| {
        let mut u = vec![0.0; n + 1];
        let mut z = vec![0.0; n];
        let mut acc = vec![MeanAccumulator::default(); slots];
        let mut proposals = 0u64;
        for _ in 0..m {
            let (standby, p) = sampler.draw(rng, &mut u, &mut z);
            proposals += p;
            let l = spec.lifetimes_in_place(&mut z, standby);
            let mut slot = 0;
            for t in targets {
                match t {
                    Target::Mttf => {
                        acc[slot].push(l.system);
                        slot += 1;
                    }
                    Target::SurvivalAt(ps) => {
                        for &s in ps {
                            acc[slot].push(if l.system > s { 1.0 } else { 0.0 });
                            slot += 1;
                        }
                    }
                    Target::Psi1At(ps) | Target::Psi2At(ps) | Target::Psi3At(ps) => {
                        let event = match t {
                            Target::Psi1At(_) => l.system,
                            Target::Psi2At(_) => l.k_out_of_n_failure,
                            _ => l.first_failure,
                        };
                        for &s in ps {
                            if event > s {
                                acc[slot].push(l.system - s);
                            }
                            slot += 1;
                        }
                    }
                }
            }
        }
        (acc, proposals)
    });

    let mut acc = vec![MeanAccumulator::default(); slots];
    let mut proposals = 0;
    for (part, p) in &parts {
        proposals += p;
        for (a, b) in acc.iter_mut().zip(part) {
            a.merge(b);
        }
    }
    let mut estimates = Vec::with_capacity(slots);
    let mut slot = 0;
    for t in targets {
        let points: Vec<Option<f64>> = match t {
            Target::Mttf => vec![None],
            _ => t.points().iter().map(|&p| Some(p)).collect(),
        };
        for at in points {
            let a = &acc[slot];
            slot += 1;
            if (a.count as usize) < MIN_CONDITIONING_DRAWS {
                return Err(Error::InsufficientConditioning {
                    event: format!("{} at {}", t.name(), at.unwrap_or(0.0)),
                    count: a.count as usize,
                });
            }
            estimates.push(TargetEstimate {
                quantity: t.name().to_string(),
                at,
                value: a.mean(),
                standard_error: a.standard_error(),
                draws: a.count,
            });
        }
    }
    Ok(SimulationResult {
        sample_count: count,
        seed,
        proposals,
        acceptance_rate: count as f64 / proposals as f64,
        estimates,
    })
}
