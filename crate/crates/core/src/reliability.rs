//! Survival functions, mean time to failure and cost rates of the bare
//! k-out-of-n system and of the system with its cold standby.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::copulas::CopulaFamily;
use crate::engine::{
    factored_window, mc_window, run_substreams, try_integrate_1d, try_integrate_graded, EvalConfig, EvalPath,
    Estimate, MeanAccumulator, Window,
};
use crate::error::{domain, Error, Result};
use crate::system::{binomial, SystemSpec};

/// How the standby integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContributionPath {
    /// Factored quadrature when the model allows it, Monte Carlo otherwise.
    #[default]
    Auto,
    Factored,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lifetime {
    /// The k-out-of-n system alone, `Z_{n-k+1:n}`.
    Bare,
    /// The system including its cold standby, `T`.
    Standby,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostRates {
    pub unit_cost: f64,
    pub mttf_bare: Estimate,
    pub mttf_standby: Estimate,
    /// `n * unit_cost / mttf_bare`.
    pub cost_rate_bare: f64,
    /// `(n + 1) * unit_cost / mttf_standby`.
    pub cost_rate_standby: f64,
}

pub(crate) fn check_time(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("time {s} must be finite and >= 0")))
    }
}

/// `P(Z_{n-k+1:n} > s)` by inclusion–exclusion over diagonal copula values.
pub fn survival_kn(spec: &SystemSpec, s: f64) -> Result<Estimate> {
    check_time(s)?;
    let n = spec.n();
    let k = spec.k();
    let fs = spec.component().cdf(s)?;
    let copula = spec.copula();
    let mut sum = AlternatingSum::default();
    sum.add(1.0);
    for i in (n - k + 1)..=n {
        let sign = if (i + k - n - 1).is_multiple_of(2) { -1.0 } else { 1.0 };
        let weight = (binomial(n, i) * binomial(i - 1, n - k)) as f64;
        sum.add(sign * weight * copula.cdf_blocks(&[(fs, i)])?);
    }
    Ok(Estimate::closed_form(sum.value()))
}

/// Sum of signed terms that reports zero once the total is below the
/// rounding noise of its terms. Far in the tail the inclusion–exclusion
/// sums cancel to noise, and integrating that noise over a long range
/// stalls adaptive quadrature.
#[derive(Debug, Default)]
pub(crate) struct AlternatingSum {
    total: f64,
    magnitude: f64,
}

impl AlternatingSum {
    pub fn add(&mut self, x: f64) {
        self.total += x;
        self.magnitude += x.abs();
    }

    pub fn value(&self) -> f64 {
        if self.total.abs() <= 64.0 * f64::EPSILON * self.magnitude {
            0.0
        } else {
            self.total
        }
    }
}

/// The standby's share of the system survival at `s`:
/// `P(T > s, Z_{n-k+1:n} <= s)`.
pub fn standby_contribution(
    spec: &SystemSpec,
    s: f64,
    cfg: &EvalConfig,
    path: ContributionPath,
) -> Result<Estimate> {
    check_time(s)?;
    let window = Window::exceedance(0.0, s);
    match path {
        ContributionPath::Factored => factored_window(spec, &window, cfg),
        ContributionPath::MonteCarlo => mc_window(spec, &window, cfg),
        ContributionPath::Auto => match factored_window(spec, &window, cfg) {
            Err(Error::Unsupported(_)) => mc_window(spec, &window, cfg),
            other => other,
        },
    }
}

/// `P(T > s)`. The raw value is returned; signed copula densities can push
/// it slightly outside `[0, 1]`.
pub fn survival_t(spec: &SystemSpec, s: f64, cfg: &EvalConfig) -> Result<Estimate> {
    Ok(survival_kn(spec, s)? + standby_contribution(spec, s, cfg, ContributionPath::Auto)?)
}

/// `P(T > s)` through the factored route only; no Monte Carlo fallback, so
/// it is safe to use inside an outer quadrature.
pub(crate) fn survival_t_factored(spec: &SystemSpec, s: f64, cfg: &EvalConfig) -> Result<f64> {
    let c = factored_window(spec, &Window::exceedance(0.0, s), cfg)?;
    Ok(survival_kn(spec, s)?.value + c.value)
}

/// Single-integral closed form for the 2-out-of-3 system under the
/// four-dimensional FGM copula, transcribed term by term. Kept as an
/// independent check on the generic route.
pub fn survival_t_fgm_2of3(spec: &SystemSpec, s: f64, cfg: &EvalConfig) -> Result<Estimate> {
    check_time(s)?;
    let p = match spec.copula().family() {
        CopulaFamily::Fgm4(p) if spec.n() == 3 && spec.k() == 2 => *p,
        _ => {
            return Err(Error::Unsupported(
                "the FGM closed form covers only the 2-out-of-3 system with a four-dimensional FGM copula".into(),
            ))
        }
    };
    let f = spec.component();
    let g = spec.standby();
    if !f.has_density() {
        return Err(Error::Unsupported("the FGM closed form needs a component density".into()));
    }
    let (fs, sbar) = f.cdf_survival(s)?;
    let bare = 1.0 - 3.0 * fs * fs + 2.0 * fs.powi(3) - 3.0 * p.theta11 * fs * fs * sbar * sbar * (1.0 - 2.0 * fs)
        + 2.0 * p.theta21 * fs.powi(3) * sbar.powi(3);
    let integrand = |z: f64| -> Result<f64> {
        let (fz, fbz) = f.cdf_survival_unchecked(z);
        let (gw, gbw) = g.cdf_survival_unchecked((s - z).max(0.0));
        let bracket = 1.0 - (p.theta11 - p.theta22 * gw) * (fs * fbz + (fs - fbz) * (1.0 - 2.0 * fz))
            + p.theta12 * (fs - 2.0 + 3.0 * fz) * gw
            - (p.theta21 - p.theta31 * gw) * (1.0 - 2.0 * fz) * fs * fbz;
        Ok(bracket * fz * gbw * f.pdf_unchecked(z)?)
    };
    let integral = try_integrate_1d(integrand, 0.0, s, cfg)?;
    Ok(Estimate::closed_form(bare) + integral.scale(6.0 * sbar))
}

/// Upper truncation point for integrals over lifetimes: the
/// `1 - tail_cut` quantiles of the component and standby marginals added.
pub(crate) fn truncation_point(spec: &SystemSpec, tail_cut: f64) -> Result<f64> {
    Ok(spec.component().upper_quantile(tail_cut)? + spec.standby().upper_quantile(tail_cut)?)
}

/// `∫_from^∞ h`, truncated at [`truncation_point`]. The slab out to the
/// truncation point for `tail_cut / 100` is added and its size counted in
/// the error bound; a slab that is not small against the bulk means the
/// integral diverges or the tail is too heavy to truncate.
pub(crate) fn integrate_tail<H>(spec: &SystemSpec, cfg: &EvalConfig, from: f64, mut h: H) -> Result<Estimate>
where
    H: FnMut(f64) -> Result<f64>,
{
    let near = truncation_point(spec, cfg.tail_cut)?;
    let far = truncation_point(spec, cfg.tail_cut / 100.0)?;
    let upper = near.max(from);
    let main = try_integrate_graded(&mut h, from, upper, spec.resolution(), cfg)?;
    let slab = try_integrate_graded(&mut h, upper, upper + (far - near), spec.resolution(), cfg)?;
    let total = main + slab;
    if slab.value.abs() > 1e-3 * main.value.abs().max(cfg.quad_abs_tol) {
        return Err(Error::NonConvergence {
            estimate: total.value,
            error_bound: total.error_bound + slab.value.abs(),
            reason: format!(
                "tail beyond the truncation point {upper} still carries {:e}; the integral may diverge",
                slab.value
            ),
        });
    }
    Ok(Estimate::new(total.value, total.error_bound + slab.value.abs(), total.path))
}

/// Mean of `min(Z_{n-k+2:n} - Z_{n-k+1:n}, Z)` (just `Z` when `k = 1`) by
/// importance-weighted Monte Carlo.
pub(crate) fn mc_standby_gain(spec: &SystemSpec, cfg: &EvalConfig) -> Result<Estimate> {
    cfg.validate()?;
    let n = spec.n();
    let f = spec.component();
    let g = spec.standby();
    let copula = spec.copula();
    let parts = run_substreams(cfg.seed, cfg.mc_samples, cfg.substreams, |count, rng| {
        let mut u = vec![0.0; n + 1];
        let mut z = vec![0.0; n];
        let mut acc = MeanAccumulator::default();
        for _ in 0..count {
            u.iter_mut().for_each(|x| *x = rng.random::<f64>());
            for (zi, &ui) in z.iter_mut().zip(&u) {
                *zi = f.quantile_unchecked(ui);
            }
            let standby = g.quantile_unchecked(u[n]);
            let l = spec.lifetimes_in_place(&mut z, standby);
            acc.push(copula.density_unchecked(&u) * (l.system - l.k_out_of_n_failure));
        }
        acc
    });
    let mut acc = MeanAccumulator::default();
    parts.iter().for_each(|p| acc.merge(p));
    Ok(Estimate::new(acc.mean(), acc.standard_error(), EvalPath::MonteCarlo))
}

/// `E(T - Z_{n-k+1:n})`, the mean lifetime added by the standby.
pub fn mean_standby_gain(spec: &SystemSpec, cfg: &EvalConfig) -> Result<Estimate> {
    let factored = integrate_tail(spec, cfg, 0.0, |x| {
        factored_window(spec, &Window::exceedance(0.0, x), cfg).map(|e| e.value)
    });
    match factored {
        Ok(e) => Ok(e.with_path(EvalPath::FactoredQuadrature)),
        Err(Error::Unsupported(_)) => mc_standby_gain(spec, cfg),
        Err(e) => Err(e),
    }
}

/// Mean time to failure of the bare system or of the system with standby.
pub fn mttf(spec: &SystemSpec, cfg: &EvalConfig, which: Lifetime) -> Result<Estimate> {
    let bare = integrate_tail(spec, cfg, 0.0, |s| survival_kn(spec, s).map(|e| e.value))?;
    match which {
        Lifetime::Bare => Ok(bare),
        Lifetime::Standby => {
            let with = integrate_tail(spec, cfg, 0.0, |s| survival_t_factored(spec, s, cfg));
            match with {
                Ok(e) => Ok(e.with_path(EvalPath::FactoredQuadrature)),
                Err(Error::Unsupported(_)) => Ok(bare + mc_standby_gain(spec, cfg)?),
                Err(e) => Err(e),
            }
        }
    }
}

pub fn cost_rates(spec: &SystemSpec, unit_cost: f64, cfg: &EvalConfig) -> Result<CostRates> {
    if !(unit_cost.is_finite() && unit_cost > 0.0) {
        return Err(Error::InvalidParameter(format!("unit cost {unit_cost} must be > 0")));
    }
    let mttf_bare = mttf(spec, cfg, Lifetime::Bare)?;
    let mttf_standby = mttf(spec, cfg, Lifetime::Standby)?;
    let n = spec.n() as f64;
    Ok(CostRates {
        unit_cost,
        mttf_bare,
        mttf_standby,
        cost_rate_bare: n * unit_cost / mttf_bare.value,
        cost_rate_standby: (n + 1.0) * unit_cost / mttf_standby.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copulas::{CopulaModel, Fgm4Params};
    use crate::marginals::MarginalModel;

    fn exp2_spec(copula: CopulaModel) -> SystemSpec {
        let m = MarginalModel::exponential(2.0).unwrap();
        SystemSpec::new(3, 2, m.clone(), m, copula).unwrap()
    }

    fn strong_fgm() -> CopulaModel {
        CopulaModel::fgm4(Fgm4Params::new(0.2, 0.3, 0.5, 0.6, 0.7)).unwrap()
    }

    #[test]
    fn bare_survival_examples() {
        let sp = exp2_spec(CopulaModel::independence(4).unwrap());
        assert_eq!(survival_kn(&sp, 0.0).unwrap().value, 1.0);
        let fb = (-1.0f64).exp();
        let v = survival_kn(&sp, 0.5).unwrap().value;
        assert!((v - (3.0 * fb * fb - 2.0 * fb.powi(3))).abs() < 1e-15);
        assert!((v - 0.306_431_713).abs() < 1e-9);

        let sp = exp2_spec(strong_fgm());
        let f = 1.0 - fb;
        let want = 1.0 - 3.0 * f * f + 2.0 * f.powi(3) - 3.0 * 0.2 * f * f * fb * fb * (1.0 - 2.0 * f)
            + 2.0 * 0.5 * f.powi(3) * fb.powi(3);
        assert!((survival_kn(&sp, 0.5).unwrap().value - want).abs() < 1e-14);
    }

    #[test]
    fn survival_at_origin_is_one() {
        let sp = exp2_spec(strong_fgm());
        let cfg = EvalConfig::default();
        assert_eq!(survival_t(&sp, 0.0, &cfg).unwrap().value, 1.0);
        assert_eq!(survival_t_fgm_2of3(&sp, 0.0, &cfg).unwrap().value, 1.0);
        assert_eq!(standby_contribution(&sp, 0.0, &cfg, ContributionPath::Auto).unwrap().value, 0.0);
    }

    #[test]
    fn fgm_closed_form_rejects_other_shapes() {
        let m = MarginalModel::exponential(1.0).unwrap();
        let sp = SystemSpec::new(3, 1, m.clone(), m, strong_fgm()).unwrap();
        assert!(matches!(
            survival_t_fgm_2of3(&sp, 0.5, &EvalConfig::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn table_one_first_row() {
        let sp = exp2_spec(CopulaModel::independence(4).unwrap());
        let cfg = EvalConfig::default();
        let r = cost_rates(&sp, 1.0, &cfg).unwrap();
        assert!((r.mttf_bare.value - 5.0 / 12.0).abs() < 1e-8);
        assert!((r.mttf_standby.value - 2.0 / 3.0).abs() < 1e-8);
        assert!((r.cost_rate_bare - 7.2).abs() < 1e-6);
        assert!((r.cost_rate_standby - 6.0).abs() < 1e-6);
        assert!(cost_rates(&sp, 0.0, &cfg).is_err());
    }

    #[test]
    fn divergent_mean_is_detected() {
        let m = MarginalModel::lomax(1.0, 1.0).unwrap();
        let sp = SystemSpec::new(2, 1, m.clone(), m, CopulaModel::independence(3).unwrap()).unwrap();
        assert!(matches!(
            mttf(&sp, &EvalConfig::default(), Lifetime::Bare),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn tabulated_component_falls_back_to_monte_carlo() {
        let tab = MarginalModel::tabulated(vec![(0.5, 0.3), (1.0, 0.7), (2.0, 1.0)]).unwrap();
        let sp = SystemSpec::new(3, 2, tab.clone(), tab, CopulaModel::independence(4).unwrap()).unwrap();
        let cfg = EvalConfig { mc_samples: 200_000, ..EvalConfig::default() };
        let e = standby_contribution(&sp, 1.0, &cfg, ContributionPath::Auto).unwrap();
        assert_eq!(e.path, EvalPath::MonteCarlo);
        let m = mttf(&sp, &cfg, Lifetime::Standby).unwrap();
        assert_eq!(m.path, EvalPath::MonteCarlo);
        let bare = mttf(&sp, &cfg, Lifetime::Bare).unwrap();
        assert!(m.value > bare.value);
    }
}
