//! The standby integral: probability that the cold standby carries the
//! system past a threshold after the k-out-of-n structure has failed.
//!
//! Both routes integrate the joint density `c(F(z_1),…,F(z_n),G(z)) ∏f g`
//! over a [`Window`] that fixes one component as the pivot (the
//! `(n-k+1)`-th failure), `n-k` components below it, `k-1` above, and a
//! lower limit for the standby lifetime.

use std::collections::BTreeMap;

use rand::Rng;

use super::{run_substreams, try_integrate_graded, EvalConfig, EvalPath, Estimate, MeanAccumulator};
use crate::copulas::{interval_moments, ComponentFactor, StandbyFactor};
use crate::error::{domain, Error, Result};
use crate::system::SystemSpec;

/// Lower limit of the `k-1` surviving component slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum AboveLimit {
    Fixed(f64),
    /// Pivot value plus an offset.
    PivotPlus(f64),
}

/// Lower limit of the standby lifetime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum StandbyLimit {
    /// Threshold minus the pivot value.
    ThresholdMinusPivot(f64),
    Fixed(f64),
}

/// Integration region: pivot in `(pivot_lo, pivot_hi]`, the `n-k` lower
/// slots in `(below_lo, pivot)`, the upper slots above `above`, and the
/// standby above `standby`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Window {
    pub pivot_lo: f64,
    pub pivot_hi: f64,
    pub below_lo: f64,
    pub above: AboveLimit,
    pub standby: StandbyLimit,
}

impl Window {
    /// `P(T > s, lo < Z_{n-k+1:n} <= s)`.
    pub fn exceedance(lo: f64, s: f64) -> Self {
        Self {
            pivot_lo: lo,
            pivot_hi: s,
            below_lo: 0.0,
            above: AboveLimit::Fixed(s),
            standby: StandbyLimit::ThresholdMinusPivot(s),
        }
    }

    /// `P(min(Z_{n-k+2:n} - Z_{n-k+1:n}, Z) > x, Z_{1:n} > t)`.
    pub fn residual_all_alive(t: f64, x: f64) -> Self {
        Self {
            pivot_lo: t,
            pivot_hi: f64::INFINITY,
            below_lo: t,
            above: AboveLimit::PivotPlus(x),
            standby: StandbyLimit::Fixed(x),
        }
    }
}

/// Counts of `(1 - 2u)` factors per slot class for one group of density terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Signature {
    above: i32,
    below: i32,
    pivot: bool,
    standby: bool,
}

/// Groups the density terms by signature. Slots `0..k-1` are above the
/// pivot, `k-1..n-1` below it, and slot `n-1` is the pivot; any fixed role
/// assignment is exact because the density is exchangeable in its
/// component arguments.
fn signatures(spec: &SystemSpec) -> Result<Vec<(Signature, f64)>> {
    let decomposition = spec.copula().decompose()?;
    let n = spec.n();
    let k = spec.k();
    let mut groups: BTreeMap<Signature, f64> = BTreeMap::new();
    for term in &decomposition.terms {
        let om = |range: std::ops::Range<usize>| {
            term.components[range]
                .iter()
                .filter(|f| **f == ComponentFactor::OneMinus2U)
                .count() as i32
        };
        let sig = Signature {
            above: om(0..k - 1),
            below: om(k - 1..n - 1),
            pivot: term.components[n - 1] == ComponentFactor::OneMinus2U,
            standby: term.standby == StandbyFactor::OneMinus2V,
        };
        *groups.entry(sig).or_insert(0.0) += term.coefficient;
    }
    Ok(groups.into_iter().filter(|(_, c)| *c != 0.0).collect())
}

/// Factored quadrature over a window: every non-pivot integral is a closed
/// form moment, leaving one integral over the pivot lifetime.
pub(crate) fn factored_window(spec: &SystemSpec, w: &Window, cfg: &EvalConfig) -> Result<Estimate> {
    let f = spec.component();
    let g = spec.standby();
    if !f.has_density() {
        return Err(Error::Unsupported(
            "factored integration needs a component density; tabulated component marginals use Monte Carlo".into(),
        ));
    }
    let sigs = signatures(spec)?;
    let hi = if w.pivot_hi.is_infinite() {
        f.upper_quantile(cfg.tail_cut)?
    } else {
        w.pivot_hi
    };
    if hi <= w.pivot_lo {
        return Ok(Estimate::new(0.0, 0.0, EvalPath::FactoredQuadrature));
    }
    let n_above = spec.k() as i32 - 1;
    let n_below = (spec.n() - spec.k()) as i32;
    let below_lo = f.cdf_survival(w.below_lo)?;
    let fixed_above = match w.above {
        AboveLimit::Fixed(s) => Some(f.cdf_survival(s)?),
        AboveLimit::PivotPlus(_) => None,
    };
    let fixed_standby = match w.standby {
        StandbyLimit::Fixed(x) => Some(g.cdf_survival(x)?),
        StandbyLimit::ThresholdMinusPivot(_) => None,
    };

    let integrand = |z: f64| -> Result<f64> {
        let (fz, sz) = f.cdf_survival_unchecked(z);
        let density = f.pdf_unchecked(z)?;
        if density == 0.0 {
            return Ok(0.0);
        }
        let (below_one, below_om) = interval_moments(below_lo, (fz, sz));
        let (fa, sa) = match (fixed_above, w.above) {
            (Some(v), _) => v,
            (None, AboveLimit::PivotPlus(x)) => f.cdf_survival_unchecked(z + x),
            (None, AboveLimit::Fixed(_)) => unreachable!(),
        };
        let (above_one, above_om) = (sa, -fa * sa);
        let (gw, sw) = match (fixed_standby, w.standby) {
            (Some(v), _) => v,
            (None, StandbyLimit::ThresholdMinusPivot(s)) => g.cdf_survival_unchecked((s - z).max(0.0)),
            (None, StandbyLimit::Fixed(_)) => unreachable!(),
        };
        let (standby_one, standby_om) = (sw, -gw * sw);
        let pivot_om = 1.0 - 2.0 * fz;

        let mut acc = 0.0;
        for (sig, coef) in &sigs {
            let mut term = *coef
                * above_one.powi(n_above - sig.above)
                * above_om.powi(sig.above)
                * below_one.powi(n_below - sig.below)
                * below_om.powi(sig.below);
            if sig.pivot {
                term *= pivot_om;
            }
            term *= if sig.standby { standby_om } else { standby_one };
            acc += term;
        }
        Ok(acc * density)
    };
    let est = try_integrate_graded(integrand, w.pivot_lo, hi, spec.resolution(), cfg)?;
    Ok(est.scale(spec.order_statistic_constant()).with_path(EvalPath::FactoredQuadrature))
}

/// Importance-weighted Monte Carlo over a window: independent draws from
/// the marginals weighted by the copula density, with the window event
/// evaluated on the sorted draw.
pub(crate) fn mc_window(spec: &SystemSpec, w: &Window, cfg: &EvalConfig) -> Result<Estimate> {
    cfg.validate()?;
    let n = spec.n();
    let pivot = n - spec.k();
    let f = spec.component();
    let g = spec.standby();
    let copula = spec.copula();
    let total = cfg.mc_samples;
    let parts = run_substreams(cfg.seed, total, cfg.substreams, |count, rng| {
        let mut u = vec![0.0; n + 1];
        let mut z = vec![0.0; n];
        let mut hits = MeanAccumulator::default();
        for _ in 0..count {
            u.iter_mut().for_each(|x| *x = rng.random::<f64>());
            for (zi, &ui) in z.iter_mut().zip(&u) {
                *zi = f.quantile_unchecked(ui);
            }
            let standby = g.quantile_unchecked(u[n]);
            z.sort_unstable_by(f64::total_cmp);
            let zp = z[pivot];
            if !(zp > w.pivot_lo && zp <= w.pivot_hi) {
                continue;
            }
            if pivot > 0 && !(z[0] > w.below_lo) {
                continue;
            }
            if pivot + 1 < n {
                let lim = match w.above {
                    AboveLimit::Fixed(s) => s,
                    AboveLimit::PivotPlus(x) => zp + x,
                };
                if !(z[pivot + 1] > lim) {
                    continue;
                }
            }
            let lim = match w.standby {
                StandbyLimit::ThresholdMinusPivot(s) => s - zp,
                StandbyLimit::Fixed(x) => x,
            };
            if !(standby > lim) {
                continue;
            }
            hits.push(copula.density_unchecked(&u));
        }
        (count as u64, hits)
    });
    let mut acc = MeanAccumulator::default();
    for (count, hits) in &parts {
        acc.merge(&hits.padded_to(*count));
    }
    Ok(Estimate::new(acc.mean(), acc.standard_error(), EvalPath::MonteCarlo))
}

/// The standby term of the system survival at `s` by factored quadrature.
/// Fails with [`Error::Unsupported`] when the copula or marginals do not
/// admit the factorisation.
pub fn factored_integral_standby(spec: &SystemSpec, s: f64, cfg: &EvalConfig) -> Result<Estimate> {
    check_threshold(s)?;
    factored_window(spec, &Window::exceedance(0.0, s), cfg)
}

/// The standby term of the system survival at `s` by importance-weighted
/// Monte Carlo. Deterministic for fixed `(seed, mc_samples, substreams)`.
pub fn mc_integral_standby(spec: &SystemSpec, s: f64, cfg: &EvalConfig) -> Result<Estimate> {
    check_threshold(s)?;
    mc_window(spec, &Window::exceedance(0.0, s), cfg)
}

fn check_threshold(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("threshold {s} must be finite and >= 0")))
    }
}
