//! Mean residual life of the standby system under three conditioning
//! events: the whole system alive (`psi1`), the k-out-of-n part alive
//! (`psi2`), and every component alive (`psi3`).

use crate::engine::{factored_window, EvalConfig, EvalPath, Estimate, Window};
use crate::error::{Error, Result};
use crate::copulas::MultilinearDecomposition;
use crate::reliability::{check_time, integrate_tail, survival_kn, survival_t_factored};
use crate::system::{binomial, SystemSpec};

/// Conditioning probabilities below this are refused.
pub const MIN_CONDITIONING: f64 = 1e-8;

fn conditioning(p: Estimate, cfg: &EvalConfig) -> Result<Estimate> {
    if p.value < MIN_CONDITIONING.max(cfg.quad_abs_tol) {
        Err(Error::NullConditioning { probability: p.value })
    } else {
        Ok(p)
    }
}

/// `E(T - t | T > t)`.
pub fn psi1(spec: &SystemSpec, t: f64, cfg: &EvalConfig) -> Result<Estimate> {
    check_time(t)?;
    let den = conditioning(Estimate::closed_form(survival_t_factored(spec, t, cfg)?), cfg)?;
    let num = integrate_tail(spec, cfg, t, |s| survival_t_factored(spec, s, cfg))?;
    Ok(num.ratio(den).with_path(EvalPath::FactoredQuadrature))
}

/// `∫_0^∞ P(T > t + x, t < Z_{n-k+1:n} <= t + x) dx`.
fn standby_excess(spec: &SystemSpec, t: f64, cfg: &EvalConfig) -> Result<Estimate> {
    let e = integrate_tail(spec, cfg, 0.0, |x| {
        factored_window(spec, &Window::exceedance(t, t + x), cfg).map(|e| e.value)
    })?;
    Ok(e.with_path(EvalPath::FactoredQuadrature))
}

/// `E(T - t | Z_{n-k+1:n} > t)`.
pub fn psi2(spec: &SystemSpec, t: f64, cfg: &EvalConfig) -> Result<Estimate> {
    check_time(t)?;
    let den = conditioning(survival_kn(spec, t)?, cfg)?;
    let bare = integrate_tail(spec, cfg, t, |s| survival_kn(spec, s).map(|e| e.value))?;
    Ok((bare + standby_excess(spec, t, cfg)?).ratio(den))
}

/// `P(Z_{1:n} > t)`.
pub fn all_alive(spec: &SystemSpec, t: f64) -> Result<Estimate> {
    check_time(t)?;
    let d = spec.copula().decompose()?;
    let above = (spec.component().cdf_survival(t)?, (1.0, 0.0));
    Ok(Estimate::closed_form(d.rectangle(&vec![above; spec.n()])))
}

/// `P(Z_{n-k+1:n} > y, Z_{1:n} > t)` for `y >= t`: at most `n-k`
/// components fail in `(t, y]`, the rest outlive `y`. Each count is one
/// rectangle probability of the multilinear density.
fn kn_and_all_alive(spec: &SystemSpec, d: &MultilinearDecomposition, t: (f64, f64), y: (f64, f64)) -> f64 {
    let n = spec.n();
    let mut slots = vec![(y, (1.0, 0.0)); n];
    let mut total = 0.0;
    for i in 0..=(n - spec.k()) {
        if i > 0 {
            slots[i - 1] = (t, y);
        }
        total += binomial(n, i) as f64 * d.rectangle(&slots);
    }
    total
}

/// `E(Z_{n-k+1:n} - t | Z_{1:n} > t)`.
pub fn mrl_kn_given_all_alive(spec: &SystemSpec, t: f64, cfg: &EvalConfig) -> Result<Estimate> {
    let den = conditioning(all_alive(spec, t)?, cfg)?;
    Ok(kn_given_all_alive_numerator(spec, t, cfg)?.ratio(den))
}

fn kn_given_all_alive_numerator(spec: &SystemSpec, t: f64, cfg: &EvalConfig) -> Result<Estimate> {
    let f = spec.component();
    let d = spec.copula().decompose()?;
    let ft = f.cdf_survival(t)?;
    integrate_tail(spec, cfg, 0.0, |x| Ok(kn_and_all_alive(spec, &d, ft, f.cdf_survival(t + x)?)))
}

/// `E(T - t | Z_{1:n} > t)`.
pub fn psi3(spec: &SystemSpec, t: f64, cfg: &EvalConfig) -> Result<Estimate> {
    check_time(t)?;
    let den = conditioning(all_alive(spec, t)?, cfg)?;
    let kn = kn_given_all_alive_numerator(spec, t, cfg)?;
    let standby = integrate_tail(spec, cfg, 0.0, |x| {
        factored_window(spec, &Window::residual_all_alive(t, x), cfg).map(|e| e.value)
    })?;
    Ok((kn + standby).ratio(den).with_path(EvalPath::FactoredQuadrature))
}

pub use crate::reliability::mean_standby_gain;
