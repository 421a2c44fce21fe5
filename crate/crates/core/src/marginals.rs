//! Univariate lifetime distributions on `[0, ∞)`.
//!
//! Every family exposes its CDF, survival function and quantile in closed
//! form. Whichever of `cdf`/`survival` is the smaller number is computed
//! directly and the other is taken as its complement, so far tails keep full
//! relative precision and the two always sum to exactly one.

use crate::error::{domain, Error, Result};

/// A lifetime distribution family with validated parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Exponential { rate: f64 },
    /// Pareto type II: survival `(1 + z/scale)^(-shape)`.
    Lomax { shape: f64, scale: f64 },
    Weibull { shape: f64, scale: f64 },
    /// Piecewise-linear CDF through `(z, F(z))` knots; no density.
    Tabulated { knots: Vec<(f64, f64)> },
}

/// CDF, density and survival at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalEval {
    pub cdf: f64,
    pub pdf: f64,
    pub survival: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginalModel {
    family: Family,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl MarginalModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(Self {
            family: Family::Exponential { rate: positive("rate", rate)? },
        })
    }

    pub fn lomax(shape: f64, scale: f64) -> Result<Self> {
        Ok(Self {
            family: Family::Lomax {
                shape: positive("shape", shape)?,
                scale: positive("scale", scale)?,
            },
        })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        Ok(Self {
            family: Family::Weibull {
                shape: positive("shape", shape)?,
                scale: positive("scale", scale)?,
            },
        })
    }

    /// Knots must have strictly increasing nonnegative `z`, nondecreasing
    /// probabilities in `[0, 1]`, and end at probability 1. A leading `(0, 0)`
    /// knot is inserted when the first knot lies to the right of the origin.
    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidParameter("tabulated CDF needs at least one knot".into()));
        }
        for (i, &(z, p)) in knots.iter().enumerate() {
            if !(z.is_finite() && z >= 0.0) {
                return Err(Error::InvalidParameter(format!("knot {i}: z = {z} must be finite and >= 0")));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("knot {i}: F = {p} outside [0, 1]")));
            }
            if i > 0 {
                let (zp, pp) = knots[i - 1];
                if z <= zp {
                    return Err(Error::InvalidParameter(format!("knot {i}: z values must be strictly increasing")));
                }
                if p < pp {
                    return Err(Error::InvalidParameter(format!("knot {i}: F values must be nondecreasing")));
                }
            }
        }
        let (z0, p0) = knots[0];
        if z0 == 0.0 && p0 != 0.0 {
            return Err(Error::InvalidParameter("tabulated CDF must vanish at z = 0".into()));
        }
        if knots[knots.len() - 1].1 != 1.0 {
            return Err(Error::InvalidParameter("last tabulated knot must have F = 1".into()));
        }
        let mut knots = knots;
        if z0 > 0.0 {
            knots.insert(0, (0.0, 0.0));
        }
        Ok(Self {
            family: Family::Tabulated { knots },
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn has_density(&self) -> bool {
        !matches!(self.family, Family::Tabulated { .. })
    }

    /// Returns `(cdf, survival)` with the smaller member computed directly.
    pub fn cdf_survival(&self, z: f64) -> Result<(f64, f64)> {
        check_time(z)?;
        Ok(self.cdf_survival_unchecked(z))
    }

    pub(crate) fn cdf_survival_unchecked(&self, z: f64) -> (f64, f64) {
        if z == f64::INFINITY {
            return (1.0, 0.0);
        }
        match &self.family {
            Family::Exponential { rate } => split_from_cumulative_hazard(rate * z),
            Family::Weibull { shape, scale } => split_from_cumulative_hazard((z / scale).powf(*shape)),
            Family::Lomax { shape, scale } => split_from_cumulative_hazard(shape * (z / scale).ln_1p()),
            Family::Tabulated { knots } => {
                let p = interpolate_cdf(knots, z);
                (p, 1.0 - p)
            }
        }
    }

    pub fn cdf(&self, z: f64) -> Result<f64> {
        self.cdf_survival(z).map(|(c, _)| c)
    }

    pub fn survival(&self, z: f64) -> Result<f64> {
        self.cdf_survival(z).map(|(_, s)| s)
    }

    pub fn pdf(&self, z: f64) -> Result<f64> {
        check_time(z)?;
        self.pdf_unchecked(z)
    }

    pub(crate) fn pdf_unchecked(&self, z: f64) -> Result<f64> {
        if z == f64::INFINITY {
            return Ok(0.0);
        }
        Ok(match &self.family {
            Family::Exponential { rate } => rate * (-rate * z).exp(),
            Family::Lomax { shape, scale } => {
                shape / scale * (-(shape + 1.0) * (z / scale).ln_1p()).exp()
            }
            Family::Weibull { shape, scale } => {
                let x = z / scale;
                if z == 0.0 {
                    match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0 / scale,
                        _ => 0.0,
                    }
                } else {
                    shape / scale * x.powf(shape - 1.0) * (-x.powf(*shape)).exp()
                }
            }
            Family::Tabulated { .. } => {
                return Err(Error::Unsupported(
                    "tabulated marginals have no density".into(),
                ))
            }
        })
    }

    /// CDF, density and survival together. Fails for tabulated marginals
    /// because a density is requested.
    pub fn eval(&self, z: f64) -> Result<MarginalEval> {
        let (cdf, survival) = self.cdf_survival(z)?;
        let pdf = self.pdf_unchecked(z)?;
        Ok(MarginalEval { cdf, pdf, survival })
    }

    /// `inf { z : F(z) >= p }` for `p` in `[0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(domain(format!("quantile level {p} outside [0, 1)")));
        }
        Ok(self.quantile_unchecked(p))
    }

    pub(crate) fn quantile_unchecked(&self, p: f64) -> f64 {
        match &self.family {
            Family::Tabulated { knots } => invert_cdf(knots, p),
            // cumulative hazard at level p is -ln(1 - p)
            _ => self.time_at_cumulative_hazard(-(-p).ln_1p()),
        }
    }

    /// Inverse survival: the time beyond which only probability `q` remains.
    pub fn upper_quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(domain(format!("upper-tail level {q} outside (0, 1]")));
        }
        Ok(match &self.family {
            Family::Tabulated { knots } => invert_cdf(knots, 1.0 - q),
            _ => self.time_at_cumulative_hazard(-q.ln()),
        })
    }

    fn time_at_cumulative_hazard(&self, h: f64) -> f64 {
        match &self.family {
            Family::Exponential { rate } => h / rate,
            Family::Weibull { shape, scale } => scale * h.powf(1.0 / shape),
            Family::Lomax { shape, scale } => scale * (h / shape).exp_m1(),
            Family::Tabulated { .. } => unreachable!("tabulated quantiles are interpolated"),
        }
    }
}

fn check_time(z: f64) -> Result<()> {
    if z.is_nan() || z < 0.0 {
        Err(domain(format!("time {z} is negative or NaN; lifetimes live on [0, inf)")))
    } else {
        Ok(())
    }
}

fn split_from_cumulative_hazard(h: f64) -> (f64, f64) {
    if h < std::f64::consts::LN_2 {
        let cdf = -(-h).exp_m1();
        (cdf, 1.0 - cdf)
    } else {
        let survival = (-h).exp();
        (1.0 - survival, survival)
    }
}

fn interpolate_cdf(knots: &[(f64, f64)], z: f64) -> f64 {
    let last = knots[knots.len() - 1];
    if z >= last.0 {
        return 1.0;
    }
    // first knot with knot.z > z; index >= 1 because knots[0].z == 0 <= z
    let i = knots.partition_point(|&(kz, _)| kz <= z);
    let (z0, p0) = knots[i - 1];
    let (z1, p1) = knots[i];
    p0 + (p1 - p0) * (z - z0) / (z1 - z0)
}

fn invert_cdf(knots: &[(f64, f64)], p: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    // first knot reaching level p
    let i = knots.partition_point(|&(_, kp)| kp < p);
    if i == 0 {
        return knots[0].0;
    }
    if i >= knots.len() {
        return knots[knots.len() - 1].0;
    }
    let (z0, p0) = knots[i - 1];
    let (z1, p1) = knots[i];
    z0 + (z1 - z0) * (p - p0) / (p1 - p0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn exponential_at_origin() {
        let m = MarginalModel::exponential(2.0).unwrap();
        let e = m.eval(0.0).unwrap();
        assert_eq!((e.cdf, e.pdf, e.survival), (0.0, 2.0, 1.0));
    }

    #[test]
    fn lomax_at_one() {
        let m = MarginalModel::lomax(2.0, 1.0).unwrap();
        let e = m.eval(1.0).unwrap();
        assert!(close(e.cdf, 0.75, 1e-15));
        assert!(close(e.pdf, 0.25, 1e-15));
        assert!(close(e.survival, 0.25, 1e-15));
    }

    #[test]
    fn weibull_at_one() {
        let m = MarginalModel::weibull(2.0, 1.0).unwrap();
        let e = m.eval(1.0).unwrap();
        let em1 = (-1.0f64).exp();
        assert!(close(e.cdf, 1.0 - em1, 1e-15));
        assert!(close(e.pdf, 2.0 * em1, 1e-15));
        assert!(close(e.survival, em1, 1e-15));
        assert!((e.cdf - 0.632121).abs() < 1e-6);
        assert!((e.pdf - 0.735759).abs() < 1e-6);
    }

    #[test]
    fn cdf_and_survival_sum_to_one_exactly() {
        let models = [
            MarginalModel::exponential(2.0).unwrap(),
            MarginalModel::lomax(2.0, 1.0).unwrap(),
            MarginalModel::weibull(0.7, 1.3).unwrap(),
            MarginalModel::tabulated(vec![(0.5, 0.2), (1.0, 0.7), (3.0, 1.0)]).unwrap(),
        ];
        for m in &models {
            for i in 0..500 {
                let z = i as f64 * 0.037;
                let (c, s) = m.cdf_survival(z).unwrap();
                assert_eq!(c + s, 1.0, "{m:?} at {z}");
            }
        }
    }

    #[test]
    fn quantile_examples() {
        let m = MarginalModel::exponential(2.0).unwrap();
        assert_eq!(m.quantile(0.0).unwrap(), 0.0);
        let p = 1.0 - (-1.0f64).exp();
        assert!(close(m.quantile(p).unwrap(), 0.5, 1e-14));
        let l = MarginalModel::lomax(2.0, 1.0).unwrap();
        assert!(close(l.quantile(0.75).unwrap(), 1.0, 1e-14));
    }

    #[test]
    fn negative_time_and_bad_levels_are_rejected() {
        let m = MarginalModel::weibull(2.0, 1.0).unwrap();
        assert!(matches!(m.cdf(-1e-12), Err(Error::Domain(_))));
        assert!(matches!(m.pdf(-1.0), Err(Error::Domain(_))));
        assert!(matches!(m.quantile(1.0), Err(Error::Domain(_))));
        assert!(matches!(m.quantile(-0.1), Err(Error::Domain(_))));
        assert!(matches!(m.cdf(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(MarginalModel::exponential(0.0).is_err());
        assert!(MarginalModel::lomax(2.0, -1.0).is_err());
        assert!(MarginalModel::weibull(f64::NAN, 1.0).is_err());
        assert!(MarginalModel::tabulated(vec![]).is_err());
        assert!(MarginalModel::tabulated(vec![(1.0, 0.5), (0.5, 1.0)]).is_err());
        assert!(MarginalModel::tabulated(vec![(1.0, 0.5), (2.0, 0.4), (3.0, 1.0)]).is_err());
        assert!(MarginalModel::tabulated(vec![(1.0, 0.5), (2.0, 0.9)]).is_err());
        assert!(MarginalModel::tabulated(vec![(0.0, 0.1), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn tabulated_interpolates_and_has_no_density() {
        let m = MarginalModel::tabulated(vec![(1.0, 0.5), (2.0, 0.5), (4.0, 1.0)]).unwrap();
        assert_eq!(m.cdf(0.0).unwrap(), 0.0);
        assert_eq!(m.cdf(0.5).unwrap(), 0.25);
        assert_eq!(m.cdf(1.5).unwrap(), 0.5);
        assert_eq!(m.cdf(3.0).unwrap(), 0.75);
        assert_eq!(m.cdf(10.0).unwrap(), 1.0);
        // flat segment: infimum picks its left end
        assert_eq!(m.quantile(0.5).unwrap(), 1.0);
        assert_eq!(m.quantile(0.75).unwrap(), 3.0);
        assert!(matches!(m.pdf(1.0), Err(Error::Unsupported(_))));
        assert!(matches!(m.eval(1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn upper_quantile_inverts_survival() {
        for m in [
            MarginalModel::exponential(2.0).unwrap(),
            MarginalModel::lomax(2.0, 1.0).unwrap(),
            MarginalModel::weibull(2.0, 1.0).unwrap(),
        ] {
            let z = m.upper_quantile(1e-10).unwrap();
            assert!(close(m.survival(z).unwrap(), 1e-10, 1e-9));
        }
    }
}
