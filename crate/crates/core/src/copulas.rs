//! Copula models over `[0,1]^d` where the last coordinate belongs to the
//! standby unit and the first `d - 1` to the exchangeable components.
//!
//! The FGM-type families have densities that are multilinear in
//! `a_i = 1 - 2u_i` and `b = 1 - 2v`, so their extrema over the unit cube sit
//! at its `2^d` corners. [`CopulaModel::validate`] enumerates those corners.

use crate::error::{domain, Error, Result};

/// Largest supported dimension; corner enumeration costs `2^d` density calls.
pub const MAX_DIM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fgm4Params {
    pub theta11: f64,
    pub theta12: f64,
    pub theta21: f64,
    pub theta22: f64,
    pub theta31: f64,
}

impl Fgm4Params {
    pub fn new(theta11: f64, theta12: f64, theta21: f64, theta22: f64, theta31: f64) -> Self {
        Self { theta11, theta12, theta21, theta22, theta31 }
    }

    fn as_array(&self) -> [f64; 5] {
        [self.theta11, self.theta12, self.theta21, self.theta22, self.theta31]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CopulaFamily {
    Independence { dim: usize },
    /// Four-dimensional FGM copula of three components and one standby.
    Fgm4(Fgm4Params),
    /// FGM copula with only pairwise perturbations: `theta_cc` for
    /// component/component pairs and `theta_cs` for component/standby pairs.
    FgmPairwise { dim: usize, theta_cc: f64, theta_cs: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CopulaModel {
    family: CopulaFamily,
}

/// Corner extrema of the copula density.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub min_corner_density: f64,
    pub max_corner_density: f64,
    pub is_proper_density: bool,
    /// Corner attaining the minimum, written as `a_i = 1 - 2u_i` (so `±1`).
    pub argmin_corner: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentFactor {
    One,
    OneMinus2U,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StandbyFactor {
    One,
    OneMinus2V,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTerm {
    pub coefficient: f64,
    /// One factor per component slot.
    pub components: Vec<ComponentFactor>,
    pub standby: StandbyFactor,
}

/// The density written as `sum_m coeff_m * prod_i factor_{m,i}(u_i) * factor_m(v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearDecomposition {
    pub terms: Vec<DensityTerm>,
}

impl MultilinearDecomposition {
    pub fn evaluate(&self, u: &[f64]) -> f64 {
        let (v, comps) = u.split_last().expect("non-empty point");
        self.terms
            .iter()
            .map(|t| {
                let mut p = t.coefficient;
                for (f, &ui) in t.components.iter().zip(comps) {
                    if *f == ComponentFactor::OneMinus2U {
                        p *= 1.0 - 2.0 * ui;
                    }
                }
                if t.standby == StandbyFactor::OneMinus2V {
                    p *= 1.0 - 2.0 * v;
                }
                p
            })
            .sum()
    }
}

impl MultilinearDecomposition {
    /// Probability that every component lies in its interval, standby
    /// unrestricted. Each interval is given as `(cdf, survival)` at its two
    /// ends, so no slot mass is formed by cancellation.
    pub fn rectangle(&self, slots: &[((f64, f64), (f64, f64))]) -> f64 {
        let moments: Vec<(f64, f64)> = slots.iter().map(|&(lo, hi)| interval_moments(lo, hi)).collect();
        self.terms
            .iter()
            .filter(|t| t.standby == StandbyFactor::One)
            .map(|t| {
                t.components.iter().zip(&moments).fold(t.coefficient, |p, (f, m)| match f {
                    ComponentFactor::One => p * m.0,
                    ComponentFactor::OneMinus2U => p * m.1,
                })
            })
            .sum()
    }
}

/// `(∫ 1 du, ∫ (1 - 2u) du)` over the probability interval between two
/// points given as `(cdf, survival)` pairs.
pub(crate) fn interval_moments(lo: (f64, f64), hi: (f64, f64)) -> (f64, f64) {
    let (pa, sa) = lo;
    let (pb, sb) = hi;
    let mass = if pb <= 0.5 { pb - pa } else { sa - sb };
    (mass, mass * (sa - pb))
}

fn check_theta(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && (-1.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} outside [-1, 1]")))
    }
}

fn check_dim(dim: usize) -> Result<usize> {
    if (2..=MAX_DIM).contains(&dim) {
        Ok(dim)
    } else {
        Err(Error::InvalidParameter(format!("copula dimension {dim} outside [2, {MAX_DIM}]")))
    }
}

impl CopulaModel {
    pub fn independence(dim: usize) -> Result<Self> {
        Ok(Self {
            family: CopulaFamily::Independence { dim: check_dim(dim)? },
        })
    }

    pub fn fgm4(p: Fgm4Params) -> Result<Self> {
        for (name, v) in ["theta11", "theta12", "theta21", "theta22", "theta31"]
            .iter()
            .zip(p.as_array())
        {
            check_theta(name, v)?;
        }
        Ok(Self {
            family: CopulaFamily::Fgm4(p),
        })
    }

    pub fn fgm_pairwise(dim: usize, theta_cc: f64, theta_cs: f64) -> Result<Self> {
        Ok(Self {
            family: CopulaFamily::FgmPairwise {
                dim: check_dim(dim)?,
                theta_cc: check_theta("theta_cc", theta_cc)?,
                theta_cs: check_theta("theta_cs", theta_cs)?,
            },
        })
    }

    pub fn family(&self) -> &CopulaFamily {
        &self.family
    }

    pub fn dim(&self) -> usize {
        match self.family {
            CopulaFamily::Independence { dim } | CopulaFamily::FgmPairwise { dim, .. } => dim,
            CopulaFamily::Fgm4(_) => 4,
        }
    }

    fn check_point(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: u.len() });
        }
        if let Some(bad) = u.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(domain(format!("copula argument {bad} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn cdf(&self, u: &[f64]) -> Result<f64> {
        self.check_point(u)?;
        Ok(self.cdf_unchecked(u))
    }

    pub(crate) fn cdf_unchecked(&self, u: &[f64]) -> f64 {
        let prod: f64 = u.iter().product();
        match &self.family {
            CopulaFamily::Independence { .. } => prod,
            CopulaFamily::Fgm4(p) => {
                let c = [1.0 - u[0], 1.0 - u[1], 1.0 - u[2]];
                let s = 1.0 - u[3];
                let pairs = c[0] * c[1] + c[0] * c[2] + c[1] * c[2];
                let singles = c[0] + c[1] + c[2];
                let triple = c[0] * c[1] * c[2];
                prod * (1.0
                    + p.theta11 * pairs
                    + p.theta12 * singles * s
                    + p.theta21 * triple
                    + p.theta22 * pairs * s
                    + p.theta31 * triple * s)
            }
            CopulaFamily::FgmPairwise { theta_cc, theta_cs, .. } => {
                let (v, comps) = u.split_last().unwrap();
                let c: Vec<f64> = comps.iter().map(|x| 1.0 - x).collect();
                prod * (1.0 + theta_cc * pair_sum(&c) + theta_cs * c.iter().sum::<f64>() * (1.0 - v))
            }
        }
    }

    /// Copula CDF with `blocks[i].1` consecutive arguments equal to
    /// `blocks[i].0`, filling the remaining slots with 1.
    pub fn cdf_blocks(&self, blocks: &[(f64, usize)]) -> Result<f64> {
        let mut u = Vec::with_capacity(self.dim());
        for &(value, count) in blocks {
            u.extend(std::iter::repeat_n(value, count));
        }
        if u.len() > self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: u.len() });
        }
        u.resize(self.dim(), 1.0);
        self.cdf(&u)
    }

    /// The copula density. Signed values from parameter sets outside the
    /// proper region are returned as they are.
    pub fn density(&self, u: &[f64]) -> Result<f64> {
        self.check_point(u)?;
        Ok(self.density_unchecked(u))
    }

    pub(crate) fn density_unchecked(&self, u: &[f64]) -> f64 {
        match &self.family {
            CopulaFamily::Independence { .. } => 1.0,
            CopulaFamily::Fgm4(p) => {
                let a = [1.0 - 2.0 * u[0], 1.0 - 2.0 * u[1], 1.0 - 2.0 * u[2]];
                let b = 1.0 - 2.0 * u[3];
                let pairs = a[0] * a[1] + a[0] * a[2] + a[1] * a[2];
                let singles = a[0] + a[1] + a[2];
                let triple = a[0] * a[1] * a[2];
                1.0 + p.theta11 * pairs
                    + p.theta12 * singles * b
                    + p.theta21 * triple
                    + p.theta22 * pairs * b
                    + p.theta31 * triple * b
            }
            CopulaFamily::FgmPairwise { theta_cc, theta_cs, .. } => {
                let (v, comps) = u.split_last().unwrap();
                let a: Vec<f64> = comps.iter().map(|x| 1.0 - 2.0 * x).collect();
                1.0 + theta_cc * pair_sum(&a) + theta_cs * a.iter().sum::<f64>() * (1.0 - 2.0 * v)
            }
        }
    }

    /// Enumerates all `2^d` corners of the cube.
    pub fn validate(&self) -> ValidityReport {
        let d = self.dim();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut argmin = vec![0.0; d];
        let mut u = vec![0.0; d];
        for mask in 0u32..(1u32 << d) {
            for (i, ui) in u.iter_mut().enumerate() {
                // bit set -> u = 1 (a = -1)
                *ui = if mask >> i & 1 == 1 { 1.0 } else { 0.0 };
            }
            let c = self.density_unchecked(&u);
            if c < min {
                min = c;
                argmin = u.iter().map(|x| 1.0 - 2.0 * x).collect();
            }
            max = max.max(c);
        }
        ValidityReport {
            min_corner_density: min,
            max_corner_density: max,
            is_proper_density: min >= 0.0,
            argmin_corner: argmin,
        }
    }

    pub fn decompose(&self) -> Result<MultilinearDecomposition> {
        let d = self.dim();
        let n = d - 1;
        let mut terms = vec![DensityTerm {
            coefficient: 1.0,
            components: vec![ComponentFactor::One; n],
            standby: StandbyFactor::One,
        }];
        let mut push = |coefficient: f64, slots: &[usize], standby: StandbyFactor| {
            if coefficient == 0.0 {
                return;
            }
            let mut components = vec![ComponentFactor::One; n];
            for &i in slots {
                components[i] = ComponentFactor::OneMinus2U;
            }
            terms.push(DensityTerm { coefficient, components, standby });
        };
        match &self.family {
            CopulaFamily::Independence { .. } => {}
            CopulaFamily::Fgm4(p) => {
                let pairs = [[0, 1], [0, 2], [1, 2]];
                for pr in &pairs {
                    push(p.theta11, pr, StandbyFactor::One);
                }
                for i in 0..3 {
                    push(p.theta12, &[i], StandbyFactor::OneMinus2V);
                }
                push(p.theta21, &[0, 1, 2], StandbyFactor::One);
                for pr in &pairs {
                    push(p.theta22, pr, StandbyFactor::OneMinus2V);
                }
                push(p.theta31, &[0, 1, 2], StandbyFactor::OneMinus2V);
            }
            CopulaFamily::FgmPairwise { theta_cc, theta_cs, .. } => {
                for i in 0..n {
                    for j in i + 1..n {
                        push(*theta_cc, &[i, j], StandbyFactor::One);
                    }
                }
                for i in 0..n {
                    push(*theta_cs, &[i], StandbyFactor::OneMinus2V);
                }
            }
        }
        Ok(MultilinearDecomposition { terms })
    }
}

fn pair_sum(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            s += x[i] * x[j];
        }
    }
    s
}
