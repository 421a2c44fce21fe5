//! The standby-augmented k-out-of-n system and its lifetime rule.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::copulas::{CopulaModel, ValidityReport};
use crate::error::{domain, Error, Result};
use crate::marginals::MarginalModel;

const SYMMETRY_POINTS: usize = 20;
const SYMMETRY_TOL: f64 = 1e-12;

/// `n` exchangeable components sharing one marginal, a k-out-of-n
/// structure, and one cold standby with its own marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    n: usize,
    k: usize,
    component: MarginalModel,
    standby: MarginalModel,
    copula: CopulaModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub n: usize,
    pub k: usize,
    pub copula: ValidityReport,
}

/// Outputs of the lifetime rule for one joint draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lifetimes {
    /// System lifetime including the standby.
    pub system: f64,
    /// Failure time of the bare k-out-of-n system, `Z_{n-k+1:n}`.
    pub k_out_of_n_failure: f64,
    /// First component failure, `Z_{1:n}`.
    pub first_failure: f64,
}

/// Collects every structural violation rather than stopping at the first.
pub fn validate_system(n: usize, k: usize, copula: &CopulaModel) -> Result<ValidationReport> {
    let mut failures = Vec::new();
    if n < 2 {
        failures.push(format!("n = {n} must be at least 2"));
    }
    if k < 1 || k > n {
        failures.push(format!("k = {k} must satisfy 1 <= k <= n = {n}"));
    }
    if copula.dim() != n + 1 {
        failures.push(format!(
            "copula dimension {} does not match n + 1 = {}",
            copula.dim(),
            n + 1
        ));
    } else if let Some(msg) = symmetry_violation(copula) {
        failures.push(msg);
    }
    if !failures.is_empty() {
        return Err(Error::Validation(failures));
    }
    Ok(ValidationReport { n, k, copula: copula.validate() })
}

fn symmetry_violation(copula: &CopulaModel) -> Option<String> {
    let d = copula.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ee_d5e7);
    let mut u = vec![0.0; d];
    let mut perm: Vec<usize> = (0..d - 1).collect();
    for _ in 0..SYMMETRY_POINTS {
        u.iter_mut().for_each(|x| *x = rng.random());
        perm.shuffle(&mut rng);
        let mut w = u.clone();
        for (i, &p) in perm.iter().enumerate() {
            w[i] = u[p];
        }
        let a = copula.density_unchecked(&u);
        let b = copula.density_unchecked(&w);
        if (a - b).abs() > SYMMETRY_TOL {
            return Some(format!(
                "copula density is not symmetric in the component arguments ({a} vs {b})"
            ));
        }
    }
    None
}

impl SystemSpec {
    pub fn new(
        n: usize,
        k: usize,
        component: MarginalModel,
        standby: MarginalModel,
        copula: CopulaModel,
    ) -> Result<Self> {
        validate_system(n, k, &copula)?;
        Ok(Self { n, k, component, standby, copula })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn component(&self) -> &MarginalModel {
        &self.component
    }

    pub fn standby(&self) -> &MarginalModel {
        &self.standby
    }

    pub fn copula(&self) -> &CopulaModel {
        &self.copula
    }

    pub fn report(&self) -> ValidationReport {
        ValidationReport {
            n: self.n,
            k: self.k,
            copula: self.copula.validate(),
        }
    }

    /// `n * C(n-1, n-k)`, the reciprocal of `B(n-k+1, k)`, from exact
    /// integer arithmetic.
    pub fn order_statistic_constant(&self) -> f64 {
        (self.n as u128 * binomial(self.n - 1, self.n - self.k)) as f64
    }

    /// Length scale for the first quadrature segments: a sixteenth of the
    /// smaller marginal median.
    pub(crate) fn resolution(&self) -> f64 {
        let m = self.component.quantile_unchecked(0.5).min(self.standby.quantile_unchecked(0.5));
        if m.is_finite() && m > 0.0 {
            m / 16.0
        } else {
            0.0
        }
    }

    /// Applies the lifetime rule to one draw of component lifetimes and the
    /// standby lifetime.
    pub fn lifetime_from_draws(&self, z: &[f64], standby: f64) -> Result<Lifetimes> {
        if z.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: z.len() });
        }
        if let Some(bad) = z.iter().chain(std::iter::once(&standby)).find(|x| !(**x >= 0.0)) {
            return Err(domain(format!("lifetime {bad} is negative or NaN")));
        }
        let mut sorted = z.to_vec();
        Ok(self.lifetimes_in_place(&mut sorted, standby))
    }

    /// Sorts `z` in place and applies the lifetime rule without checks.
    pub(crate) fn lifetimes_in_place(&self, z: &mut [f64], standby: f64) -> Lifetimes {
        z.sort_unstable_by(f64::total_cmp);
        let pivot = self.n - self.k;
        let failure = z[pivot];
        let system = if self.k == 1 {
            failure + standby
        } else {
            failure + (z[pivot + 1] - failure).min(standby)
        };
        Lifetimes {
            system,
            k_out_of_n_failure: failure,
            first_failure: z[0],
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
