//! Dependence functions: closed-form catalog, copulas, Pickands functions and their validation.

pub mod catalog;
pub mod formulas;
mod scalar;
mod validate;

use std::fmt;

pub use scalar::Scalar;
pub use validate::{validate, ValidationConfig, ValidationReport, Violation};

use crate::error::{Error, Result};
use crate::presets::ExampleId;

const SIMPLEX_TOL: f64 = 1e-12;

/// Point of the unit simplex given by its first `d - 1` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    alpha: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::OffSimplex(format!("{alpha:?} has a negative coordinate")));
        }
        let s: f64 = alpha.iter().sum();
        if s > 1.0 + SIMPLEX_TOL {
            return Err(Error::OffSimplex(format!("{alpha:?} sums to {s}")));
        }
        Ok(SimplexPoint { alpha })
    }

    /// `alpha_j = tau_j / sum tau`.
    pub fn from_tau(tau: &[f64]) -> Result<Self> {
        let s: f64 = tau.iter().sum();
        if tau.len() < 2 || s <= 0.0 || tau.iter().any(|t| *t < 0.0) {
            return Err(Error::OffSimplex(format!("{tau:?} has no direction")));
        }
        Self::new(tau[..tau.len() - 1].iter().map(|t| t / s).collect())
    }

    pub fn coords(&self) -> &[f64] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.len() + 1
    }

    /// All `d` coordinates, the last one implied.
    pub fn full(&self) -> Vec<f64> {
        let mut v = self.alpha.clone();
        v.push((1.0 - self.alpha.iter().sum::<f64>()).max(0.0));
        v
    }
}

/// The functions describing a multivariate extreme value law.
///
/// Implementors supply marginal indices, `hat Gamma` and `theta`; everything
/// else follows: `Gamma(tau) = theta(tau/theta_m) hat Gamma(tau/theta_m)`,
/// `G = exp(-theta hat Gamma)`, `C(t) = exp(-Gamma(-log t))` and
/// `H(t) = C(t_1^theta_1, ..., t_d^theta_d)`.
pub trait DependenceFunctions: Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn marginals(&self) -> Vec<f64>;
    fn gamma_hat(&self, tau: &[f64]) -> f64;
    /// `theta(0)` is taken to be 1.
    fn theta(&self, tau: &[f64]) -> f64;

    fn gamma(&self, tau: &[f64]) -> f64 {
        if tau.iter().all(|t| *t == 0.0) {
            return 0.0;
        }
        let s: Vec<f64> = tau.iter().zip(self.marginals()).map(|(t, m)| t / m).collect();
        self.theta(&s) * self.gamma_hat(&s)
    }

    fn g(&self, tau: &[f64]) -> f64 {
        if tau.iter().all(|t| *t == 0.0) {
            return 1.0;
        }
        (-self.theta(tau) * self.gamma_hat(tau)).exp()
    }

    fn pickands(&self, alpha: &SimplexPoint) -> Result<f64> {
        if alpha.dim() != self.dim() {
            return Err(Error::OffSimplex(format!("expected {} coordinates", self.dim())));
        }
        Ok(self.gamma(&alpha.full()))
    }

    fn copula(&self, t: &[f64]) -> f64 {
        if t.iter().any(|x| *x <= 0.0) {
            return 0.0;
        }
        let tau: Vec<f64> = t.iter().map(|x| 0.0 - x.ln()).collect();
        (-self.gamma(&tau)).exp()
    }

    fn h(&self, t: &[f64]) -> f64 {
        let s: Vec<f64> = t.iter().zip(self.marginals()).map(|(x, m)| x.powf(m)).collect();
        self.copula(&s)
    }
}

/// Catalog entry of a worked example, evaluated in `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosedForm(pub ExampleId);

pub fn closed_form(id: ExampleId) -> ClosedForm {
    ClosedForm(id)
}

impl ClosedForm {
    pub fn theta_on_simplex(&self, alpha: &SimplexPoint) -> Result<f64> {
        catalog::theta_on_simplex(self.0, &alpha.full())
    }
}

impl DependenceFunctions for ClosedForm {
    fn name(&self) -> String {
        self.0.key().to_string()
    }

    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn marginals(&self) -> Vec<f64> {
        catalog::marginals(self.0).expect("f64 catalog is total")
    }

    fn gamma_hat(&self, tau: &[f64]) -> f64 {
        catalog::gamma_hat(self.0, tau).unwrap_or(f64::NAN)
    }

    fn theta(&self, tau: &[f64]) -> f64 {
        catalog::theta(self.0, tau).unwrap_or(f64::NAN)
    }

    fn gamma(&self, tau: &[f64]) -> f64 {
        catalog::gamma(self.0, tau).unwrap_or(f64::NAN)
    }
}

/// Logistic Pickands function `(alpha^(1/beta) + (1 - alpha)^(1/beta))^beta`.
#[allow(non_snake_case)]
pub fn logistic_D(alpha: f64, beta: f64) -> Result<f64> {
    Ok(Logistic::new(beta)?.gamma_hat(&[alpha, 1.0 - alpha]))
}

/// Bivariate logistic model with `hat Gamma(tau) = (tau_1^(1/beta) + tau_2^(1/beta))^beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Logistic {
    beta: f64,
}

impl Logistic {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Domain(format!("logistic parameter {beta} outside (0, 1]")));
        }
        Ok(Logistic { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl DependenceFunctions for Logistic {
    fn name(&self) -> String {
        format!("logistic(beta={})", self.beta)
    }

    fn dim(&self) -> usize {
        2
    }

    fn marginals(&self) -> Vec<f64> {
        vec![1.0, 1.0]
    }

    fn gamma_hat(&self, tau: &[f64]) -> f64 {
        let m = tau[0].max(tau[1]);
        if m == 0.0 {
            return 0.0;
        }
        // factor out the larger component so small beta does not underflow
        let p = 1.0 / self.beta;
        m * ((tau[0] / m).powf(p) + (tau[1] / m).powf(p)).powf(self.beta)
    }

    fn theta(&self, _tau: &[f64]) -> f64 {
        1.0
    }
}

/// Bivariate model given only by a Pickands function, with `theta = 1`.
pub struct PickandsModel<F> {
    name: String,
    d: F,
}

impl<F: Fn(f64) -> f64 + Sync> PickandsModel<F> {
    pub fn new(name: impl Into<String>, d: F) -> Self {
        PickandsModel { name: name.into(), d }
    }
}

impl<F> fmt::Debug for PickandsModel<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PickandsModel").field("name", &self.name).finish()
    }
}

impl<F: Fn(f64) -> f64 + Sync> DependenceFunctions for PickandsModel<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn dim(&self) -> usize {
        2
    }

    fn marginals(&self) -> Vec<f64> {
        vec![1.0, 1.0]
    }

    fn gamma_hat(&self, tau: &[f64]) -> f64 {
        let s = tau[0] + tau[1];
        if s == 0.0 {
            0.0
        } else {
            s * (self.d)(tau[0] / s)
        }
    }

    fn theta(&self, _tau: &[f64]) -> f64 {
        1.0
    }
}
