//! Closed-form dependence functions of the worked examples.

use super::formulas::{self, OverlapData, PeriodicOrbit};
use super::scalar::{max, min, sum, Scalar};
use crate::error::{Error, Result};
use crate::presets::ExampleId;

fn r<S: Scalar>(n: i64, d: i64) -> S {
    S::ratio(n, d)
}

/// Expanding eigenvalue `(3 + sqrt 5) / 2` of the cat map.
pub fn cat_lambda<S: Scalar>() -> Result<S> {
    let root = r::<S>(5, 1)
        .sqrt()
        .ok_or(Error::Unsupported("the cat-map formulas are irrational"))?;
    Ok((r::<S>(3, 1) + root) / r(2, 1))
}

/// Turning point `2 lambda / (3 lambda - 1)` of the cat-map extremal index.
pub fn cat_turning_point() -> f64 {
    let l = cat_lambda::<f64>().expect("f64 has square roots");
    2.0 * l / (3.0 * l - 1.0)
}

fn check_dim<S>(id: ExampleId, tau: &[S]) -> Result<()> {
    if tau.len() != id.dim() {
        return Err(Error::Domain(format!(
            "{id} takes {} components, got {}",
            id.dim(),
            tau.len()
        )));
    }
    Ok(())
}

fn check_tau<S: Scalar>(id: ExampleId, tau: &[S]) -> Result<()> {
    check_dim(id, tau)?;
    if tau.iter().any(|t| *t < S::zero()) {
        return Err(Error::InvalidFrequency("negative component".into()));
    }
    Ok(())
}

/// Componentwise extremal indices `theta_j`.
pub fn marginals<S: Scalar>(id: ExampleId) -> Result<Vec<S>> {
    use ExampleId::*;
    let one = S::one;
    Ok(match id {
        CommonPoint | DisjointPoints | LinkedNonPeriodic => vec![one(), one()],
        Trivariate => vec![one(), one(), one()],
        LinkedPeriodic | OverlapNonPeriodic => vec![r(3, 4), r(3, 4)],
        LinkedPeriodic2 => vec![one(), r(2, 3)],
        OverlapPeriodic => vec![r(2, 3), r(2, 3)],
        CatMap => vec![one() - one() / cat_lambda::<S>()?, one()],
    })
}

/// Stable dependence function `hat Gamma(tau)`.
pub fn gamma_hat<S: Scalar>(id: ExampleId, tau: &[S]) -> Result<S> {
    use ExampleId::*;
    check_tau(id, tau)?;
    Ok(match id {
        CommonPoint => max(tau[0].clone(), tau[1].clone()),
        OverlapNonPeriodic | OverlapPeriodic => {
            tau[0].clone() + tau[1].clone() - min(tau[0].clone(), tau[1].clone()) / r(2, 1)
        }
        _ => sum(tau),
    })
}

/// Extremal index function `theta(tau)`; `theta(0)` is taken to be 1.
pub fn theta<S: Scalar>(id: ExampleId, tau: &[S]) -> Result<S> {
    check_tau(id, tau)?;
    let total = sum(tau);
    if total.is_zero() {
        return Ok(S::one());
    }
    let a: Vec<S> = tau.iter().map(|t| t.clone() / total.clone()).collect();
    theta_on_simplex(id, &a)
}

/// `theta` on the simplex; `alpha` has all `d` coordinates.
pub fn theta_on_simplex<S: Scalar>(id: ExampleId, alpha: &[S]) -> Result<S> {
    use ExampleId::*;
    check_dim(id, alpha)?;
    let a = alpha[0].clone();
    let one = S::one();
    let le = |x: i64, y: i64| a <= r(x, y);
    Ok(match id {
        CommonPoint | DisjointPoints => one,
        LinkedNonPeriodic => {
            if le(1, 3) {
                one - a
            } else {
                (one + a) / r(2, 1)
            }
        }
        LinkedPeriodic => {
            if le(1, 3) {
                r::<S>(3, 4) * (one - a)
            } else if le(2, 3) {
                r(1, 2)
            } else {
                r::<S>(3, 4) * a
            }
        }
        LinkedPeriodic2 => {
            if le(1, 4) {
                r::<S>(2, 3) * (one - a)
            } else {
                r::<S>(1, 3) + r::<S>(2, 3) * a
            }
        }
        OverlapNonPeriodic => {
            if le(1, 3) {
                (r::<S>(3, 1) - r::<S>(3, 1) * a.clone()) / (r::<S>(4, 1) - r::<S>(2, 1) * a)
            } else if le(1, 2) {
                one / (r::<S>(2, 1) - a)
            } else if le(2, 3) {
                one.clone() / (one + a)
            } else {
                r::<S>(3, 1) * a.clone() / (r::<S>(2, 1) + r::<S>(2, 1) * a)
            }
        }
        Trivariate => formulas::trivariate_theta(&a, &alpha[1], &r(1, 2), &r(1, 2)),
        OverlapPeriodic => {
            if le(1, 4) {
                r::<S>(4, 3) * (one.clone() - a.clone()) / (r::<S>(2, 1) - a)
            } else if le(1, 2) {
                one / (r::<S>(2, 1) - a)
            } else if le(3, 4) {
                one.clone() / (one + a)
            } else {
                r::<S>(4, 3) * a.clone() / (one + a)
            }
        }
        CatMap => {
            let l = cat_lambda::<S>()?;
            let turn = r::<S>(2, 1) * l.clone() / (r::<S>(3, 1) * l.clone() - one.clone());
            if a <= turn {
                one.clone() - (one.clone() + one / l) * a / r(2, 1)
            } else {
                (l.clone() - one) * a / l
            }
        }
    })
}

/// `theta` from the general-density formulas with the Lebesgue, constant-slope data of each example.
pub fn theta_from_general_formulas<S: Scalar>(id: ExampleId, alpha: &[S]) -> Result<S> {
    use ExampleId::*;
    check_dim(id, alpha)?;
    let a = &alpha[0];
    let one = S::one();
    Ok(match id {
        LinkedNonPeriodic => formulas::linked_theta(a, &one, &r(2, 1)),
        LinkedPeriodic => formulas::periodic_theta(
            a,
            &PeriodicOrbit {
                rho_zeta: one.clone(),
                rho_fzeta: one.clone(),
                df_zeta: r(2, 1),
                df_fzeta: r(2, 1),
                df2: r(4, 1),
            },
        ),
        LinkedPeriodic2 => formulas::fixed_image_theta(a, &one, &r(3, 1), &r(2, 3)),
        OverlapNonPeriodic => OverlapData::lebesgue(2).theta_nonperiodic(a),
        OverlapPeriodic => OverlapData::lebesgue(3).theta_periodic(a, &r(2, 3)),
        Trivariate => formulas::trivariate_theta(a, &alpha[1], &r(1, 2), &r(1, 2)),
        other => theta_on_simplex(other, alpha)?,
    })
}

/// `Gamma(tau)`, the stable dependence function of the limit law in its own margins.
pub fn gamma<S: Scalar>(id: ExampleId, tau: &[S]) -> Result<S> {
    use ExampleId::*;
    check_tau(id, tau)?;
    let (t1, t2) = (tau[0].clone(), tau[1].clone());
    Ok(match id {
        CommonPoint => max(t1, t2),
        DisjointPoints => t1 + t2,
        LinkedNonPeriodic | Trivariate => theta(id, tau)? * gamma_hat(id, tau)?,
        LinkedPeriodic | OverlapNonPeriodic => r::<S>(4, 3) * theta(id, tau)? * gamma_hat(id, tau)?,
        OverlapPeriodic => r::<S>(3, 2) * theta(id, tau)? * gamma_hat(id, tau)?,
        LinkedPeriodic2 => {
            if t2 >= r::<S>(2, 1) * t1.clone() {
                t2
            } else {
                t1 + t2 / r(2, 1)
            }
        }
        CatMap => {
            if t1 <= r::<S>(2, 1) * t2.clone() {
                t1 / r(2, 1) + t2
            } else {
                t1
            }
        }
    })
}

/// `theta(tau / theta_m) hat Gamma(tau / theta_m)`, the identity every catalog `Gamma` must satisfy.
pub fn gamma_by_rescaling<S: Scalar>(id: ExampleId, tau: &[S]) -> Result<S> {
    let m = marginals::<S>(id)?;
    let scaled: Vec<S> = tau.iter().zip(m).map(|(t, th)| t.clone() / th).collect();
    Ok(theta(id, &scaled)? * gamma_hat(id, &scaled)?)
}

/// Pickands function `D(alpha) = Gamma(alpha)`; `alpha` has all `d` coordinates.
pub fn pickands<S: Scalar>(id: ExampleId, alpha: &[S]) -> Result<S> {
    gamma(id, alpha)
}
