use num_traits::Zero;

use super::{ConditionCheckConfig, EstimateResult, Status, System, EXACT_STABILITY_TOL};
use crate::dynamics::DEFAULT_PREIMAGE_BUDGET;
use crate::error::{Error, Result};
use crate::geometry::{to_f64, IntervalSet, Rational};
use crate::observables::FrequencyVector;

/// `U^(n)(tau) = union_i U_i^(n)(tau_i)` on the circle.
pub fn exceedance_union(sys: &System, tau: &FrequencyVector, n: u64) -> Result<IntervalSet> {
    Ok(sys
        .exceedance_sets(tau, n)?
        .iter()
        .fold(IntervalSet::empty(), |acc, s| acc.union(s)))
}

/// `n mu(X_0 not <= u_n(tau))`: exact on the circle, rectangle areas on the torus.
pub fn gamma_hat(sys: &System, tau: &FrequencyVector, n: u64) -> Result<EstimateResult> {
    let nr = Rational::from_integer(n.into());
    if sys.is_circle() {
        let u = exceedance_union(sys, tau, n)?;
        return Ok(EstimateResult::exact(u.measure() * nr, n, 0));
    }
    let rects: Vec<_> = sys.exceedance_rects(tau, n)?.into_iter().flatten().collect();
    let mut area: f64 = rects.iter().map(|r| r.measure()).sum();
    for (i, a) in rects.iter().enumerate() {
        for b in &rects[i + 1..] {
            if a.intersects(b) {
                if rects.len() > 2 {
                    return Err(Error::Unsupported("overlapping rectangles in dimension above two"));
                }
                area -= a.overlap_area(b);
            }
        }
    }
    Ok(EstimateResult::approx(area * n as f64, 0.0, n, 0))
}

/// `A_n^(q)(tau)` with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct AqSet {
    pub set: IntervalSet,
    /// `A_n^(0)(tau)`.
    pub exceedance: IntervalSet,
    pub n: u64,
    pub q: usize,
    pub tau: FrequencyVector,
}

impl AqSet {
    pub fn components(&self) -> usize {
        self.set.num_components()
    }
}

/// `U ∩ f^-1(U^c) ∩ ... ∩ f^-q(U^c)`, exact.
pub fn aq_set(sys: &System, tau: &FrequencyVector, n: u64, q: usize) -> Result<AqSet> {
    aq_set_with_budget(sys, tau, n, q, DEFAULT_PREIMAGE_BUDGET)
}

pub(crate) fn aq_set_with_budget(sys: &System, tau: &FrequencyVector, n: u64, q: usize, budget: u128) -> Result<AqSet> {
    let u = exceedance_union(sys, tau, n)?;
    let mut a = u.clone();
    for j in 1..=q {
        if a.is_empty() {
            break;
        }
        let back = sys.map.pullback_within(&a, &u, j, budget)?;
        a = a.difference(&back);
    }
    Ok(AqSet {
        set: a,
        exceedance: u,
        n,
        q,
        tau: tau.clone(),
    })
}

/// `mu(A_n^(q)) / mu(A_n^(0))`, exact.
pub fn theta_exact(sys: &System, tau: &FrequencyVector, n: u64, q: usize) -> Result<EstimateResult> {
    let a = aq_set(sys, tau, n, q)?;
    let den = a.exceedance.measure();
    if den.is_zero() {
        return Err(Error::Undefined("empty exceedance set".into()));
    }
    Ok(EstimateResult::exact(a.set.measure() / den, n, q))
}

/// One `(n, q)` cell of a limit table.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaCell {
    pub n: u64,
    pub q: usize,
    pub value: Option<Rational>,
    pub status: Status,
}

/// Double-limit extraction with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaLimit {
    pub estimate: EstimateResult,
    pub cells: Vec<ThetaCell>,
    /// Smallest `q` from which the ratio no longer moves, at the largest `n`.
    pub stabilized_q: Option<usize>,
    /// Smallest scheduled `n` from which the stabilized value is constant.
    pub n0: Option<u64>,
}

/// `(n, first stable (q, value), value at the largest q)`.
type PerN = (u64, Option<(usize, Rational)>, Option<Rational>);

fn strictly_increasing<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// Index of the first value that all later values stay within `tol` of.
fn stabilization_index(values: &[Rational]) -> Option<usize> {
    if values.len() < 2 {
        return None;
    }
    let f: Vec<f64> = values.iter().map(to_f64).collect();
    (0..f.len() - 1).find(|&i| f[i + 1..].iter().all(|v| (v - f[i]).abs() < EXACT_STABILITY_TOL))
}

/// `lim_q lim_n mu(A_n^(q)) / mu(A_n^(0))` over finite schedules.
///
/// Reports the value at the largest `n`, the first `q` at which the ratio settles,
/// and `n0`. A ratio that keeps moving in `q` yields [`Status::NotStabilized`].
pub fn theta_limit(
    sys: &System,
    tau: &FrequencyVector,
    q_schedule: &[usize],
    n_schedule: &[u64],
) -> Result<ThetaLimit> {
    if q_schedule.is_empty() || n_schedule.is_empty() {
        return Err(Error::Domain("empty schedule".into()));
    }
    if !strictly_increasing(q_schedule) || !strictly_increasing(n_schedule) {
        return Err(Error::Domain("schedules must be strictly increasing".into()));
    }
    let mut cells = Vec::new();
    let mut per_n: Vec<PerN> = Vec::new();
    for &n in n_schedule {
        let mut values = Vec::new();
        for &q in q_schedule {
            match theta_exact(sys, tau, n, q) {
                Ok(e) => {
                    let v = e.exact.expect("exact mode");
                    cells.push(ThetaCell {
                        n,
                        q,
                        value: Some(v.clone()),
                        status: Status::Ok,
                    });
                    values.push(v);
                }
                Err(Error::BudgetExceeded { .. }) => {
                    cells.push(ThetaCell {
                        n,
                        q,
                        value: None,
                        status: Status::BudgetExceeded,
                    });
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let stable = stabilization_index(&values).map(|i| (q_schedule[i], values[i].clone()));
        per_n.push((n, stable, values.last().cloned()));
    }

    let (n_last, stable_last, raw_last) = per_n.last().cloned().expect("non-empty");
    let (value, q, status) = match stable_last {
        Some((q, v)) => (v, q, Status::Ok),
        None => match raw_last {
            Some(v) => (v, *q_schedule.last().expect("non-empty"), Status::NotStabilized),
            None => {
                let mut est = EstimateResult::approx(f64::NAN, f64::NAN, n_last, 0);
                est.status = Status::BudgetExceeded;
                return Ok(ThetaLimit {
                    estimate: est,
                    cells,
                    stabilized_q: None,
                    n0: None,
                });
            }
        },
    };

    let mut n0 = None;
    if status == Status::Ok {
        for (n, stable, _) in per_n.iter().rev() {
            match stable {
                Some((_, v)) if *v == value => n0 = Some(*n),
                _ => break,
            }
        }
    }
    let mut estimate = EstimateResult::exact(value, n_last, q);
    estimate.status = status;
    Ok(ThetaLimit {
        estimate,
        cells,
        stabilized_q: if status == Status::Ok { Some(q) } else { None },
        n0,
    })
}

/// Partial sum `n sum_{j=q+1}^{J} mu(A_n^(q) ∩ f^-j A_n^(q))` with its truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaPrime {
    pub estimate: EstimateResult,
    /// `floor(n / k_n) - 1`, the upper summation index of the full condition.
    pub j_limit: u64,
    /// Last index actually summed.
    pub j_last: usize,
    pub terms: Vec<Rational>,
}

/// Exact anti-clustering partial sum. Terms beyond the preimage budget are not
/// summed; the result then carries [`Status::BudgetExceeded`] and the achieved index.
pub fn delta_prime_exact(
    sys: &System,
    tau: &FrequencyVector,
    n: u64,
    q: usize,
    cfg: &ConditionCheckConfig,
) -> Result<DeltaPrime> {
    let a = aq_set_with_budget(sys, tau, n, q, cfg.budget)?.set;
    let j_limit = (n / cfg.k_n.max(1)).saturating_sub(1);
    let top = j_limit.min(cfg.j_cap as u64) as usize;
    let mut terms = Vec::new();
    let mut status = Status::Ok;
    let mut j_last = q;
    for j in q + 1..=top {
        match sys.map.pullback_measure_within(&a, &a, j, cfg.budget) {
            Ok(m) => {
                terms.push(m);
                j_last = j;
            }
            Err(Error::BudgetExceeded { .. }) => {
                status = Status::BudgetExceeded;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let sum = terms.iter().cloned().fold(Rational::zero(), |acc, t| acc + t) * Rational::from_integer(n.into());
    let mut estimate = EstimateResult::exact(sum, n, q);
    estimate.status = status;
    Ok(DeltaPrime {
        estimate,
        j_limit,
        j_last,
        terms,
    })
}
