use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ConditionCheckConfig, EstimateResult, Status, System};
use crate::dynamics::{DigitSet, EigenData, LatticePoint2D, LazyDigitPoint, MapSpec};
use crate::error::{Error, Result};
use crate::geometry::TorusRect;
use crate::observables::FrequencyVector;

/// Membership oracle for `U^(n)(tau)` along simulated orbits.
pub(crate) enum Exceedance {
    Circle {
        base: u32,
        set: DigitSet,
    },
    Torus {
        matrix: [[i64; 2]; 2],
        eigen: EigenData,
        rects: Vec<TorusRect>,
    },
}

#[allow(clippy::large_enum_variant)]
pub(crate) enum Orbit<'a> {
    Digits(LazyDigitPoint, &'a DigitSet),
    Lattice {
        p: LatticePoint2D,
        matrix: [[i64; 2]; 2],
        eigen: &'a EigenData,
        rects: &'a [TorusRect],
    },
}

impl Exceedance {
    pub(crate) fn new(sys: &System, tau: &FrequencyVector, n: u64) -> Result<Self> {
        match &sys.map {
            MapSpec::ExpandingBase(b) => {
                let u = super::exact::exceedance_union(sys, tau, n)?;
                Ok(Exceedance::Circle {
                    base: *b,
                    set: DigitSet::new(*b, &u),
                })
            }
            MapSpec::ToralAuto(m) => Ok(Exceedance::Torus {
                matrix: *m,
                eigen: sys.map.eigen()?,
                rects: sys.exceedance_rects(tau, n)?.into_iter().flatten().collect(),
            }),
        }
    }

    /// Lebesgue-random starting point number `stream` of `seed`.
    pub(crate) fn orbit(&self, seed: u64, stream: u64) -> Orbit<'_> {
        match self {
            Exceedance::Circle { base, set } => Orbit::Digits(LazyDigitPoint::new(*base, seed, stream), set),
            Exceedance::Torus { matrix, eigen, rects } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream);
                Orbit::Lattice {
                    p: LatticePoint2D::new(rng.next_u64(), rng.next_u64()),
                    matrix: *matrix,
                    eigen,
                    rects,
                }
            }
        }
    }
}

impl Orbit<'_> {
    #[inline]
    pub(crate) fn exceeds(&mut self) -> bool {
        match self {
            Orbit::Digits(p, set) => set.contains(p),
            Orbit::Lattice { p, eigen, rects, .. } => {
                let (x, y) = p.centered();
                let (u, s) = eigen.project(x, y);
                rects.iter().any(|r| r.contains(u, s))
            }
        }
    }

    #[inline]
    pub(crate) fn advance(&mut self) {
        match self {
            Orbit::Digits(p, _) => p.step(),
            Orbit::Lattice { p, matrix, .. } => *p = p.mapped(matrix),
        }
    }
}

/// Fraction of stationary orbits of length `n` with `M_n <= u_n(tau)`.
pub fn mc_block_maxima(sys: &System, tau: &FrequencyVector, n: u64, trials: u64, seed: u64) -> Result<EstimateResult> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let ex = Exceedance::new(sys, tau, n)?;
    let survived: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut o = ex.orbit(seed, t);
            for _ in 0..n {
                if o.exceeds() {
                    return 0;
                }
                o.advance();
            }
            1
        })
        .sum();
    let p = survived as f64 / trials as f64;
    let mut est = EstimateResult::approx(p, (p * (1.0 - p) / trials as f64).sqrt(), n, 0);
    est.seed = Some(seed);
    est.trials = trials;
    Ok(est)
}

/// Orbit budget for the runs estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunsConfig {
    /// Total number of orbit points over all batches.
    pub orbit_length: u64,
    /// Independent orbits; their spread gives the standard error.
    pub batches: u64,
}

impl RunsConfig {
    pub fn new(orbit_length: u64) -> Self {
        RunsConfig {
            orbit_length,
            batches: 100,
        }
    }
}

/// Exceedances and run starts in one orbit of `len` points, reading `q` points past the end.
fn count_runs(ex: &Exceedance, seed: u64, stream: u64, len: u64, q: usize) -> (u64, u64) {
    let mut o = ex.orbit(seed, stream);
    let (mut exceed, mut runs) = (0u64, 0u64);
    let mut last: Option<u64> = None;
    for i in 0..len + q as u64 {
        if o.exceeds() {
            if let Some(p) = last {
                if p < len {
                    exceed += 1;
                    if i - p > q as u64 {
                        runs += 1;
                    }
                }
            }
            last = Some(i);
        }
        o.advance();
    }
    if let Some(p) = last {
        if p < len {
            exceed += 1;
            runs += 1;
        }
    }
    (exceed, runs)
}

/// Runs estimate of `theta`: exceedances followed by `q` non-exceedances, per exceedance.
pub fn mc_theta_runs(
    sys: &System,
    tau: &FrequencyVector,
    n: u64,
    q: usize,
    cfg: RunsConfig,
    seed: u64,
) -> Result<EstimateResult> {
    if cfg.orbit_length == 0 || cfg.batches == 0 {
        return Err(Error::ZeroTrials);
    }
    let batches = cfg.batches.max(2).min(cfg.orbit_length);
    let len = cfg.orbit_length / batches;
    let ex = Exceedance::new(sys, tau, n)?;
    let counts: Vec<(u64, u64)> = (0..batches)
        .into_par_iter()
        .map(|b| count_runs(&ex, seed, b, len, q))
        .collect();
    let total_e: u64 = counts.iter().map(|c| c.0).sum();
    let total_r: u64 = counts.iter().map(|c| c.1).sum();
    let mut est = EstimateResult::approx(f64::NAN, f64::NAN, n, q);
    est.seed = Some(seed);
    est.trials = batches;
    if total_e == 0 {
        est.status = Status::Undefined;
        return Ok(est);
    }
    let ratio = total_r as f64 / total_e as f64;
    let bf = batches as f64;
    let mean_e = total_e as f64 / bf;
    let ss: f64 = counts
        .iter()
        .map(|&(e, r)| {
            let d = r as f64 - ratio * e as f64;
            d * d
        })
        .sum();
    est.value = ratio;
    est.stderr = (ss / (bf * (bf - 1.0))).sqrt() / mean_e;
    Ok(est)
}

/// Monte Carlo version of the anti-clustering partial sum, for cases beyond the preimage budget.
pub fn delta_prime_mc(
    sys: &System,
    tau: &FrequencyVector,
    n: u64,
    q: usize,
    cfg: &ConditionCheckConfig,
    trials: u64,
    seed: u64,
) -> Result<EstimateResult> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let ex = Exceedance::new(sys, tau, n)?;
    let j_limit = (n / cfg.k_n.max(1)).saturating_sub(1);
    let top = j_limit.min(cfg.j_cap as u64) as usize;
    let per_trial: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut o = ex.orbit(seed, t);
            let mut e = Vec::with_capacity(top + q + 1);
            for _ in 0..=top + q {
                e.push(o.exceeds());
                o.advance();
                if e.len() == q + 1 && !(e[0] && !e[1..].iter().any(|&x| x)) {
                    return 0;
                }
            }
            let in_a = |i: usize| e[i] && !e[i + 1..=i + q].iter().any(|&x| x);
            (q + 1..=top).filter(|&j| in_a(j)).count() as u64
        })
        .collect();
    let tf = trials as f64;
    let mean = per_trial.iter().sum::<u64>() as f64 / tf;
    let var = per_trial.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (tf - 1.0).max(1.0);
    let nf = n as f64;
    let mut est = EstimateResult::approx(nf * mean, nf * (var / tf).sqrt(), n, q);
    est.seed = Some(seed);
    est.trials = trials;
    Ok(est)
}

/// `G = exp(-theta * gamma_hat)` with first-order error propagation.
pub fn g_value(theta: &EstimateResult, gamma_hat: &EstimateResult) -> EstimateResult {
    let g = (-theta.value * gamma_hat.value).exp();
    let se = g * ((gamma_hat.value * theta.stderr).powi(2) + (theta.value * gamma_hat.stderr).powi(2)).sqrt();
    let mut est = EstimateResult::approx(g, se, theta.n.max(gamma_hat.n), theta.q);
    est.status = theta.status.max(gamma_hat.status);
    est.seed = theta.seed.or(gamma_hat.seed);
    est.trials = theta.trials.max(gamma_hat.trials);
    est
}
