use super::mc::Exceedance;
use super::System;
use crate::dynamics::DEFAULT_PREIMAGE_BUDGET;
use crate::error::{Error, Result};
use crate::observables::FrequencyVector;

/// Block and gap sizes for the anti-clustering check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionCheckConfig {
    /// Number of blocks `k_n`.
    pub k_n: u64,
    /// Gap length `t_n`.
    pub t_n: u64,
    /// Largest summation index evaluated.
    pub j_cap: usize,
    /// Preimage piece budget for exact terms.
    pub budget: u128,
}

impl ConditionCheckConfig {
    /// `k_n = floor(sqrt n)`, `t_n = floor(n^(1/4))`, terms up to `j = 20`.
    pub fn for_n(n: u64) -> Self {
        ConditionCheckConfig {
            k_n: n.isqrt().max(1),
            t_n: n.isqrt().isqrt(),
            j_cap: 20,
            budget: DEFAULT_PREIMAGE_BUDGET,
        }
    }

    pub fn with_j_cap(mut self, j_cap: usize) -> Self {
        self.j_cap = j_cap;
        self
    }

    /// `k_n` increasing and `k_n t_n / n` decreasing along the schedule.
    pub fn schedule_is_admissible(n_schedule: &[u64]) -> bool {
        let cfgs: Vec<(u64, f64)> = n_schedule
            .iter()
            .map(|&n| {
                let c = Self::for_n(n);
                (c.k_n, (c.k_n * c.t_n) as f64 / n as f64)
            })
            .collect();
        cfgs.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1)
    }
}

/// Empirical autocorrelation of the indicator of `A_n^(q)` along one orbit.
///
/// Diagnostic only: decaying correlations are consistent with, but do not verify,
/// the mixing condition.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingDiagnostic {
    pub mean: f64,
    pub autocorrelation: Vec<f64>,
    pub label: &'static str,
}

pub fn mixing_diagnostic(
    sys: &System,
    tau: &FrequencyVector,
    n: u64,
    q: usize,
    orbit_length: usize,
    max_lag: usize,
    seed: u64,
) -> Result<MixingDiagnostic> {
    if orbit_length <= max_lag {
        return Err(Error::Domain("orbit shorter than the largest lag".into()));
    }
    let ex = Exceedance::new(sys, tau, n)?;
    let mut o = ex.orbit(seed, 0);
    let e: Vec<bool> = (0..orbit_length + q)
        .map(|_| {
            let hit = o.exceeds();
            o.advance();
            hit
        })
        .collect();
    let ind: Vec<bool> = (0..orbit_length)
        .map(|i| e[i] && !e[i + 1..=i + q].iter().any(|&x| x))
        .collect();
    let m = ind.iter().filter(|&&x| x).count() as f64 / orbit_length as f64;
    let var = m - m * m;
    let autocorrelation = (1..=max_lag)
        .map(|k| {
            if var <= 0.0 {
                return f64::NAN;
            }
            let pairs = orbit_length - k;
            let joint = (0..pairs).filter(|&i| ind[i] && ind[i + k]).count() as f64 / pairs as f64;
            (joint - m * m) / var
        })
        .collect();
    Ok(MixingDiagnostic {
        mean: m,
        autocorrelation,
        label: "diagnostic only",
    })
}

/// Two least-squares lines and the abscissa where they meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub x: f64,
    pub left: (f64, f64),
    pub right: (f64, f64),
    pub sse: f64,
}

fn ols(x: &[f64], y: &[f64]) -> ((f64, f64), f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let sse = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    ((slope, icpt), sse)
}

/// Best split of sorted points into two linear pieces (at least two points each).
pub fn fit_two_piece_breakpoint(x: &[f64], y: &[f64]) -> Result<Breakpoint> {
    if x.len() != y.len() || x.len() < 4 {
        return Err(Error::Domain("need at least four (x, y) pairs".into()));
    }
    if x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("abscissae must be strictly increasing".into()));
    }
    let mut best: Option<Breakpoint> = None;
    for k in 2..=x.len() - 2 {
        let (left, s1) = ols(&x[..k], &y[..k]);
        let (right, s2) = ols(&x[k..], &y[k..]);
        if left.0 == right.0 {
            continue;
        }
        let bx = (right.1 - left.1) / (left.0 - right.0);
        let cand = Breakpoint {
            x: bx,
            left,
            right,
            sse: s1 + s2,
        };
        if best.is_none_or(|b| cand.sse < b.sse) {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| Error::Undefined("parallel pieces have no breakpoint".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule_is_admissible() {
        assert!(ConditionCheckConfig::schedule_is_admissible(
            &super::super::DEFAULT_N_SCHEDULE
        ));
        let c = ConditionCheckConfig::for_n(1 << 18);
        assert_eq!((c.k_n, c.t_n), (512, 22));
    }

    #[test]
    fn breakpoint_of_exact_kink() {
        let x: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&a| if a <= 0.55 { 1.0 - a } else { 2.0 * a - 0.65 })
            .collect();
        let b = fit_two_piece_breakpoint(&x, &y).unwrap();
        assert!((b.x - 0.55).abs() < 1e-9, "{b:?}");
        assert!(b.sse < 1e-20);
        assert!(fit_two_piece_breakpoint(&x[..3], &y[..3]).is_err());
    }
}
