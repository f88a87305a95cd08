//! Limit objects computed two ways: exact measure ratios at finite `n` for circle
//! systems, and Monte Carlo orbit statistics for every system.

mod diagnostics;
mod exact;
mod mc;

use std::fmt;

pub use diagnostics::{
    fit_two_piece_breakpoint, mixing_diagnostic, Breakpoint, ConditionCheckConfig, MixingDiagnostic,
};
pub use exact::{
    aq_set, delta_prime_exact, exceedance_union, gamma_hat, theta_exact, theta_limit, AqSet, DeltaPrime, ThetaCell,
    ThetaLimit,
};
pub use mc::{delta_prime_mc, g_value, mc_block_maxima, mc_theta_runs, RunsConfig};

use crate::dynamics::MapSpec;
use crate::error::{Error, Result};
use crate::geometry::{to_f64, Boundary, IntervalSet, Rational, TorusRect};
use crate::observables::{exceedance_sets, thresholds, FrequencyVector, MaximalSet, ObservableSpec, ThresholdVector};

/// Default block lengths for limit extraction.
pub const DEFAULT_N_SCHEDULE: [u64; 4] = [1 << 10, 1 << 14, 1 << 18, 1 << 22];
/// Default largest `q`.
pub const DEFAULT_Q_MAX: usize = 6;
/// Successive exact ratios closer than this count as equal.
pub const EXACT_STABILITY_TOL: f64 = 1e-9;

/// A map together with its vector observable.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    pub map: MapSpec,
    pub observables: Vec<ObservableSpec>,
    pub boundary: Boundary,
}

impl System {
    pub fn new(map: MapSpec, observables: Vec<ObservableSpec>) -> Result<Self> {
        if observables.is_empty() {
            return Err(Error::InvalidObservable("no observables".into()));
        }
        for o in &observables {
            let ok = matches!(
                (&map, &o.z),
                (MapSpec::ExpandingBase(_), MaximalSet::FinitePoints(_))
                    | (MapSpec::ToralAuto(_), MaximalSet::UnstableSegment { .. })
            );
            if !ok {
                return Err(Error::TypeMismatch(
                    "maximal set does not live on the phase space of the map",
                ));
            }
        }
        Ok(System {
            map,
            observables,
            boundary: Boundary::Circle,
        })
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn dim(&self) -> usize {
        self.observables.len()
    }

    pub fn is_circle(&self) -> bool {
        matches!(self.map, MapSpec::ExpandingBase(_))
    }

    pub fn thresholds(&self, tau: &FrequencyVector, n: u64) -> Result<ThresholdVector> {
        thresholds(&self.observables, tau, n, self.boundary)
    }

    /// `U_i^(n)(tau_i)` for circle systems.
    pub fn exceedance_sets(&self, tau: &FrequencyVector, n: u64) -> Result<Vec<IntervalSet>> {
        if !self.is_circle() {
            return Err(Error::Unsupported("exact exceedance sets on the torus"));
        }
        let th = self.thresholds(tau, n)?;
        exceedance_sets(&self.observables, &th, self.boundary)
    }

    /// `U_i^(n)(tau_i)` for torus systems, as eigen-frame rectangles.
    pub fn exceedance_rects(&self, tau: &FrequencyVector, n: u64) -> Result<Vec<Option<TorusRect>>> {
        let th = self.thresholds(tau, n)?;
        self.observables
            .iter()
            .zip(&th.radii)
            .map(|(o, r)| match r {
                None => Ok(None),
                Some(r) => o.exceedance_rect(to_f64(r)),
            })
            .collect()
    }
}

/// How an estimate was obtained and whether it can be trusted as a limit value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Ok,
    NotStabilized,
    Undefined,
    BudgetExceeded,
    Infeasible,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::NotStabilized => "not-stabilized",
            Status::Undefined => "undefined",
            Status::BudgetExceeded => "budget-exceeded",
            Status::Infeasible => "infeasible",
        })
    }
}

/// A value with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub value: f64,
    /// Zero for exact values.
    pub stderr: f64,
    /// The exact rational when the computation is exact.
    pub exact: Option<Rational>,
    pub n: u64,
    pub q: usize,
    pub seed: Option<u64>,
    pub trials: u64,
    pub status: Status,
}

impl EstimateResult {
    pub fn exact(value: Rational, n: u64, q: usize) -> Self {
        EstimateResult {
            value: to_f64(&value),
            stderr: 0.0,
            exact: Some(value),
            n,
            q,
            seed: None,
            trials: 0,
            status: Status::Ok,
        }
    }

    pub fn approx(value: f64, stderr: f64, n: u64, q: usize) -> Self {
        EstimateResult {
            value,
            stderr,
            exact: None,
            n,
            q,
            seed: None,
            trials: 0,
            status: Status::Ok,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// `|value - target| <= k * stderr + slack`.
    pub fn within(&self, target: f64, k: f64, slack: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr + slack
    }
}
