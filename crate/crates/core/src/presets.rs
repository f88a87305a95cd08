//! Ready-made systems for each worked example.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::MapSpec;
use crate::engine::System;
use crate::error::{Error, Result};
use crate::geometry::{rat, Rational};
use crate::observables::{GType, MaximalSet, ObservableSpec};

/// The worked examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExampleId {
    /// Both components maximal at one non-periodic point.
    CommonPoint,
    /// Two points with no orbit relation.
    DisjointPoints,
    /// `Z_2 = f(Z_1)`, non-periodic.
    LinkedNonPeriodic,
    /// `Z_2 = f(Z_1)` on a period-2 orbit.
    LinkedPeriodic,
    /// `Z_2 = f(Z_1)` with `f(Z_2) = Z_2`.
    LinkedPeriodic2,
    /// Maximal sets sharing the common image of their private points.
    OverlapNonPeriodic,
    /// Three observables at `zeta_1`, `zeta_2` and their common image.
    Trivariate,
    /// Overlap at a fixed point of the tripling map.
    OverlapPeriodic,
    /// Unstable segments of the cat map.
    CatMap,
}

impl ExampleId {
    pub const ALL: [ExampleId; 9] = [
        ExampleId::CommonPoint,
        ExampleId::DisjointPoints,
        ExampleId::LinkedNonPeriodic,
        ExampleId::LinkedPeriodic,
        ExampleId::LinkedPeriodic2,
        ExampleId::OverlapNonPeriodic,
        ExampleId::Trivariate,
        ExampleId::OverlapPeriodic,
        ExampleId::CatMap,
    ];

    /// Stable string identifier used in configs and CSV output.
    pub fn key(&self) -> &'static str {
        match self {
            ExampleId::CommonPoint => "CommonPoint_3_1_1",
            ExampleId::DisjointPoints => "DisjointPoints_3_1_2",
            ExampleId::LinkedNonPeriodic => "LinkedNonPeriodic_3_2_1",
            ExampleId::LinkedPeriodic => "LinkedPeriodic_3_2_2",
            ExampleId::LinkedPeriodic2 => "LinkedPeriodic2_3_2_3",
            ExampleId::OverlapNonPeriodic => "OverlapNonPeriodic_3_3_2",
            ExampleId::Trivariate => "Trivariate_3_3_3",
            ExampleId::OverlapPeriodic => "OverlapPeriodic_3_3_4",
            ExampleId::CatMap => "CatMap_3_4",
        }
    }

    pub fn dim(&self) -> usize {
        if *self == ExampleId::Trivariate {
            3
        } else {
            2
        }
    }

    pub fn is_circle(&self) -> bool {
        *self != ExampleId::CatMap
    }

    /// `q` used for the limit ratio.
    pub fn preset_q(&self) -> usize {
        match self {
            ExampleId::LinkedPeriodic | ExampleId::LinkedPeriodic2 | ExampleId::OverlapPeriodic | ExampleId::CatMap => {
                2
            }
            _ => 1,
        }
    }

    /// Smallest `q` after which the ratio is constant in `q` for every `tau`.
    pub fn stabilizing_q(&self) -> usize {
        match self {
            ExampleId::CommonPoint | ExampleId::DisjointPoints => 0,
            ExampleId::LinkedPeriodic | ExampleId::CatMap => 2,
            _ => 1,
        }
    }

    /// Block length used for Monte Carlo on the torus.
    pub fn torus_n(&self) -> Option<u64> {
        (*self == ExampleId::CatMap).then_some(CAT_N)
    }

    pub fn system(&self) -> System {
        build(*self).expect("preset systems are valid")
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for ExampleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        ExampleId::ALL
            .into_iter()
            .find(|e| {
                let key = e.key();
                let short = key.split('_').next().unwrap_or(key);
                t.eq_ignore_ascii_case(key) || t.eq_ignore_ascii_case(short)
            })
            .ok_or_else(|| Error::Domain(format!("unknown example id '{t}'")))
    }
}

/// Half-length of the first unstable segment of the cat-map example.
pub const CAT_EPSILON: f64 = 1.0 / 64.0;
/// Block length for the cat-map example; keeps the rectangles far from wrapping.
pub const CAT_N: u64 = 1000;

fn log_points(points: &[Rational]) -> Result<ObservableSpec> {
    ObservableSpec::new(GType::Log, MaximalSet::points(points.to_vec())?)
}

fn build(id: ExampleId) -> Result<System> {
    let (z1, z3) = (rat(1, 12), rat(1, 6));
    match id {
        ExampleId::CommonPoint => System::new(
            MapSpec::doubling(),
            vec![log_points(std::slice::from_ref(&z1))?, log_points(&[z1])?],
        ),
        ExampleId::DisjointPoints => System::new(
            MapSpec::doubling(),
            vec![log_points(&[z1])?, log_points(&[rat(1, 10)])?],
        ),
        ExampleId::LinkedNonPeriodic => System::new(MapSpec::doubling(), vec![log_points(&[z1])?, log_points(&[z3])?]),
        ExampleId::LinkedPeriodic => System::new(
            MapSpec::doubling(),
            vec![log_points(&[rat(1, 3)])?, log_points(&[rat(2, 3)])?],
        ),
        ExampleId::LinkedPeriodic2 => System::new(
            MapSpec::tripling(),
            vec![log_points(&[rat(1, 6)])?, log_points(&[rat(1, 2)])?],
        ),
        ExampleId::OverlapNonPeriodic => System::new(
            MapSpec::doubling(),
            vec![log_points(&[z1, z3.clone()])?, log_points(&[rat(7, 12), z3])?],
        ),
        ExampleId::Trivariate => System::new(
            MapSpec::doubling(),
            vec![log_points(&[z1])?, log_points(&[rat(7, 12)])?, log_points(&[z3])?],
        ),
        ExampleId::OverlapPeriodic => System::new(
            MapSpec::tripling(),
            vec![
                log_points(&[rat(1, 6), rat(1, 2)])?,
                log_points(&[rat(5, 6), rat(1, 2)])?,
            ],
        ),
        ExampleId::CatMap => {
            let map = MapSpec::cat();
            let lambda = map.eigen()?.lambda;
            let eps = CAT_EPSILON;
            System::new(
                map,
                vec![
                    ObservableSpec::new(GType::Log, MaximalSet::segment(0.0, eps)?)?,
                    ObservableSpec::new(
                        GType::Log,
                        MaximalSet::segment(
                            (lambda + lambda * lambda) * eps / 2.0,
                            (lambda * lambda - lambda) * eps / 2.0,
                        )?,
                    )?,
                ],
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in ExampleId::ALL {
            assert_eq!(id.key().parse::<ExampleId>().unwrap(), id);
            assert_eq!(id.system().dim(), id.dim());
        }
        assert_eq!("catmap".parse::<ExampleId>().unwrap(), ExampleId::CatMap);
        assert!("Nope_1".parse::<ExampleId>().is_err());
    }
}
