//! Multivariate extremes of chaotic dynamical systems: exact finite-n set
//! computations, Monte Carlo orbit statistics and a catalog of closed-form
//! dependence functions.

pub mod dependence;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod observables;
pub mod presets;
pub mod report;
pub mod verify;

pub use dependence::{closed_form, logistic_D, ClosedForm, DependenceFunctions, Logistic, SimplexPoint};
pub use dynamics::{EigenData, LatticePoint2D, LazyDigitPoint, MapSpec, Point};
pub use engine::{EstimateResult, Status, System};
pub use error::{Error, Result};
pub use geometry::{rat, rint, Arc, Boundary, IntervalSet, Rational, TorusRect};
pub use observables::{FrequencyVector, GType, MaximalSet, ObservableSpec, ThresholdVector};
pub use presets::ExampleId;
