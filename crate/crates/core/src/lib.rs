//! Finite-volume solvers for the 1-D and 2-D compressible Euler equations
//! built on low-dissipation central-upwind fluxes.
//!
//! The pipeline is: cell averages ([`mesh`]) → limited piecewise-linear
//! reconstruction ([`reconstruction`]) → interface fluxes ([`flux`]) →
//! semi-discrete right-hand side and SSP-RK3 stepping ([`integrator`]).
//! [`problems`] holds the benchmark setups and [`diagnostics`] the metrics
//! used to compare schemes.

// `!(x > 0.0)` is used on purpose so that NaN fails admissibility checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod euler;
pub mod flux;
pub mod integrator;
pub mod mesh;
pub mod problems;
pub mod reconstruction;

pub use error::{Location, SolverError, StateError};
pub use euler::{ConservedState1D, ConservedState2D, EulerState, GasModel, Primitive1D, Primitive2D};
pub use flux::{Desingularization, SchemeFlavor};
pub use integrator::{
    run, Euler1D, Euler2D, IntegratorConfig, RunFailure, RunOutput, SchemeConfig, SemiDiscrete,
    SnapshotSink, StepRecord,
};
pub use mesh::{
    BoundaryCondition, BoundarySpec1D, BoundarySpec2D, Field1D, Field2D, Grid1D, Grid2D,
};
pub use reconstruction::LimiterConfig;
