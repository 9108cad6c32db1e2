//! Numerical renormalization of critical circle maps with arbitrary
//! critical exponent.

pub mod error;
pub mod experiments;
pub mod maps;
pub mod par;
pub mod partitions;
pub mod real;
pub mod renorm;
pub mod rotation;
pub mod stats;

pub use error::{Error, Result};
pub use experiments::{
    closest_return_scaling, estimate_convergence, estimate_delta, hyperbolicity_probe, probe_grid,
    rotation_reference, superstable_convergents, superstable_limit, superstable_sequence,
    ConvergenceOptions, ConvergenceReport, DeltaOptions, DeltaRow, ParameterEstimate, ProbeOptions,
    ProbeReport, UniversalityReport,
};
pub use maps::{build_family, CircleMapLift, CriticalCircleFamily, LiftShape, RigidRotation};
pub use par::Exec;
pub use partitions::{
    conjugacy_ratio_test, conjugacy_ratio_test_with, dynamical_partition, DynamicalPartition,
    RigidityReport,
};
pub use real::{Mp, Real, R128, R256};
pub use renorm::{
    height, pair_distance, pair_from_map, renorm_tower, renormalize, CommutingPair, Height,
    PairDistance, Tower,
};
pub use rotation::{
    cf_window, convergents, irrational_parameter, rotation_number, superstable_parameter,
    ContinuedFraction, ParameterWindow, RotationNumber, SuperstableParameter,
};
