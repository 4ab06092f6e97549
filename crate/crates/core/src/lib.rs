//! Free-knot polynomial spline Chebyshev approximation: deviation analysis,
//! quasidifferentials and inf-stationarity tests.

pub mod binom;
pub mod corpus;
pub mod deviation;
pub mod error;
pub mod poly;
pub mod quasidiff;
pub mod solvers;
pub mod spline;
pub mod stationarity;
pub mod target;
pub mod transform;

pub use deviation::{
    alternation_sequence, deviation_profile, Alternation, DeviationProfile, ExtremePoint, Location,
    ProfileSettings, Stability,
};
pub use error::{FkError, Result};
pub use poly::Polynomial;
pub use quasidiff::{
    confined_quasidiff, directional_derivative, grad_piece, objective_quasidiff, point_quasidiff,
    GeneratorSet, ParamVector, Quasidifferential,
};
pub use solvers::{
    best_fixed_knot_spline, best_polynomial, meinardus_fit, meinardus_fit_with, FitMethod,
    FitResult, MeinardusFit, Segment, Step1,
};
pub use spline::{normalize, KnotClass, KnotKind, SplineData, SplineModel};
pub use stationarity::{
    analyze, characterization_check, find_stationary_interval, interval_stationary, raw_inclusion,
    raw_interval_stationary, theorem1_check, zero_in_hull, AnalysisSettings,
    CharacterizationVerdict, Evidence, HullCertificate, HullVerdict, IntervalReport,
    IntervalVerdict, StationarityReport, Theorem1Verdict,
};
pub use target::{Expr, ExprPiece, TargetFunction, TargetKind};
pub use transform::{
    block_structure, build_transform, transformed_generators, BlockStructure, TransformMatrices,
    TransformedGenerators,
};
