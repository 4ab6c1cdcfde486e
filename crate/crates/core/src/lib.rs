//! Reliability-aware siting of EV charging stations under random electricity
//! disruptions.
//!
//! The crate is organised as a pipeline:
//!
//! 1. [`instance`] holds the problem data (stations, demand nodes, vehicle
//!    types, travel times, economic parameters), the bundled parameter set and
//!    a seeded synthetic demand generator.
//! 2. [`reliability`] simulates paired disruption scenarios and estimates each
//!    station's reliability by plain Monte Carlo or with a control variate.
//! 3. [`model`] turns an instance plus reliability estimates into a
//!    mixed-integer program (robust, non-robust or misspecified), presolves it
//!    and maps solver output back to a siting decision.
//! 4. [`solver`] is a self-contained exact MIP solver: bounded-variable simplex,
//!    best-first branch-and-bound, a brute-force oracle and a feasibility
//!    checker.
//! 5. [`evaluation`] scores fixed siting decisions out-of-sample.
//!
//! [`pipeline::solve_variant`] chains steps 3 and 4, and [`mps`] exports
//! models for third-party solvers.

pub mod error;
pub mod evaluation;
pub mod instance;
pub mod model;
pub mod mps;
pub mod normal;
pub mod pipeline;
pub mod reliability;
pub mod rng;
pub mod solver;
pub mod stats;
pub mod toy;

pub use error::{Error, Result};
pub use evaluation::{
    check_solution, compare_models, coverage_statistics, decompose_objective, evaluate_solution,
    ComparisonRow, ComparisonTable, CoverageStats, EvaluationReport, ObjectiveBreakdown,
};
pub use instance::{
    eligible_pairs, embedded_surabaya_parameters, generate_synthetic_demand, load_instance,
    save_instance, validate_instance, BaseInstance, DemandNode, DisruptionModel, GlobalParams,
    Instance, Station, SyntheticConfig, ValidationReport, VehicleType,
};
pub use model::{
    build_model, extract_solution, misspecify, presolve, BuildOptions, Constraint, Integrality,
    MipProblem, Presolved, Relation, SitingModel, SolutionSummary, VarKey, Variable, Variant,
};
pub use reliability::{
    analytic_reliability, cv_estimate, estimate_reliabilities, hoeffding_sample_size, mc_estimate,
    sample_paired_scenarios, EstimationMethod, PairedScenarioSet, ReliabilityEstimates,
    SamplingPlan, StationEstimate,
};
pub use pipeline::{solve_variant, SolveOutcome};
pub use solver::{
    brute_force_mip, simplex_solve, solve_mip, verify_solution, BnBConfig, BranchingRule,
    FeasibilityReport, LinearProgram, LpResult, LpStatus, MipResult, MipStatus,
};
