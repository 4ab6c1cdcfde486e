//! Exact MIP solving: a bounded-variable revised simplex, best-bound
//! branch-and-bound on top of it, an enumeration oracle and an independent
//! feasibility checker.

mod bnb;
mod brute;
mod lp;
mod simplex;
mod verify;

pub use bnb::{solve_mip, BnBConfig, BranchingRule, MipResult, MipStatus};
pub use brute::{brute_force_mip, DEFAULT_ENUMERATION_LIMIT};
pub use lp::{simplex_solve, Basis, BasisStatus, LinearProgram, LpResult, LpStatus, DEFAULT_ITERATION_LIMIT};
pub use verify::{verify_solution, FeasibilityReport};
