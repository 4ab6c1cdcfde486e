//! Build, presolve, solve and extract in one call.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::model::{build_model, extract_solution, presolve, BuildOptions, SolutionSummary, Variant};
use crate::reliability::ReliabilityEstimates;
use crate::solver::{solve_mip, verify_solution, BnBConfig, MipStatus};

/// Relative tolerance between the solver objective and the recomputed one.
const OBJECTIVE_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub variant: Variant,
    pub status: MipStatus,
    pub objective: Option<f64>,
    pub bound: f64,
    pub gap: f64,
    pub nodes: u64,
    pub lp_iterations: u64,
    pub columns: usize,
    pub rows: usize,
    pub presolved_columns: usize,
    pub presolved_rows: usize,
    /// Largest row, bound or integrality violation of the incumbent on the
    /// full model.
    pub max_violation: Option<f64>,
    pub solution: Option<SolutionSummary>,
    /// `node,depth,bound,incumbent,gap` lines.
    pub log: Vec<String>,
}

pub fn solve_variant(
    inst: &Instance,
    est: &ReliabilityEstimates,
    variant: Variant,
    options: BuildOptions,
    cfg: &BnBConfig,
) -> Result<SolveOutcome> {
    let model = build_model(inst, est, variant, options)?;
    let pre = presolve(&model);
    let mut out = SolveOutcome {
        variant,
        status: MipStatus::Infeasible,
        objective: None,
        bound: f64::NEG_INFINITY,
        gap: f64::INFINITY,
        nodes: 0,
        lp_iterations: 0,
        columns: model.problem.num_vars(),
        rows: model.problem.num_constraints(),
        presolved_columns: pre.problem.num_vars(),
        presolved_rows: pre.problem.num_constraints(),
        max_violation: None,
        solution: None,
        log: Vec::new(),
    };
    if let crate::model::PresolveStatus::Infeasible(row) = &pre.status {
        log::info!("{variant}: presolve proves row {row} infeasible");
        return Ok(out);
    }
    let res = solve_mip(&pre.problem, cfg)?;
    out.status = res.status;
    out.objective = res.objective;
    out.bound = res.bound;
    out.gap = res.gap;
    out.nodes = res.nodes;
    out.lp_iterations = res.lp_iterations;
    out.log = res.log;
    if let (Some(values), Some(obj)) = (&res.values, res.objective) {
        let full = pre.expand(values);
        out.max_violation = Some(verify_solution(&model.problem, &full).max_violation());
        let mut sol = extract_solution(inst, &model, &pre, values)?;
        sol.training_seed = est.seed;
        if (sol.model_objective - obj).abs() > OBJECTIVE_AGREEMENT * obj.abs().max(1.0) {
            return Err(Error::Consistency(format!(
                "{variant}: solver objective {obj} but the decision is worth {}",
                sol.model_objective
            )));
        }
        out.solution = Some(sol);
    }
    Ok(out)
}
