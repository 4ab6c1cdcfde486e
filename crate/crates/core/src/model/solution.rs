use serde::{Deserialize, Serialize};

use super::{Presolved, SitingModel, VarKey, Variant};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::stats::CompensatedSum;

const INTEGRALITY_TOL: f64 = 1e-6;

/// A siting decision in instance terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub variant: Variant,
    /// Ids of open stations, ascending.
    pub open_stations: Vec<u32>,
    /// Connectors installed, by station position.
    pub connectors: Vec<u32>,
    /// Vehicles `[node][station][type]`.
    pub assignments: Vec<Vec<Vec<u64>>>,
    /// Assignment flags `[node][station]`.
    pub flags: Vec<Vec<bool>>,
    /// Objective of the model that produced the decision.
    pub model_objective: f64,
    pub effective_reliability: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training_seed: Option<u64>,
}

impl SolutionSummary {
    pub fn is_open(&self, inst: &Instance, j: usize) -> bool {
        self.open_stations.binary_search(&inst.stations[j].id).is_ok()
    }
}

/// Expected-profit objective of a decision under reliabilities `rel`.
pub fn model_objective(inst: &Instance, rel: &[f64], sol: &SolutionSummary) -> f64 {
    let p = &inst.params;
    let mut acc = CompensatedSum::new();
    for (i, node) in sol.assignments.iter().enumerate() {
        for (j, row) in node.iter().enumerate() {
            let d = inst.travel_time[i][j];
            for (k, &v) in row.iter().enumerate() {
                if v > 0 {
                    let e = inst.vehicle_types[k].energy_per_charge;
                    let coef = p.price_rate * e * rel[j] - p.penalty_rate * d * (1.0 - rel[j]);
                    acc.add(coef * v as f64);
                }
            }
        }
    }
    for (j, s) in inst.stations.iter().enumerate() {
        acc.add(-p.connector_cost * f64::from(sol.connectors[j]));
        if sol.is_open(inst, j) {
            acc.add(-s.daily_cost);
        }
    }
    acc.value()
}

fn integral(column: &str, value: f64) -> Result<f64> {
    let r = value.round();
    if (value - r).abs() > INTEGRALITY_TOL {
        return Err(Error::NonIntegral { column: column.to_string(), value });
    }
    Ok(if r == 0.0 { 0.0 } else { r })
}

/// Maps solver values for the presolved problem back to a siting decision.
pub fn extract_solution(inst: &Instance, model: &SitingModel, presolved: &Presolved, values: &[f64]) -> Result<SolutionSummary> {
    if values.len() != presolved.problem.num_vars() {
        return Err(Error::LengthMismatch { left: values.len(), right: presolved.problem.num_vars() });
    }
    let full = presolved.expand(values);
    let prob = &model.problem;
    let get = |key: VarKey| -> Result<f64> {
        let c = prob.var_index[&key];
        integral(&prob.variables[c].name, full[c])
    };

    let (n_i, n_j, n_k) = (inst.num_nodes(), inst.num_stations(), inst.num_types());
    let mut open_stations = Vec::new();
    let mut connectors = Vec::with_capacity(n_j);
    for j in 0..n_j {
        if get(VarKey::X(j))? > 0.5 {
            open_stations.push(inst.stations[j].id);
        }
        connectors.push(get(VarKey::U(j))? as u32);
    }
    open_stations.sort_unstable();
    let mut assignments = vec![vec![vec![0u64; n_k]; n_j]; n_i];
    let mut flags = vec![vec![false; n_j]; n_i];
    for i in 0..n_i {
        for j in 0..n_j {
            flags[i][j] = get(VarKey::Y(i, j))? > 0.5;
            for k in 0..n_k {
                assignments[i][j][k] = get(VarKey::V(i, j, k))? as u64;
            }
        }
    }

    let mut sol = SolutionSummary {
        variant: model.variant,
        open_stations,
        connectors,
        assignments,
        flags,
        model_objective: 0.0,
        effective_reliability: model.reliability.clone(),
        training_seed: None,
    };
    sol.model_objective = model_objective(inst, &model.reliability, &sol);
    Ok(sol)
}
