//! Out-of-sample scoring of fixed siting decisions.
//!
//! With the decision fixed, scenario `l` earns
//!
//! ```text
//! revenue_l = Σ r e_k v_ijk I_jl      penalty_l = Σ s d_ij v_ijk (1 − I_jl)
//! cost      = Σ_j (g u_j + h_j x_j)   objective_l = revenue_l − penalty_l − cost
//! ```
//!
//! Every term is a product of integral inputs, so per-scenario values are
//! exact in `f64` for desk-scale data.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{eligible_pairs, Instance};
use crate::model::SolutionSummary;
use crate::reliability::{
    optimal_cv_coefficient, sample_paired_scenarios, EstimationMethod, PairedScenarioSet,
};
use crate::stats::{compensated_sum, sample_variance, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub revenue: f64,
    pub penalty: f64,
    pub cost: f64,
}

impl ObjectiveBreakdown {
    pub fn objective(&self) -> f64 {
        self.revenue - self.penalty - self.cost
    }
}

/// Per-station revenue and penalty at stake, plus the fixed cost.
struct Exposure {
    revenue: Vec<f64>,
    penalty: Vec<f64>,
    cost: f64,
}

fn exposure(inst: &Instance, sol: &SolutionSummary) -> Exposure {
    let p = &inst.params;
    let n_j = inst.num_stations();
    let mut revenue = vec![CompensatedSum::new(); n_j];
    let mut penalty = vec![CompensatedSum::new(); n_j];
    for (i, node) in sol.assignments.iter().enumerate() {
        for (j, row) in node.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                if v > 0 {
                    let v = v as f64;
                    revenue[j].add(p.price_rate * inst.vehicle_types[k].energy_per_charge * v);
                    penalty[j].add(p.penalty_rate * inst.travel_time[i][j] * v);
                }
            }
        }
    }
    let mut cost = CompensatedSum::new();
    for (j, s) in inst.stations.iter().enumerate() {
        cost.add(p.connector_cost * f64::from(sol.connectors[j]));
        if sol.is_open(inst, j) {
            cost.add(s.daily_cost);
        }
    }
    Exposure {
        revenue: revenue.iter().map(CompensatedSum::value).collect(),
        penalty: penalty.iter().map(CompensatedSum::value).collect(),
        cost: cost.value(),
    }
}

fn check_shape(inst: &Instance, sol: &SolutionSummary) -> Result<()> {
    let (n_i, n_j, n_k) = (inst.num_nodes(), inst.num_stations(), inst.num_types());
    let ok = sol.connectors.len() == n_j
        && sol.assignments.len() == n_i
        && sol.assignments.iter().all(|r| r.len() == n_j && r.iter().all(|c| c.len() == n_k));
    if ok {
        Ok(())
    } else {
        Err(Error::InfeasibleSolution(format!("dimensions do not match a {n_i}x{n_j}x{n_k} instance")))
    }
}

/// Revenue, penalty and cost of one scenario; `indicators[j]` is 1 when
/// station `j` is up.
pub fn decompose_objective(inst: &Instance, sol: &SolutionSummary, indicators: &[u8]) -> Result<ObjectiveBreakdown> {
    check_shape(inst, sol)?;
    if indicators.len() != inst.num_stations() {
        return Err(Error::LengthMismatch { left: indicators.len(), right: inst.num_stations() });
    }
    let ex = exposure(inst, sol);
    Ok(breakdown(&ex, indicators.iter().map(|&b| b != 0)))
}

fn breakdown(ex: &Exposure, up: impl Iterator<Item = bool>) -> ObjectiveBreakdown {
    let mut revenue = CompensatedSum::new();
    let mut penalty = CompensatedSum::new();
    for (j, up) in up.enumerate() {
        if up {
            revenue.add(ex.revenue[j]);
        } else {
            penalty.add(ex.penalty[j]);
        }
    }
    ObjectiveBreakdown { revenue: revenue.value(), penalty: penalty.value(), cost: ex.cost }
}

/// Checks demand satisfaction, eligibility, activation, connector and
/// capacity limits, and the station budget. Reliability rows are not
/// checked since they depend on the estimates used to build the model.
pub fn check_solution(inst: &Instance, sol: &SolutionSummary) -> Result<()> {
    check_shape(inst, sol)?;
    let bad = |msg: String| Err(Error::InfeasibleSolution(msg));
    let elig = eligible_pairs(inst);
    let open: Vec<bool> = (0..inst.num_stations()).map(|j| sol.is_open(inst, j)).collect();
    if sol.open_stations.len() > inst.params.max_stations as usize {
        return bad(format!("{} stations open, limit {}", sol.open_stations.len(), inst.params.max_stations));
    }
    for &id in &sol.open_stations {
        if !inst.stations.iter().any(|s| s.id == id) {
            return bad(format!("unknown open station {id}"));
        }
    }
    for i in 0..inst.num_nodes() {
        for k in 0..inst.num_types() {
            let served: u64 = (0..inst.num_stations()).map(|j| sol.assignments[i][j][k]).sum();
            if served != inst.demand(i, k) {
                return bad(format!(
                    "node {} type {} receives {served} of {} vehicles",
                    inst.demand_nodes[i].id,
                    inst.vehicle_types[k].id,
                    inst.demand(i, k)
                ));
            }
        }
        for j in 0..inst.num_stations() {
            if sol.assignments[i][j].iter().any(|&v| v > 0) && !(elig[i][j] && open[j]) {
                return bad(format!(
                    "node {} is served by station {} which is closed or out of reach",
                    inst.demand_nodes[i].id, inst.stations[j].id
                ));
            }
        }
    }
    for (j, s) in inst.stations.iter().enumerate() {
        let u = sol.connectors[j];
        if u > 0 && !open[j] || u > s.max_connectors {
            return bad(format!("station {} has {u} connectors", s.id));
        }
        let load: f64 = (0..inst.num_nodes())
            .flat_map(|i| (0..inst.num_types()).map(move |k| (i, k)))
            .map(|(i, k)| inst.vehicle_types[k].charge_time * sol.assignments[i][j][k] as f64)
            .sum();
        if load > s.connector_throughput * f64::from(u) + 1e-9 {
            return bad(format!("station {} needs {load} charge-minutes with {u} connectors", s.id));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    /// Variant label of the evaluated decision.
    pub solution_id: String,
    pub n_eval: usize,
    pub eval_seed: u64,
    pub method: EstimationMethod,
    pub rho: f64,
    pub mean_objective: f64,
    pub se_objective: f64,
    pub mean_revenue: f64,
    pub mean_penalty: f64,
    pub fixed_cost: f64,
    /// Fraction of scenarios in which each station is down.
    pub disruption_frequency: Vec<f64>,
    pub open_stations: usize,
    pub total_connectors: u64,
}

impl EvaluationReport {
    pub const CSV_HEADER: &'static str = "variant,n_eval,seed,mean_obj,se_obj,revenue,penalty,cost";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.solution_id,
            self.n_eval,
            self.eval_seed,
            self.mean_objective,
            self.se_objective,
            self.mean_revenue,
            self.mean_penalty,
            self.fixed_cost
        )
    }
}

/// Scores `sol` on `n_eval` fresh scenarios drawn with `eval_seed`.
///
/// With [`EstimationMethod::Cv`] each station's uptime mean is adjusted by
/// its control variate before aggregation, and the standard error comes from
/// the adjusted per-scenario objectives.
pub fn evaluate_solution(
    inst: &Instance,
    sol: &SolutionSummary,
    n_eval: usize,
    eval_seed: u64,
    method: EstimationMethod,
    rho: f64,
) -> Result<EvaluationReport> {
    check_solution(inst, sol)?;
    if n_eval < 2 {
        return Err(Error::SampleTooSmall { required: 2, actual: n_eval });
    }
    if sol.training_seed == Some(eval_seed) {
        log::warn!("evaluation seed {eval_seed} equals the training seed");
    }
    let set = sample_paired_scenarios(inst, n_eval, eval_seed, rho)?;
    evaluate_on_scenarios(inst, sol, &set, method)
}

/// As [`evaluate_solution`] on an existing scenario set.
pub fn evaluate_on_scenarios(
    inst: &Instance,
    sol: &SolutionSummary,
    set: &PairedScenarioSet,
    method: EstimationMethod,
) -> Result<EvaluationReport> {
    check_solution(inst, sol)?;
    if set.stations.len() != inst.num_stations() {
        return Err(Error::LengthMismatch { left: set.stations.len(), right: inst.num_stations() });
    }
    let n = set.n;
    let ex = exposure(inst, sol);

    // Per-station uptime coefficients: the objective is Σ_j (R_j + P_j) I_j − P_j − cost.
    let mut uptime = Vec::with_capacity(set.stations.len());
    let mut pis = Vec::with_capacity(set.stations.len());
    for st in &set.stations {
        match method {
            EstimationMethod::Cv => {
                let pi = optimal_cv_coefficient(&st.z_indicators, &st.x_indicators)?;
                let adjusted = compensated_sum(
                    st.z_indicators.iter().zip(&st.x_indicators).map(|(&z, &x)| {
                        f64::from(z) + pi * (f64::from(x) - st.control_mean())
                    }),
                ) / n as f64;
                uptime.push(adjusted);
                pis.push(pi);
            }
            EstimationMethod::Mc => {
                let hits: u64 = st.z_indicators.iter().map(|&b| u64::from(b)).sum();
                uptime.push(hits as f64 / n as f64);
                pis.push(0.0);
            }
            EstimationMethod::Analytic => {
                return Err(Error::InvalidArgument {
                    name: "method",
                    reason: "evaluation needs a sampling method (mc or cv)".into(),
                })
            }
        }
    }

    let mean_revenue = compensated_sum(uptime.iter().zip(&ex.revenue).map(|(m, r)| m * r));
    let mean_penalty = compensated_sum(uptime.iter().zip(&ex.penalty).map(|(m, p)| (1.0 - m) * p));
    let mean_objective = mean_revenue - mean_penalty - ex.cost;

    let per_scenario: Vec<f64> = (0..n)
        .map(|l| {
            let mut acc = CompensatedSum::new();
            for (j, st) in set.stations.iter().enumerate() {
                let mut up = f64::from(st.z_indicators[l]);
                if pis[j] != 0.0 {
                    up += pis[j] * (f64::from(st.x_indicators[l]) - st.control_mean());
                }
                acc.add(up * (ex.revenue[j] + ex.penalty[j]) - ex.penalty[j]);
            }
            acc.value()
        })
        .collect();
    let se_objective = (sample_variance(&per_scenario) / n as f64).sqrt();

    let disruption_frequency = set
        .stations
        .iter()
        .map(|st| 1.0 - st.z_indicators.iter().map(|&b| u64::from(b)).sum::<u64>() as f64 / n as f64)
        .collect();

    Ok(EvaluationReport {
        solution_id: sol.variant.label(),
        n_eval: n,
        eval_seed: set.seed,
        method,
        rho: set.rho,
        mean_objective,
        se_objective,
        mean_revenue,
        mean_penalty,
        fixed_cost: ex.cost,
        disruption_frequency,
        open_stations: sol.open_stations.len(),
        total_connectors: sol.connectors.iter().map(|&u| u64::from(u)).sum(),
    })
}

/// Exact per-scenario breakdowns of the first `count` scenarios of `set`.
pub fn scenario_breakdowns(
    inst: &Instance,
    sol: &SolutionSummary,
    set: &PairedScenarioSet,
    count: usize,
) -> Result<Vec<ObjectiveBreakdown>> {
    check_shape(inst, sol)?;
    let ex = exposure(inst, sol);
    Ok((0..count.min(set.n))
        .map(|l| breakdown(&ex, set.stations.iter().map(|st| st.z_indicators[l] != 0)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    /// Open stations within reach, per demand node.
    pub per_node: Vec<usize>,
    /// `histogram[c]` counts nodes reached by exactly `c` open stations.
    pub histogram: Vec<usize>,
    pub fraction_multi_covered: f64,
}

pub fn coverage_statistics(inst: &Instance, sol: &SolutionSummary) -> CoverageStats {
    let elig = eligible_pairs(inst);
    let open: Vec<bool> = (0..inst.num_stations()).map(|j| sol.is_open(inst, j)).collect();
    let per_node: Vec<usize> =
        elig.iter().map(|row| row.iter().zip(&open).filter(|(e, o)| **e && **o).count()).collect();
    let mut histogram = vec![0; open.iter().filter(|&&o| o).count() + 1];
    for &c in &per_node {
        histogram[c] += 1;
    }
    let multi = per_node.iter().filter(|&&c| c >= 2).count();
    let fraction_multi_covered = if per_node.is_empty() { 0.0 } else { multi as f64 / per_node.len() as f64 };
    CoverageStats { per_node, histogram, fraction_multi_covered }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub variant: String,
    pub method: EstimationMethod,
    pub n_eval: usize,
    pub eval_seed: u64,
    pub mean_objective: f64,
    pub se_objective: f64,
    /// `(mean − baseline mean) / |baseline mean|` against the baseline
    /// evaluated with the same method.
    pub relative_difference: f64,
    pub revenue: f64,
    pub penalty: f64,
    pub cost: f64,
    pub open_stations: usize,
    pub connectors: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub baseline: String,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub const CSV_HEADER: &'static str =
        "variant,method,n_eval,seed,mean_obj,se_obj,rel_diff,revenue,penalty,cost,open_stations,connectors";

    pub fn row(&self, variant: &str, method: EstimationMethod) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.variant == variant && r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.variant,
                r.method,
                r.n_eval,
                r.eval_seed,
                r.mean_objective,
                r.se_objective,
                r.relative_difference,
                r.revenue,
                r.penalty,
                r.cost,
                r.open_stations,
                r.connectors
            )
            .unwrap();
        }
        out
    }
}

/// Tabulates reports against the `baseline` variant. Rows keep the input
/// order.
pub fn compare_models(reports: &[EvaluationReport], baseline: &str) -> Result<ComparisonTable> {
    let Some(first) = reports.first() else {
        return Err(Error::InvalidArgument { name: "reports", reason: "nothing to compare".into() });
    };
    for r in reports {
        if r.n_eval != first.n_eval || r.eval_seed != first.eval_seed || r.rho != first.rho {
            return Err(Error::MismatchedSettings(format!(
                "{} uses n_eval={} seed={} rho={}, {} uses n_eval={} seed={} rho={}",
                first.solution_id, first.n_eval, first.eval_seed, first.rho, r.solution_id, r.n_eval, r.eval_seed, r.rho
            )));
        }
    }
    let rows = reports
        .iter()
        .map(|r| {
            let base = reports
                .iter()
                .find(|b| b.solution_id == baseline && b.method == r.method)
                .ok_or_else(|| Error::MismatchedSettings(format!("no `{baseline}` report for method {}", r.method)))?;
            Ok(ComparisonRow {
                variant: r.solution_id.clone(),
                method: r.method,
                n_eval: r.n_eval,
                eval_seed: r.eval_seed,
                mean_objective: r.mean_objective,
                se_objective: r.se_objective,
                relative_difference: (r.mean_objective - base.mean_objective) / base.mean_objective.abs(),
                revenue: r.mean_revenue,
                penalty: r.mean_penalty,
                cost: r.fixed_cost,
                open_stations: r.open_stations,
                connectors: r.total_connectors,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ComparisonTable { baseline: baseline.to_string(), rows })
}
