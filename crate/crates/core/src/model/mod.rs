//! The siting MIP: decision variables `x_j` (open station), `y_ij` (node
//! assigned to station), `v_ij^k` (vehicles of type k from node i charged at
//! station j) and `u_j` (connectors installed), with reliability-weighted
//! revenue and penalty in the objective.

mod presolve;
mod problem;
mod solution;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{eligible_pairs, validate_instance, Instance};
use crate::reliability::ReliabilityEstimates;

pub use presolve::{presolve, presolve_problem, ColumnOrigin, PresolveStatus, Presolved};
pub use problem::{Constraint, Integrality, MipProblem, Relation, Sense, VarKey, Variable};
pub use solution::{extract_solution, model_objective, SolutionSummary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Variant {
    /// Reliabilities enter as estimated.
    Robust,
    /// Every station treated as always available (`p = 1`).
    NonRobust,
    /// Estimated reliabilities scaled by `factor`, capped at 1.
    Misspecified { factor: f64 },
}

impl Variant {
    pub fn label(&self) -> String {
        match self {
            Variant::Robust => "robust".into(),
            Variant::NonRobust => "nonrobust".into(),
            Variant::Misspecified { factor } => format!("misspecified-{factor}"),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildOptions {
    /// Use `M_ij = Σ_k w_i^k` and `M_j = |I|` instead of the global big-M.
    pub tight_big_m: bool,
    /// Let presolve substitute `y_ij := x_j` on eligible pairs.
    pub fix_y_to_x: bool,
    /// Emit the per-(node, vehicle type) reliability rows.
    pub vehicle_reliability_rows: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { tight_big_m: true, fix_y_to_x: true, vehicle_reliability_rows: true }
    }
}

/// A built problem together with what it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SitingModel {
    pub problem: MipProblem,
    pub variant: Variant,
    /// Effective reliability `p̃_j` per station, as used in the problem.
    pub reliability: Vec<f64>,
    /// `factor · p̂_j` before capping, for misspecified variants.
    pub unclamped_reliability: Vec<f64>,
    pub options: BuildOptions,
}

/// Scales every estimate by `factor` and caps it at 1.
pub fn misspecify(est: &ReliabilityEstimates, factor: f64) -> Result<ReliabilityEstimates> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::InvalidArgument { name: "factor", reason: format!("{factor} must be positive") });
    }
    let mut out = est.clone();
    for s in &mut out.stations {
        s.p_hat = (factor * s.p_hat).min(1.0);
    }
    if factor != 1.0 {
        let note = format!("misspecified by factor {factor}");
        out.note = Some(match &est.note {
            Some(prev) => format!("{prev}; {note}"),
            None => note,
        });
    }
    Ok(out)
}

fn effective_reliabilities(inst: &Instance, est: &ReliabilityEstimates, variant: Variant) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut eff = Vec::with_capacity(inst.num_stations());
    let mut raw = Vec::with_capacity(inst.num_stations());
    for s in &inst.stations {
        let p_hat = est.get(s.id).ok_or(Error::MissingEstimate(s.id))?.p_hat;
        let (e, r) = match variant {
            Variant::Robust => (p_hat, p_hat),
            Variant::NonRobust => (1.0, 1.0),
            Variant::Misspecified { factor } => {
                if !(factor > 0.0 && factor.is_finite()) {
                    return Err(Error::InvalidArgument { name: "factor", reason: format!("{factor} must be positive") });
                }
                ((factor * p_hat).min(1.0), factor * p_hat)
            }
        };
        eff.push(e);
        raw.push(r);
    }
    Ok((eff, raw))
}

/// Builds the maximisation problem for one variant.
///
/// Rows, with `p̃_j` the effective reliability:
///
/// | family | rows      | constraint                                      |
/// |--------|-----------|-------------------------------------------------|
/// | `c1`   | (i, j)    | `Σ_k v_ij^k ≤ M_ij y_ij`                         |
/// | (none) | (i, j)    | `y_ij` fixed to 0 when `d_ij > d_max` (bound)    |
/// | `c3`   | (i, k)    | `Σ_j v_ij^k = w_i^k`                             |
/// | `c4`   | j         | `Σ_{i,k} t_k v_ij^k ≤ c_j u_j`                   |
/// | `c5`   | j         | `u_j ≤ q_j x_j`                                  |
/// | `c6`   | j         | `Σ_i y_ij ≤ M_j x_j`                             |
/// | `c7`   | i         | `Σ_j y_ij ≥ 1`                                   |
/// | `c8`   | 1         | `Σ_j x_j ≤ N`                                    |
/// | `c9`   | i         | `Σ_j p̃_j y_ij ≥ p̄`                               |
/// | `c10`  | (i, k)    | `Σ_j (p̃_j − p̄) v_ij^k ≥ 0` (optional)            |
pub fn build_model(inst: &Instance, est: &ReliabilityEstimates, variant: Variant, options: BuildOptions) -> Result<SitingModel> {
    let report = validate_instance(inst);
    if report.has_violations() {
        return Err(Error::Validation(report));
    }
    let (rel, unclamped) = effective_reliabilities(inst, est, variant)?;

    let n_i = inst.num_nodes();
    let n_j = inst.num_stations();
    let n_k = inst.num_types();
    let p = &inst.params;
    let eligible = eligible_pairs(inst);
    let sid = |j: usize| inst.stations[j].id;
    let nid = |i: usize| inst.demand_nodes[i].id;
    let kid = |k: usize| inst.vehicle_types[k].id;

    let mut prob = MipProblem::new(format!("siting-{}", variant.label()), Sense::Maximize);

    for j in 0..n_j {
        let c = prob.add_variable(format!("x_{}", sid(j)), 0.0, 1.0, Integrality::Binary, -inst.stations[j].daily_cost);
        prob.variables[c].branch_priority = 2;
        prob.var_index.insert(VarKey::X(j), c);
    }
    for i in 0..n_i {
        for j in 0..n_j {
            let upper = if eligible[i][j] { 1.0 } else { 0.0 };
            let c = prob.add_variable(format!("y_{}_{}", nid(i), sid(j)), 0.0, upper, Integrality::Binary, 0.0);
            prob.variables[c].branch_priority = 2;
            prob.var_index.insert(VarKey::Y(i, j), c);
        }
    }
    for i in 0..n_i {
        for j in 0..n_j {
            let d = inst.travel_time[i][j];
            for k in 0..n_k {
                let vt = &inst.vehicle_types[k];
                let coef = p.price_rate * vt.energy_per_charge * rel[j] - p.penalty_rate * d * (1.0 - rel[j]);
                let w = inst.demand(i, k) as f64;
                let c = prob.add_variable(format!("v_{}_{}_{}", nid(i), sid(j), kid(k)), 0.0, w, Integrality::Integer, coef);
                prob.var_index.insert(VarKey::V(i, j, k), c);
            }
        }
    }
    for j in 0..n_j {
        let s = &inst.stations[j];
        let c = prob.add_variable(format!("u_{}", sid(j)), 0.0, f64::from(s.max_connectors), Integrality::Integer, -p.connector_cost);
        prob.variables[c].branch_priority = 1;
        prob.var_index.insert(VarKey::U(j), c);
    }

    let col = |key| prob.var_index[&key];
    let mut rows = Vec::new();

    for i in 0..n_i {
        let m_ij = if options.tight_big_m {
            (0..n_k).map(|k| inst.demand(i, k) as f64).sum()
        } else {
            p.big_m
        };
        for j in 0..n_j {
            let mut coeffs: Vec<(usize, f64)> = (0..n_k).map(|k| (col(VarKey::V(i, j, k)), 1.0)).collect();
            coeffs.push((col(VarKey::Y(i, j)), -m_ij));
            rows.push((format!("c1_{}_{}", nid(i), sid(j)), coeffs, Relation::Le, 0.0));
        }
    }
    for i in 0..n_i {
        for k in 0..n_k {
            let coeffs = (0..n_j).map(|j| (col(VarKey::V(i, j, k)), 1.0)).collect();
            rows.push((format!("c3_{}_{}", nid(i), kid(k)), coeffs, Relation::Eq, inst.demand(i, k) as f64));
        }
    }
    for j in 0..n_j {
        let s = &inst.stations[j];
        let mut coeffs = Vec::with_capacity(n_i * n_k + 1);
        for i in 0..n_i {
            for k in 0..n_k {
                coeffs.push((col(VarKey::V(i, j, k)), inst.vehicle_types[k].charge_time));
            }
        }
        coeffs.push((col(VarKey::U(j)), -s.connector_throughput));
        rows.push((format!("c4_{}", sid(j)), coeffs, Relation::Le, 0.0));
    }
    for j in 0..n_j {
        let q = f64::from(inst.stations[j].max_connectors);
        rows.push((format!("c5_{}", sid(j)), vec![(col(VarKey::U(j)), 1.0), (col(VarKey::X(j)), -q)], Relation::Le, 0.0));
    }
    let m_j = if options.tight_big_m { n_i as f64 } else { p.big_m };
    for j in 0..n_j {
        let mut coeffs: Vec<(usize, f64)> = (0..n_i).map(|i| (col(VarKey::Y(i, j)), 1.0)).collect();
        coeffs.push((col(VarKey::X(j)), -m_j));
        rows.push((format!("c6_{}", sid(j)), coeffs, Relation::Le, 0.0));
    }
    for i in 0..n_i {
        let coeffs = (0..n_j).map(|j| (col(VarKey::Y(i, j)), 1.0)).collect();
        rows.push((format!("c7_{}", nid(i)), coeffs, Relation::Ge, 1.0));
    }
    rows.push(("c8".to_string(), (0..n_j).map(|j| (col(VarKey::X(j)), 1.0)).collect(), Relation::Le, f64::from(p.max_stations)));
    for i in 0..n_i {
        let coeffs = (0..n_j).map(|j| (col(VarKey::Y(i, j)), rel[j])).collect();
        rows.push((format!("c9_{}", nid(i)), coeffs, Relation::Ge, p.min_service_level));
    }
    if options.vehicle_reliability_rows {
        for i in 0..n_i {
            for k in 0..n_k {
                let coeffs = (0..n_j).map(|j| (col(VarKey::V(i, j, k)), rel[j] - p.min_service_level)).collect();
                rows.push((format!("c10_{}_{}", nid(i), kid(k)), coeffs, Relation::Ge, 0.0));
            }
        }
    }
    for (name, coeffs, rel, rhs) in rows {
        prob.add_constraint(name, coeffs, rel, rhs);
    }

    Ok(SitingModel { problem: prob, variant, reliability: rel, unclamped_reliability: unclamped, options })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::instance::{embedded_surabaya_parameters, generate_synthetic_demand, SyntheticConfig};
    use crate::reliability::{EstimationMethod, StationEstimate};

    pub(crate) fn uniform_estimates(inst: &Instance, p: f64) -> ReliabilityEstimates {
        ReliabilityEstimates {
            method: EstimationMethod::Analytic,
            n: 0,
            seed: None,
            rho: None,
            stations: inst
                .stations
                .iter()
                .map(|s| StationEstimate { station_id: s.id, p_hat: p, standard_error: 0.0, cv_coefficient: None })
                .collect(),
            note: None,
        }
    }

    fn desk_instance() -> Instance {
        generate_synthetic_demand(&embedded_surabaya_parameters(), &SyntheticConfig::default(), 42).unwrap()
    }

    #[test]
    fn misspecify_scales_and_caps() {
        let inst = desk_instance();
        let est = uniform_estimates(&inst, 0.977);
        let low = misspecify(&est, 0.95).unwrap();
        assert!((low.stations[0].p_hat - 0.92815).abs() < 1e-12);
        assert!(low.note.is_some());
        let high = misspecify(&est, 1.05).unwrap();
        assert_eq!(high.stations[0].p_hat, 1.0);
        assert_eq!(misspecify(&est, 1.0).unwrap(), est);
        assert!(misspecify(&est, 0.0).is_err());
    }

    #[test]
    fn desk_instance_column_counts() {
        let inst = desk_instance();
        let m = build_model(&inst, &uniform_estimates(&inst, 0.97), Variant::Robust, BuildOptions::default()).unwrap();
        let count = |f: fn(&VarKey) -> bool| m.problem.var_index.keys().filter(|k| f(k)).count();
        assert_eq!(count(|k| matches!(k, VarKey::X(_))), 11);
        assert_eq!(count(|k| matches!(k, VarKey::Y(..))), 341);
        assert_eq!(count(|k| matches!(k, VarKey::V(..))), 682);
        assert_eq!(count(|k| matches!(k, VarKey::U(_))), 11);
        assert_eq!(m.problem.num_vars(), 1045);
        assert!(m.problem.check().is_ok());
        let binaries = m.problem.variables.iter().filter(|v| v.integrality == Integrality::Binary).count();
        assert_eq!(binaries, 352);
    }

    #[test]
    fn objective_coefficients() {
        let mut inst = desk_instance();
        inst.travel_time[0][0] = 10.0;
        let est = uniform_estimates(&inst, 0.9772);
        let robust = build_model(&inst, &est, Variant::Robust, BuildOptions::default()).unwrap();
        let c = robust.problem.column(VarKey::V(0, 0, 0)).unwrap();
        let expected = 2467.0 * 90.0 * 0.9772 - 50000.0 * 10.0 * (1.0 - 0.9772);
        assert!((robust.problem.objective[c] - expected).abs() < 1e-6);
        assert!((robust.problem.objective[c] - 205_567.0).abs() < 1.0);

        let nonrobust = build_model(&inst, &est, Variant::NonRobust, BuildOptions::default()).unwrap();
        assert_eq!(nonrobust.problem.objective[c], 222_030.0);
    }

    #[test]
    fn nonrobust_equals_robust_with_unit_reliability() {
        let inst = desk_instance();
        let est = uniform_estimates(&inst, 0.97);
        let ones = uniform_estimates(&inst, 1.0);
        for opts in [BuildOptions::default(), BuildOptions { tight_big_m: false, ..BuildOptions::default() }] {
            let a = build_model(&inst, &est, Variant::NonRobust, opts).unwrap();
            let b = build_model(&inst, &ones, Variant::Robust, opts).unwrap();
            assert_eq!(a.problem.variables, b.problem.variables);
            assert_eq!(a.problem.objective, b.problem.objective);
            assert_eq!(a.problem.constraints, b.problem.constraints);
        }
    }

    #[test]
    fn big_m_choice() {
        let inst = desk_instance();
        let est = uniform_estimates(&inst, 0.97);
        let loose = build_model(&inst, &est, Variant::Robust, BuildOptions { tight_big_m: false, ..BuildOptions::default() }).unwrap();
        let row = loose.problem.constraints.iter().find(|r| r.name == "c6_1").unwrap();
        assert!(row.coefficients.contains(&(0, -99999999.0)));
        let tight = build_model(&inst, &est, Variant::Robust, BuildOptions::default()).unwrap();
        let row = tight.problem.constraints.iter().find(|r| r.name == "c6_1").unwrap();
        assert!(row.coefficients.contains(&(0, -31.0)));
        let c1 = tight.problem.constraints.iter().find(|r| r.name == "c1_1_1").unwrap();
        let w: f64 = (0..2).map(|k| inst.demand(0, k) as f64).sum();
        assert_eq!(c1.coefficients.last().unwrap().1, -w);
    }

    #[test]
    fn missing_estimate_is_an_error() {
        let inst = desk_instance();
        let mut est = uniform_estimates(&inst, 0.97);
        est.stations.pop();
        assert!(matches!(
            build_model(&inst, &est, Variant::Robust, BuildOptions::default()),
            Err(Error::MissingEstimate(11))
        ));
    }

    #[test]
    fn vehicle_rows_are_optional() {
        let inst = desk_instance();
        let est = uniform_estimates(&inst, 0.97);
        let with = build_model(&inst, &est, Variant::Robust, BuildOptions::default()).unwrap();
        let without = build_model(&inst, &est, Variant::Robust, BuildOptions { vehicle_reliability_rows: false, ..BuildOptions::default() }).unwrap();
        assert_eq!(with.problem.num_constraints() - without.problem.num_constraints(), 62);
        assert!(without.problem.constraints.iter().all(|r| r.family() != "c10"));
    }

    #[test]
    fn ineligible_assignments_are_fixed() {
        let inst = desk_instance();
        let m = build_model(&inst, &uniform_estimates(&inst, 0.97), Variant::Robust, BuildOptions::default()).unwrap();
        for i in 0..inst.num_nodes() {
            for j in 0..inst.num_stations() {
                let y = &m.problem.variables[m.problem.column(VarKey::Y(i, j)).unwrap()];
                assert_eq!(y.upper == 0.0, inst.travel_time[i][j] > 35.0);
            }
        }
    }
}
