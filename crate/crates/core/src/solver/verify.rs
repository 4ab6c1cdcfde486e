use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::MipProblem;

const LIST_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// Largest row violation per constraint family (every family present).
    pub max_violation_by_family: BTreeMap<String, f64>,
    /// Rows violated by more than 1e-9, with the amount.
    pub violated_rows: Vec<(String, f64)>,
    /// Integer columns off an integer by more than 1e-9, with the distance.
    pub integrality_violations: Vec<(String, f64)>,
    pub bound_violations: Vec<(String, f64)>,
    pub objective: f64,
}

impl FeasibilityReport {
    pub fn max_violation(&self) -> f64 {
        let rows = self.max_violation_by_family.values().copied();
        let ints = self.integrality_violations.iter().map(|e| e.1);
        let bounds = self.bound_violations.iter().map(|e| e.1);
        rows.chain(ints).chain(bounds).fold(0.0, f64::max)
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

/// Re-evaluates every row, bound and integrality condition at `values`.
pub fn verify_solution(prob: &MipProblem, values: &[f64]) -> FeasibilityReport {
    let mut by_family: BTreeMap<String, f64> = BTreeMap::new();
    let mut violated_rows = Vec::new();
    let n = prob.num_vars();
    let mut padded;
    let values = if values.len() >= n {
        values
    } else {
        padded = values.to_vec();
        padded.resize(n, f64::NAN);
        &padded[..]
    };
    for row in &prob.constraints {
        let mut v = row.violation(values);
        if v.is_nan() {
            v = f64::INFINITY;
        }
        let entry = by_family.entry(row.family().to_string()).or_insert(0.0);
        *entry = entry.max(v);
        if v > LIST_TOL {
            violated_rows.push((row.name.clone(), v));
        }
    }
    let mut integrality_violations = Vec::new();
    let mut bound_violations = Vec::new();
    for (var, &x) in prob.variables.iter().zip(values) {
        if x.is_nan() {
            bound_violations.push((var.name.clone(), f64::INFINITY));
            continue;
        }
        let b = (var.lower - x).max(x - var.upper).max(0.0);
        if b > LIST_TOL {
            bound_violations.push((var.name.clone(), b));
        }
        if var.integrality.is_integral() {
            let d = (x - x.round()).abs();
            if d > LIST_TOL {
                integrality_violations.push((var.name.clone(), d));
            }
        }
    }
    FeasibilityReport {
        max_violation_by_family: by_family,
        violated_rows,
        integrality_violations,
        bound_violations,
        objective: prob.objective_value(values),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Integrality, Relation, Sense};

    #[test]
    fn reports_by_family() {
        let mut p = MipProblem::new("t", Sense::Maximize);
        let a = p.add_variable("a", 0.0, 1.0, Integrality::Binary, 1.0);
        let b = p.add_variable("b", 0.0, 5.0, Integrality::Integer, 1.0);
        p.add_constraint("c3_1_1", vec![(a, 1.0), (b, 1.0)], Relation::Eq, 3.0);
        p.add_constraint("c3_2_1", vec![(b, 1.0)], Relation::Le, 3.0);
        p.add_constraint("c8", vec![(a, 1.0)], Relation::Le, 1.0);

        let ok = verify_solution(&p, &[1.0, 2.0]);
        assert!(ok.is_feasible(1e-9));
        assert_eq!(ok.objective, 3.0);
        assert_eq!(ok.max_violation_by_family.len(), 2);

        let bad = verify_solution(&p, &[1.0, 3.0]);
        assert_eq!(bad.violated_rows, vec![("c3_1_1".to_string(), 1.0)]);
        assert_eq!(bad.max_violation_by_family["c3"], 1.0);

        let frac = verify_solution(&p, &[0.5, 2.5]);
        assert_eq!(frac.integrality_violations.len(), 2);
        assert_eq!(frac.integrality_violations[0].0, "a");
    }
}
