use serde::{Deserialize, Serialize};

use super::simplex::Engine;
use crate::error::{Error, Result};
use crate::model::{MipProblem, Relation, Sense};
use crate::stats::compensated_sum;

/// `maximize c·x + c0` subject to sparse rows and column bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub objective_constant: f64,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub relations: Vec<Relation>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self { objective, objective_constant: 0.0, rows: Vec::new(), relations: Vec::new(), rhs: Vec::new(), lower, upper }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.rows.push(coeffs);
        self.relations.push(relation);
        self.rhs.push(rhs);
    }

    /// LP relaxation of a MIP, always in maximisation form.
    pub fn relaxation(prob: &MipProblem) -> Self {
        let sign = match prob.sense {
            Sense::Maximize => 1.0,
            Sense::Minimize => -1.0,
        };
        Self {
            objective: prob.objective.iter().map(|c| sign * c).collect(),
            objective_constant: sign * prob.objective_constant,
            rows: prob.constraints.iter().map(|r| r.coefficients.clone()).collect(),
            relations: prob.constraints.iter().map(|r| r.relation).collect(),
            rhs: prob.constraints.iter().map(|r| r.rhs).collect(),
            lower: prob.variables.iter().map(|v| v.lower).collect(),
            upper: prob.variables.iter().map(|v| v.upper).collect(),
        }
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        compensated_sum(self.objective.iter().zip(x).map(|(c, v)| c * v)) + self.objective_constant
    }

    pub fn check(&self) -> Result<()> {
        let n = self.num_cols();
        let bad = |reason: String| Err(Error::InvalidArgument { name: "lp", reason });
        if self.lower.len() != n || self.upper.len() != n {
            return bad(format!("{n} columns but {} / {} bounds", self.lower.len(), self.upper.len()));
        }
        if self.relations.len() != self.rows.len() || self.rhs.len() != self.rows.len() {
            return bad("row, relation and rhs counts differ".into());
        }
        if self.objective.iter().any(|c| !c.is_finite()) || !self.objective_constant.is_finite() {
            return bad("non-finite objective".into());
        }
        for (j, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || *lo == f64::INFINITY || *hi == f64::NEG_INFINITY {
                return bad(format!("column {j} has bounds [{lo}, {hi}]"));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !self.rhs[i].is_finite() {
                return bad(format!("row {i} has rhs {}", self.rhs[i]));
            }
            if row.iter().any(|&(j, a)| j >= n || !a.is_finite()) {
                return bad(format!("row {i} has a bad coefficient"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisStatus {
    Basic,
    Lower,
    Upper,
    Free,
}

/// Status of every structural column followed by every row's logical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    pub status: Vec<BasisStatus>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
    pub basis: Basis,
    pub iterations: u64,
    /// Largest bound violation over columns and scaled rows.
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

pub const DEFAULT_ITERATION_LIMIT: u64 = 1_000_000;

/// Solves an LP from a warm basis or the all-logical basis.
pub fn simplex_solve(lp: &LinearProgram, warm_basis: Option<&Basis>) -> Result<LpResult> {
    lp.check()?;
    let mut eng = Engine::new(lp);
    if let Some(b) = warm_basis {
        eng.load(b);
    }
    let status = eng.solve(DEFAULT_ITERATION_LIMIT);
    let values = eng.structural_values();
    Ok(LpResult {
        status,
        objective: lp.objective_value(&values),
        values,
        basis: eng.snapshot(),
        iterations: eng.iterations,
        primal_infeasibility: eng.max_primal_infeasibility(),
        dual_infeasibility: eng.max_dual_infeasibility(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn bound_constrained() {
        let lp = LinearProgram::new(vec![1.0], vec![0.0], vec![1.0]);
        let r = simplex_solve(&lp, None).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.objective, 1.0);
        assert_eq!(r.values, vec![1.0]);
    }

    #[test]
    fn two_variable_hand_solution() {
        let mut lp = LinearProgram::new(vec![3.0, 2.0], vec![0.0, 0.0], vec![INF, INF]);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Le, 4.0);
        lp.add_row(vec![(0, 1.0)], Relation::Le, 2.0);
        let r = simplex_solve(&lp, None).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 10.0).abs() < 1e-12);
        assert!((r.values[0] - 2.0).abs() < 1e-12 && (r.values[1] - 2.0).abs() < 1e-12);
        let again = simplex_solve(&lp, Some(&r.basis)).unwrap();
        assert_eq!(again.iterations, 0);
        assert_eq!(again.values, r.values);
    }

    #[test]
    fn unbounded() {
        let lp = LinearProgram::new(vec![1.0], vec![0.0], vec![INF]);
        assert_eq!(simplex_solve(&lp, None).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0], vec![0.0, 0.0], vec![1.0, 1.0]);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Ge, 3.0);
        assert_eq!(simplex_solve(&lp, None).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_and_free_columns() {
        // max -x - y  s.t. x - y = 1, x + y >= 3, x, y free
        let mut lp = LinearProgram::new(vec![-1.0, -1.0], vec![-INF, -INF], vec![INF, INF]);
        lp.add_row(vec![(0, 1.0), (1, -1.0)], Relation::Eq, 1.0);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Ge, 3.0);
        let r = simplex_solve(&lp, None).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective + 3.0).abs() < 1e-9);
        assert!((r.values[0] - 2.0).abs() < 1e-9 && (r.values[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example, which cycles under naive Dantzig pricing.
        let mut lp = LinearProgram::new(vec![0.75, -150.0, 0.02, -6.0], vec![0.0; 4], vec![INF; 4]);
        lp.add_row(vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], Relation::Le, 0.0);
        lp.add_row(vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], Relation::Le, 0.0);
        lp.add_row(vec![(2, 1.0)], Relation::Le, 1.0);
        let r = simplex_solve(&lp, None).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 0.05).abs() < 1e-9);
    }
}
