//! Exhaustive enumeration oracle for tiny problems.
//!
//! Depth-first over integer columns in index order with interval propagation
//! on every row. Subtrees are cut only by infeasibility or by a bound built
//! from column ranges alone, never from an LP.

use std::time::Instant;

use super::bnb::{MipResult, MipStatus};
use super::lp::{simplex_solve, LinearProgram, LpStatus};
use crate::error::{Error, Result};
use crate::model::{MipProblem, Relation, Sense};
use crate::stats::compensated_sum;

pub const DEFAULT_ENUMERATION_LIMIT: u64 = 10_000_000;
const TOL: f64 = 1e-9;

struct Search<'a> {
    prob: &'a MipProblem,
    /// Objective in maximisation form.
    cost: Vec<f64>,
    int_cols: Vec<usize>,
    cont_cols: Vec<usize>,
    visited: u64,
    limit: u64,
    best: Option<(f64, Vec<f64>)>,
}

impl Search<'_> {
    /// Tightens integer bounds to a fixed point; `false` when a domain empties.
    fn propagate(&self, lo: &mut [f64], hi: &mut [f64]) -> bool {
        for _ in 0..50 {
            let mut changed = false;
            for row in &self.prob.constraints {
                let (mut amin, mut amax) = (0.0, 0.0);
                for &(c, a) in &row.coefficients {
                    let (l, h) = if a > 0.0 { (a * lo[c], a * hi[c]) } else { (a * hi[c], a * lo[c]) };
                    amin += l;
                    amax += h;
                }
                let tol = TOL * (1.0 + row.rhs.abs());
                let le = matches!(row.relation, Relation::Le | Relation::Eq);
                let ge = matches!(row.relation, Relation::Ge | Relation::Eq);
                if (le && amin > row.rhs + tol) || (ge && amax < row.rhs - tol) {
                    return false;
                }
                for &(c, a) in &row.coefficients {
                    if !self.prob.variables[c].integrality.is_integral() || lo[c] == hi[c] {
                        continue;
                    }
                    let (l, h) = if a > 0.0 { (a * lo[c], a * hi[c]) } else { (a * hi[c], a * lo[c]) };
                    // a x_c <= rhs - (amin - l) and a x_c >= rhs - (amax - h)
                    if le && amin.is_finite() {
                        let cap = row.rhs - (amin - l);
                        if a > 0.0 {
                            let nh = (cap / a + TOL).floor();
                            if nh < hi[c] {
                                hi[c] = nh;
                                changed = true;
                            }
                        } else {
                            let nl = (cap / a - TOL).ceil();
                            if nl > lo[c] {
                                lo[c] = nl;
                                changed = true;
                            }
                        }
                    }
                    if ge && amax.is_finite() {
                        let floor_ = row.rhs - (amax - h);
                        if a > 0.0 {
                            let nl = (floor_ / a - TOL).ceil();
                            if nl > lo[c] {
                                lo[c] = nl;
                                changed = true;
                            }
                        } else {
                            let nh = (floor_ / a + TOL).floor();
                            if nh < hi[c] {
                                hi[c] = nh;
                                changed = true;
                            }
                        }
                    }
                    if lo[c] > hi[c] {
                        return false;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        true
    }

    fn optimistic(&self, lo: &[f64], hi: &[f64]) -> f64 {
        compensated_sum(self.cost.iter().enumerate().map(|(c, &w)| {
            if w > 0.0 {
                w * hi[c]
            } else if w < 0.0 {
                w * lo[c]
            } else {
                0.0
            }
        }))
    }

    fn leaf(&mut self, lo: &[f64], hi: &[f64]) -> Result<()> {
        let mut x: Vec<f64> = lo.to_vec();
        if !self.cont_cols.is_empty() {
            let mut lp = LinearProgram::relaxation(self.prob);
            for &c in &self.int_cols {
                lp.lower[c] = lo[c];
                lp.upper[c] = lo[c];
            }
            for &c in &self.cont_cols {
                lp.lower[c] = lo[c];
                lp.upper[c] = hi[c];
            }
            let r = simplex_solve(&lp, None)?;
            match r.status {
                LpStatus::Optimal => x = r.values,
                LpStatus::Infeasible => return Ok(()),
                LpStatus::Unbounded => return Err(Error::InvalidArgument { name: "problem", reason: "continuous part is unbounded".into() }),
                LpStatus::IterationLimit => return Err(Error::InvalidArgument { name: "problem", reason: "LP iteration limit at a leaf".into() }),
            }
        } else if self.prob.constraints.iter().any(|r| r.violation(&x) > TOL * (1.0 + r.rhs.abs())) {
            return Ok(());
        }
        let value = compensated_sum(self.cost.iter().zip(&x).map(|(c, v)| c * v));
        if self.best.as_ref().is_none_or(|(b, _)| value > *b) {
            self.best = Some((value, x));
        }
        Ok(())
    }

    fn dfs(&mut self, lo: &mut Vec<f64>, hi: &mut Vec<f64>) -> Result<()> {
        self.visited += 1;
        if self.visited > self.limit {
            return Err(Error::EnumerationLimit { limit: self.limit });
        }
        if !self.propagate(lo, hi) {
            return Ok(());
        }
        if let Some((best, _)) = &self.best {
            if self.optimistic(lo, hi) <= *best {
                return Ok(());
            }
        }
        let Some(&c) = self.int_cols.iter().find(|&&c| lo[c] < hi[c]) else {
            return self.leaf(lo, hi);
        };
        let (l, h) = (lo[c] as i64, hi[c] as i64);
        let values: Vec<i64> = if self.cost[c] >= 0.0 { (l..=h).rev().collect() } else { (l..=h).collect() };
        for v in values {
            let (mut lo2, mut hi2) = (lo.clone(), hi.clone());
            lo2[c] = v as f64;
            hi2[c] = v as f64;
            self.dfs(&mut lo2, &mut hi2)?;
        }
        Ok(())
    }
}

/// Enumerates every integer assignment consistent with the rows.
///
/// `enumeration_limit` caps the number of search nodes visited.
pub fn brute_force_mip(prob: &MipProblem, enumeration_limit: u64) -> Result<MipResult> {
    prob.check().map_err(|reason| Error::InvalidArgument { name: "problem", reason })?;
    let started = Instant::now();
    let sign = match prob.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let int_cols: Vec<usize> = prob.integer_columns().collect();
    if int_cols.is_empty() {
        let lp = LinearProgram::relaxation(prob);
        let r = simplex_solve(&lp, None)?;
        let status = match r.status {
            LpStatus::Optimal => MipStatus::Optimal,
            LpStatus::Infeasible => MipStatus::Infeasible,
            LpStatus::Unbounded => MipStatus::Unbounded,
            LpStatus::IterationLimit => MipStatus::LimitReached,
        };
        let ok = status == MipStatus::Optimal;
        return Ok(MipResult {
            status,
            objective: ok.then_some(sign * r.objective),
            values: ok.then_some(r.values),
            bound: sign * r.objective,
            gap: if ok { 0.0 } else { f64::INFINITY },
            nodes: 1,
            lp_iterations: r.iterations,
            wall_time: started.elapsed(),
            log: Vec::new(),
        });
    }
    for &c in &int_cols {
        let v = &prob.variables[c];
        if !(v.lower.is_finite() && v.upper.is_finite()) {
            return Err(Error::InvalidArgument { name: "problem", reason: format!("integer column `{}` is unbounded", v.name) });
        }
    }
    let mut lo: Vec<f64> = prob.variables.iter().map(|v| if v.integrality.is_integral() { (v.lower - TOL).ceil() } else { v.lower }).collect();
    let mut hi: Vec<f64> = prob.variables.iter().map(|v| if v.integrality.is_integral() { (v.upper + TOL).floor() } else { v.upper }).collect();
    let mut search = Search {
        prob,
        cost: prob.objective.iter().map(|c| sign * c).collect(),
        cont_cols: (0..prob.num_vars()).filter(|&c| !prob.variables[c].integrality.is_integral()).collect(),
        int_cols,
        visited: 0,
        limit: enumeration_limit,
        best: None,
    };
    if lo.iter().zip(&hi).all(|(l, h)| l <= h) {
        search.dfs(&mut lo, &mut hi)?;
    }
    let constant = sign * prob.objective_constant;
    Ok(match search.best.take() {
        Some((v, x)) => MipResult {
            status: MipStatus::Optimal,
            objective: Some(sign * (v + constant)),
            values: Some(x),
            bound: sign * (v + constant),
            gap: 0.0,
            nodes: search.visited,
            lp_iterations: 0,
            wall_time: started.elapsed(),
            log: Vec::new(),
        },
        None => MipResult {
            status: MipStatus::Infeasible,
            objective: None,
            values: None,
            bound: f64::NEG_INFINITY,
            gap: f64::INFINITY,
            nodes: search.visited,
            lp_iterations: 0,
            wall_time: started.elapsed(),
            log: Vec::new(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Integrality;

    #[test]
    fn small_integer_program() {
        // max 5a + 4b  s.t. 6a + 4b <= 24, a + 2b <= 6, a, b in 0..=10
        let mut p = MipProblem::new("ip", Sense::Maximize);
        let a = p.add_variable("a", 0.0, 10.0, Integrality::Integer, 5.0);
        let b = p.add_variable("b", 0.0, 10.0, Integrality::Integer, 4.0);
        p.add_constraint("r1", vec![(a, 6.0), (b, 4.0)], Relation::Le, 24.0);
        p.add_constraint("r2", vec![(a, 1.0), (b, 2.0)], Relation::Le, 6.0);
        let r = brute_force_mip(&p, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(r.objective, Some(20.0));
    }

    #[test]
    fn infeasible_and_limit() {
        let mut p = MipProblem::new("ip", Sense::Maximize);
        let a = p.add_variable("a", 0.0, 3.0, Integrality::Integer, 1.0);
        p.add_constraint("r", vec![(a, 2.0)], Relation::Eq, 3.0);
        assert_eq!(brute_force_mip(&p, 100).unwrap().status, MipStatus::Infeasible);

        let mut q = MipProblem::new("wide", Sense::Minimize);
        for k in 0..20 {
            q.add_variable(format!("z{k}"), 0.0, 1.0, Integrality::Binary, 1.0);
        }
        q.add_constraint("any", (0..20).map(|k| (k, 1.0)).collect(), Relation::Ge, 0.0);
        assert!(matches!(brute_force_mip(&q, 5), Err(Error::EnumerationLimit { limit: 5 })));
    }

    #[test]
    fn pure_lp_delegates() {
        let mut p = MipProblem::new("lp", Sense::Maximize);
        let x = p.add_variable("x", 0.0, f64::INFINITY, Integrality::Continuous, 3.0);
        let y = p.add_variable("y", 0.0, f64::INFINITY, Integrality::Continuous, 2.0);
        p.add_constraint("r1", vec![(x, 1.0), (y, 1.0)], Relation::Le, 4.0);
        p.add_constraint("r2", vec![(x, 1.0)], Relation::Le, 2.0);
        let r = brute_force_mip(&p, 10).unwrap();
        assert!((r.objective.unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn mixed_columns() {
        // max x + 2z, x continuous in [0, 1.5], z integer, x + z <= 2.5
        let mut p = MipProblem::new("mixed", Sense::Maximize);
        let x = p.add_variable("x", 0.0, 1.5, Integrality::Continuous, 1.0);
        let z = p.add_variable("z", 0.0, 5.0, Integrality::Integer, 2.0);
        p.add_constraint("r", vec![(x, 1.0), (z, 1.0)], Relation::Le, 2.5);
        let r = brute_force_mip(&p, 1000).unwrap();
        assert!((r.objective.unwrap() - 4.5).abs() < 1e-9);
    }
}
