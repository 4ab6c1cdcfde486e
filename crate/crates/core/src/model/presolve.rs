//! Optimality-preserving reductions: fixed columns are substituted out,
//! aliased columns are merged into their target, singleton rows become
//! bounds, and rows that can never bind are dropped.

use std::collections::BTreeMap;

use super::{MipProblem, Relation, SitingModel, VarKey};

const FEAS_TOL: f64 = 1e-9;
const MAX_PASSES: usize = 20;

/// Where an original column went.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColumnOrigin {
    Kept(usize),
    Fixed(f64),
    /// Equal to reduced column `.0`.
    Alias(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PresolveStatus {
    Reduced,
    /// Named row cannot be satisfied under the column bounds.
    Infeasible(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Presolved {
    pub problem: MipProblem,
    pub origin: Vec<ColumnOrigin>,
    pub status: PresolveStatus,
    pub removed_rows: usize,
}

impl Presolved {
    pub fn is_infeasible(&self) -> bool {
        matches!(self.status, PresolveStatus::Infeasible(_))
    }

    /// Maps reduced-problem values back onto the original columns.
    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        self.origin
            .iter()
            .map(|o| match *o {
                ColumnOrigin::Kept(c) | ColumnOrigin::Alias(c) => reduced[c],
                ColumnOrigin::Fixed(v) => v,
            })
            .collect()
    }

    /// Projects original-column values onto the reduced problem.
    pub fn restrict(&self, original: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.problem.num_vars()];
        for (c, o) in self.origin.iter().enumerate() {
            if let ColumnOrigin::Kept(n) = *o {
                out[n] = original[c];
            }
        }
        out
    }
}

/// Presolves a built siting model. With `fix_y_to_x`, every eligible `y_ij`
/// is merged into `x_j`.
pub fn presolve(model: &SitingModel) -> Presolved {
    let prob = &model.problem;
    let mut alias = vec![None; prob.num_vars()];
    if model.options.fix_y_to_x {
        for (key, &c) in &prob.var_index {
            if let VarKey::Y(_, j) = *key {
                if prob.variables[c].upper > prob.variables[c].lower {
                    alias[c] = Some(prob.var_index[&VarKey::X(j)]);
                }
            }
        }
    }
    presolve_problem(prob, &alias)
}

#[derive(Clone, Copy, PartialEq)]
enum State {
    Free,
    Fixed(f64),
    Alias(usize),
}

struct Row {
    name: String,
    coeffs: Vec<(usize, f64)>,
    relation: Relation,
    rhs: f64,
}

/// Generic presolve. `alias[c] = Some(t)` asserts that column `c` may be
/// replaced by column `t` without changing the optimum.
pub fn presolve_problem(prob: &MipProblem, alias: &[Option<usize>]) -> Presolved {
    let n = prob.num_vars();
    let mut lo: Vec<f64> = prob.variables.iter().map(|v| v.lower).collect();
    let mut hi: Vec<f64> = prob.variables.iter().map(|v| v.upper).collect();
    let integral: Vec<bool> = prob.variables.iter().map(|v| v.integrality.is_integral()).collect();
    let mut state = vec![State::Free; n];
    for c in 0..n {
        if let Some(t) = alias[c] {
            state[c] = State::Alias(t);
        }
    }

    let mut rows: Vec<Row> = prob
        .constraints
        .iter()
        .map(|r| Row { name: r.name.clone(), coeffs: r.coefficients.clone(), relation: r.relation, rhs: r.rhs })
        .collect();
    let original_rows = rows.len();
    let mut infeasible = None;

    for _ in 0..MAX_PASSES {
        let mut changed = false;
        for c in 0..n {
            if state[c] == State::Free && lo[c] == hi[c] {
                state[c] = State::Fixed(lo[c]);
                changed = true;
            }
        }
        // An aliased column pins its target to its own bounds.
        for c in 0..n {
            if let State::Alias(t) = state[c] {
                if let State::Fixed(v) = state[t] {
                    state[c] = State::Fixed(v);
                    changed = true;
                } else {
                    lo[t] = lo[t].max(lo[c]);
                    hi[t] = hi[t].min(hi[c]);
                }
            }
        }

        let mut kept = Vec::with_capacity(rows.len());
        for mut row in rows.drain(..) {
            let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
            for &(c, a) in &row.coeffs {
                match state[c] {
                    State::Fixed(v) => row.rhs -= a * v,
                    State::Alias(t) => *merged.entry(t).or_insert(0.0) += a,
                    State::Free => *merged.entry(c).or_insert(0.0) += a,
                }
            }
            row.coeffs = merged.into_iter().filter(|&(_, a)| a != 0.0).collect();

            let (mut amin, mut amax) = (0.0, 0.0);
            for &(c, a) in &row.coeffs {
                if a > 0.0 {
                    amin += a * lo[c];
                    amax += a * hi[c];
                } else {
                    amin += a * hi[c];
                    amax += a * lo[c];
                }
            }
            let tol = FEAS_TOL * (1.0 + row.rhs.abs());
            let (need_le, need_ge) = match row.relation {
                Relation::Le => (true, false),
                Relation::Ge => (false, true),
                Relation::Eq => (true, true),
            };
            if (need_le && amin > row.rhs + tol) || (need_ge && amax < row.rhs - tol) {
                infeasible.get_or_insert_with(|| row.name.clone());
                kept.push(row);
                continue;
            }
            let le_slack = !need_le || amax <= row.rhs + tol;
            let ge_slack = !need_ge || amin >= row.rhs - tol;
            if le_slack && ge_slack {
                changed = true;
                continue;
            }
            // Forcing row: only the extreme point of the activity range fits.
            let force_min = need_le && amin >= row.rhs - tol && amin.is_finite();
            let force_max = need_ge && amax <= row.rhs + tol && amax.is_finite();
            if force_min || force_max {
                for &(c, a) in &row.coeffs {
                    let at_lower = (a > 0.0) == force_min;
                    if at_lower {
                        hi[c] = lo[c];
                    } else {
                        lo[c] = hi[c];
                    }
                }
                changed = true;
                continue;
            }
            if row.coeffs.len() == 1 {
                let (c, a) = row.coeffs[0];
                let bound = row.rhs / a;
                let (upper, lower) = match (row.relation, a > 0.0) {
                    (Relation::Eq, _) => (Some(bound), Some(bound)),
                    (Relation::Le, true) | (Relation::Ge, false) => (Some(bound), None),
                    (Relation::Le, false) | (Relation::Ge, true) => (None, Some(bound)),
                };
                if let Some(mut u) = upper {
                    if integral[c] {
                        u = (u + FEAS_TOL).floor();
                    }
                    if u < hi[c] {
                        hi[c] = u;
                    }
                }
                if let Some(mut l) = lower {
                    if integral[c] {
                        l = (l - FEAS_TOL).ceil();
                    }
                    if l > lo[c] {
                        lo[c] = l;
                    }
                }
                if lo[c] > hi[c] + FEAS_TOL {
                    infeasible.get_or_insert_with(|| row.name.clone());
                    kept.push(row);
                    continue;
                }
                if hi[c] < lo[c] {
                    hi[c] = lo[c];
                }
                changed = true;
                continue;
            }
            kept.push(row);
        }
        rows = kept;
        if infeasible.is_some() || !changed {
            break;
        }
    }

    let mut origin = Vec::with_capacity(n);
    let mut new_index = vec![usize::MAX; n];
    let mut reduced = MipProblem::new(prob.name.clone(), prob.sense);
    reduced.objective_constant = prob.objective_constant;
    for c in 0..n {
        if state[c] == State::Free {
            let v = &prob.variables[c];
            new_index[c] = reduced.add_variable(v.name.clone(), lo[c], hi[c], v.integrality, 0.0);
            reduced.variables[new_index[c]].branch_priority = v.branch_priority;
        }
    }
    for c in 0..n {
        let o = match state[c] {
            State::Free => ColumnOrigin::Kept(new_index[c]),
            State::Fixed(v) => ColumnOrigin::Fixed(v),
            State::Alias(t) => match state[t] {
                State::Fixed(v) => ColumnOrigin::Fixed(v),
                _ => ColumnOrigin::Alias(new_index[t]),
            },
        };
        match o {
            ColumnOrigin::Kept(k) | ColumnOrigin::Alias(k) => reduced.objective[k] += prob.objective[c],
            ColumnOrigin::Fixed(v) => reduced.objective_constant += prob.objective[c] * v,
        }
        origin.push(o);
    }
    for (key, &c) in &prob.var_index {
        if let ColumnOrigin::Kept(k) = origin[c] {
            reduced.var_index.insert(*key, k);
        }
    }
    for row in &rows {
        let coeffs = row.coeffs.iter().map(|&(c, a)| (new_index[c], a)).collect();
        reduced.add_constraint(row.name.clone(), coeffs, row.relation, row.rhs);
    }

    Presolved {
        removed_rows: original_rows - rows.len(),
        problem: reduced,
        origin,
        status: match infeasible {
            Some(name) => PresolveStatus::Infeasible(name),
            None => PresolveStatus::Reduced,
        },
    }
}
