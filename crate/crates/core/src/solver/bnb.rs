use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::lp::{LinearProgram, LpStatus};
use super::simplex::Engine;
use crate::error::{Error, Result};
use crate::model::{MipProblem, Sense};

const PRUNE_SLACK: f64 = 1e-9;
const ROW_CHECK_TOL: f64 = 1e-6;
const NODE_ITERATION_LIMIT: u64 = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchingRule {
    #[default]
    MostFractional,
    PseudoCost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BnBConfig {
    pub integrality_tolerance: f64,
    /// Stop once `(bound − incumbent) / max(1, |incumbent|)` falls to this.
    pub relative_gap_tolerance: f64,
    pub node_limit: Option<u64>,
    /// Wall-clock limit in seconds.
    pub time_limit: Option<f64>,
    pub branching: BranchingRule,
    /// Emit a log line every this many nodes (and on each new incumbent).
    pub log_interval: u64,
}

impl Default for BnBConfig {
    fn default() -> Self {
        Self {
            integrality_tolerance: 1e-6,
            relative_gap_tolerance: 0.0,
            node_limit: None,
            time_limit: None,
            branching: BranchingRule::MostFractional,
            log_interval: 1000,
        }
    }
}

impl BnBConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.integrality_tolerance > 0.0 && self.integrality_tolerance < 0.5) {
            return Err(Error::InvalidArgument {
                name: "integrality_tolerance",
                reason: format!("{} is outside (0, 0.5)", self.integrality_tolerance),
            });
        }
        if !(self.relative_gap_tolerance >= 0.0 && self.relative_gap_tolerance.is_finite()) {
            return Err(Error::InvalidArgument { name: "relative_gap_tolerance", reason: "must be non-negative".into() });
        }
        if self.node_limit == Some(0) {
            return Err(Error::InvalidArgument { name: "node_limit", reason: "must be positive".into() });
        }
        if let Some(t) = self.time_limit {
            if !(t > 0.0) {
                return Err(Error::InvalidArgument { name: "time_limit", reason: "must be positive".into() });
            }
        }
        if self.log_interval == 0 {
            return Err(Error::InvalidArgument { name: "log_interval", reason: "must be positive".into() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MipStatus {
    Optimal,
    /// An incumbent exists but the gap was not closed.
    Feasible,
    Infeasible,
    Unbounded,
    /// A limit stopped the search before any incumbent was found.
    LimitReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MipResult {
    pub status: MipStatus,
    pub objective: Option<f64>,
    pub values: Option<Vec<f64>>,
    /// Best bound in the problem's own sense.
    pub bound: f64,
    pub gap: f64,
    pub nodes: u64,
    pub lp_iterations: u64,
    #[serde(skip)]
    pub wall_time: Duration,
    pub log: Vec<String>,
}

impl MipResult {
    pub(crate) fn gap_of(bound: f64, objective: f64) -> f64 {
        ((bound - objective).abs() / objective.abs().max(1.0)).max(0.0)
    }
}

struct Node {
    id: u64,
    depth: u32,
    /// LP bound inherited from the parent (maximisation form).
    bound: f64,
    changes: Vec<(usize, f64, f64)>,
    /// (column, went up, distance moved)
    branch: Option<(usize, bool, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.id.cmp(&self.id))
    }
}

#[derive(Default, Clone, Copy)]
struct PseudoCost {
    down_sum: f64,
    down_n: u32,
    up_sum: f64,
    up_n: u32,
}

fn row_violation_scaled(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in lp.rows.iter().enumerate() {
        let scale = row.iter().fold(0.0f64, |a, &(_, v)| a.max(v.abs())).max(1e-300);
        let act: f64 = row.iter().map(|&(j, a)| a * x[j]).sum();
        let rhs = lp.rhs[i];
        let v = match lp.relations[i] {
            crate::model::Relation::Le => (act - rhs).max(0.0),
            crate::model::Relation::Ge => (rhs - act).max(0.0),
            crate::model::Relation::Eq => (act - rhs).abs(),
        };
        worst = worst.max(v / scale);
    }
    worst
}

/// Best-bound branch-and-bound over the LP relaxation.
pub fn solve_mip(prob: &MipProblem, cfg: &BnBConfig) -> Result<MipResult> {
    cfg.check()?;
    prob.check().map_err(|reason| Error::InvalidArgument { name: "problem", reason })?;
    let started = Instant::now();
    let sign = match prob.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let mut lp = LinearProgram::relaxation(prob);
    let int_cols: Vec<usize> = prob.integer_columns().collect();
    let mut is_int = vec![false; prob.num_vars()];
    for &c in &int_cols {
        is_int[c] = true;
        lp.lower[c] = (lp.lower[c] - cfg.integrality_tolerance).ceil();
        lp.upper[c] = (lp.upper[c] + cfg.integrality_tolerance).floor();
    }
    let finish = |status, inc: Option<(f64, Vec<f64>)>, bound: f64, nodes, iters, log| {
        let (objective, values) = match inc {
            Some((o, v)) => (Some(sign * o), Some(v)),
            None => (None, None),
        };
        let gap = objective.map_or(f64::INFINITY, |o| MipResult::gap_of(sign * bound, o));
        MipResult {
            status,
            objective,
            values,
            bound: sign * bound,
            gap,
            nodes,
            lp_iterations: iters,
            wall_time: started.elapsed(),
            log,
        }
    };
    if lp.lower.iter().zip(&lp.upper).any(|(l, u)| l > u) {
        return Ok(finish(MipStatus::Infeasible, None, f64::NEG_INFINITY, 0, 0, Vec::new()));
    }

    let mut eng = Engine::new(&lp);
    let mut applied: Vec<(usize, f64, f64)> = Vec::new();
    let mut heap = BinaryHeap::new();
    heap.push(Node { id: 0, depth: 0, bound: f64::INFINITY, changes: Vec::new(), branch: None });
    let mut next_id = 1u64;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0u64;
    let mut log = Vec::new();
    let mut pseudo = vec![PseudoCost::default(); prob.num_vars()];
    let mut limit_hit = false;
    let mut lp_trouble = false;

    let slack = |inc: &Option<(f64, Vec<f64>)>| -> f64 {
        match inc {
            Some((v, _)) => v + v.abs().max(1.0) * PRUNE_SLACK.max(cfg.relative_gap_tolerance),
            None => f64::NEG_INFINITY,
        }
    };

    while let Some(node) = heap.pop() {
        let cutoff = slack(&incumbent);
        if node.bound <= cutoff {
            continue;
        }
        if cfg.node_limit.is_some_and(|l| nodes >= l)
            || cfg.time_limit.is_some_and(|t| started.elapsed().as_secs_f64() >= t)
        {
            heap.push(node);
            limit_hit = true;
            break;
        }
        nodes += 1;

        for &(c, _, _) in &applied {
            eng.set_bounds(c, lp.lower[c], lp.upper[c]);
        }
        for &(c, lo, hi) in &node.changes {
            eng.set_bounds(c, lo, hi);
        }
        applied.clone_from(&node.changes);

        match eng.solve(NODE_ITERATION_LIMIT) {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                let log_line = format!("{nodes},{},inf,-,-", node.depth);
                log.push(log_line);
                return Ok(finish(MipStatus::Unbounded, None, f64::INFINITY, nodes, eng.iterations, log));
            }
            LpStatus::IterationLimit => {
                log::warn!("node {} hit the LP iteration limit; subtree kept open", node.id);
                lp_trouble = true;
                heap.push(node);
                break;
            }
            LpStatus::Optimal => {}
        }
        let x = eng.structural_values();
        let obj = lp.objective_value(&x);

        if let (Some((col, up, dist)), true) = (node.branch, node.bound.is_finite()) {
            let per_unit = ((node.bound - obj) / dist).max(0.0);
            let pc = &mut pseudo[col];
            if up {
                pc.up_sum += per_unit;
                pc.up_n += 1;
            } else {
                pc.down_sum += per_unit;
                pc.down_n += 1;
            }
        }
        if obj <= slack(&incumbent) {
            continue;
        }

        let mut frac: Vec<(usize, f64)> = int_cols
            .iter()
            .filter_map(|&c| {
                let f = x[c] - x[c].floor();
                let dist = f.min(1.0 - f);
                (dist > cfg.integrality_tolerance).then_some((c, f))
            })
            .collect();
        if frac.is_empty() {
            let mut rounded = x.clone();
            for &c in &int_cols {
                rounded[c] = x[c].round();
                if rounded[c] == 0.0 {
                    rounded[c] = 0.0;
                }
            }
            if row_violation_scaled(&lp, &rounded) <= ROW_CHECK_TOL {
                let val = lp.objective_value(&rounded);
                if incumbent.as_ref().is_none_or(|(best, _)| val > *best) {
                    incumbent = Some((val, rounded));
                    let bound = heap.peek().map_or(val, |n| n.bound.max(val));
                    log.push(format!(
                        "{nodes},{},{},{},{:.3e}",
                        node.depth,
                        sign * bound,
                        sign * val,
                        MipResult::gap_of(bound, val)
                    ));
                }
                continue;
            }
            frac = int_cols
                .iter()
                .filter_map(|&c| {
                    let f = x[c] - x[c].floor();
                    (f.min(1.0 - f) > 1e-12).then_some((c, f))
                })
                .collect();
            if frac.is_empty() {
                log::warn!("node {}: rounded LP point violates rows; discarded", node.id);
                continue;
            }
        }

        let top = frac.iter().map(|e| prob.variables[e.0].branch_priority).max().unwrap_or(0);
        frac.retain(|e| prob.variables[e.0].branch_priority == top);
        let col = match cfg.branching {
            BranchingRule::MostFractional => pick_most_fractional(&frac),
            BranchingRule::PseudoCost => pick_pseudo_cost(&frac, &pseudo),
        };
        let f = frac.iter().find(|e| e.0 == col).unwrap().1;
        let v = x[col];
        let (lo, hi) = eng.bounds(col);
        for (up, new_lo, new_hi, dist) in [(false, lo, v.floor(), f), (true, v.ceil(), hi, 1.0 - f)] {
            let mut changes = node.changes.clone();
            changes.push((col, new_lo, new_hi));
            heap.push(Node { id: next_id, depth: node.depth + 1, bound: obj, changes, branch: Some((col, up, dist)) });
            next_id += 1;
        }

        if nodes % cfg.log_interval == 0 {
            let bound = heap.peek().map_or(obj, |n| n.bound);
            let inc = incumbent.as_ref().map(|(v, _)| *v);
            log.push(format!(
                "{nodes},{},{},{},{}",
                node.depth,
                sign * bound,
                inc.map_or("-".to_string(), |v| (sign * v).to_string()),
                inc.map_or("-".to_string(), |v| format!("{:.3e}", MipResult::gap_of(bound, v)))
            ));
        }
    }

    let open_bound = heap.iter().map(|n| n.bound).fold(f64::NEG_INFINITY, f64::max);
    let iters = eng.iterations;
    let unfinished = limit_hit || lp_trouble;
    Ok(match incumbent {
        Some((val, x)) => {
            let bound = if unfinished { open_bound.max(val) } else { val };
            let gap = MipResult::gap_of(bound, val);
            let status = if !unfinished || gap <= cfg.relative_gap_tolerance { MipStatus::Optimal } else { MipStatus::Feasible };
            finish(status, Some((val, x)), bound, nodes, iters, log)
        }
        None if unfinished => finish(MipStatus::LimitReached, None, open_bound, nodes, iters, log),
        None => finish(MipStatus::Infeasible, None, f64::NEG_INFINITY, nodes, iters, log),
    })
}

fn pick_most_fractional(frac: &[(usize, f64)]) -> usize {
    let mut best = frac[0];
    for &(c, f) in frac {
        let score = f.min(1.0 - f);
        let best_score = best.1.min(1.0 - best.1);
        if score > best_score || (score == best_score && c < best.0) {
            best = (c, f);
        }
    }
    best.0
}

fn pick_pseudo_cost(frac: &[(usize, f64)], pseudo: &[PseudoCost]) -> usize {
    let (mut dn, mut dc, mut un, mut uc) = (0.0, 0u32, 0.0, 0u32);
    for p in pseudo {
        if p.down_n > 0 {
            dn += p.down_sum / f64::from(p.down_n);
            dc += 1;
        }
        if p.up_n > 0 {
            un += p.up_sum / f64::from(p.up_n);
            uc += 1;
        }
    }
    let down_default = if dc > 0 { dn / f64::from(dc) } else { 1.0 };
    let up_default = if uc > 0 { un / f64::from(uc) } else { 1.0 };
    let mut best = (frac[0].0, f64::NEG_INFINITY);
    for &(c, f) in frac {
        let p = &pseudo[c];
        let down = if p.down_n > 0 { p.down_sum / f64::from(p.down_n) } else { down_default };
        let up = if p.up_n > 0 { p.up_sum / f64::from(p.up_n) } else { up_default };
        let score = (down * f).max(1e-6) * (up * (1.0 - f)).max(1e-6);
        if score > best.1 || (score == best.1 && c < best.0) {
            best = (c, score);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Integrality, Relation};

    fn knapsack() -> MipProblem {
        let mut p = MipProblem::new("knapsack", Sense::Maximize);
        let items = [(10.0, 5.0), (40.0, 4.0), (30.0, 6.0), (50.0, 3.0), (35.0, 5.0)];
        for (k, &(value, _)) in items.iter().enumerate() {
            p.add_variable(format!("z{k}"), 0.0, 1.0, Integrality::Binary, value);
        }
        p.add_constraint("cap", items.iter().enumerate().map(|(k, &(_, w))| (k, w)).collect(), Relation::Le, 13.0);
        p
    }

    #[test]
    fn knapsack_matches_enumeration() {
        let p = knapsack();
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..32 {
            let x: Vec<f64> = (0..5).map(|k| f64::from((mask >> k) & 1)).collect();
            if p.constraints[0].violation(&x) == 0.0 {
                best = best.max(p.objective_value(&x));
            }
        }
        assert_eq!(best, 125.0);
        for branching in [BranchingRule::MostFractional, BranchingRule::PseudoCost] {
            let r = solve_mip(&p, &BnBConfig { branching, ..BnBConfig::default() }).unwrap();
            assert_eq!(r.status, MipStatus::Optimal);
            assert_eq!(r.objective, Some(best));
            assert_eq!(r.gap, 0.0);
        }
    }

    #[test]
    fn deterministic() {
        let p = knapsack();
        let a = solve_mip(&p, &BnBConfig::default()).unwrap();
        let b = solve_mip(&p, &BnBConfig::default()).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.nodes, b.nodes);
        assert_eq!(a.log, b.log);
    }

    #[test]
    fn minimisation_and_infeasibility() {
        let mut p = MipProblem::new("min", Sense::Minimize);
        let x = p.add_variable("x", 0.0, 10.0, Integrality::Integer, 1.0);
        p.add_constraint("r", vec![(x, 2.0)], Relation::Ge, 3.0);
        let r = solve_mip(&p, &BnBConfig::default()).unwrap();
        assert_eq!(r.objective, Some(2.0));
        assert_eq!(r.bound, 2.0);

        p.add_constraint("r2", vec![(x, 2.0)], Relation::Le, 3.0);
        let r = solve_mip(&p, &BnBConfig::default()).unwrap();
        assert_eq!(r.status, MipStatus::Infeasible);
    }

    #[test]
    fn node_limit_reports_limit() {
        let p = knapsack();
        let r = solve_mip(&p, &BnBConfig { node_limit: Some(1), ..BnBConfig::default() }).unwrap();
        assert!(matches!(r.status, MipStatus::LimitReached | MipStatus::Feasible));
        assert!(r.bound >= 125.0);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = BnBConfig { integrality_tolerance: 0.0, ..BnBConfig::default() };
        assert!(solve_mip(&knapsack(), &cfg).is_err());
    }
}
