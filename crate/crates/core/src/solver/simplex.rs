//! Dense revised simplex over bounded variables.
//!
//! Every row `i` gets a logical column `s_i = −a_i·x` so the system reads
//! `A x + s = 0`; row bounds become bounds on `s_i`. The basis inverse is kept
//! explicitly and rebuilt from the structural block only.

use super::lp::{Basis, BasisStatus, LinearProgram, LpStatus};
use crate::model::Relation;

pub(crate) const PRIMAL_TOL: f64 = 1e-9;
pub(crate) const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const SINGULAR_TOL: f64 = 1e-10;
const REFACTOR_EVERY: usize = 100;
const STALL_LIMIT: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    Lower,
    Upper,
    /// Nonbasic free column held at zero.
    Zero,
}

enum Step {
    Pivot { row: usize, to_upper: bool, len: f64 },
    Flip,
    Unbounded,
}

pub(crate) struct Engine {
    m: usize,
    n: usize,
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    /// Internal minimisation costs, structurals then logicals.
    cost: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    x: Vec<f64>,
    status: Vec<Status>,
    head: Vec<usize>,
    binv: Vec<f64>,
    /// Phase-2 reduced costs, kept current across pivots.
    d: Vec<f64>,
    since_refactor: usize,
    pub iterations: u64,
}

impl Engine {
    pub fn new(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.objective.len();
        let row_scale: Vec<f64> = lp
            .rows
            .iter()
            .map(|r| {
                let big = r.iter().fold(0.0f64, |acc, &(_, a)| acc.max(a.abs()));
                if big > 0.0 {
                    1.0 / big
                } else {
                    1.0
                }
            })
            .collect();

        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in row {
                cols[j].push((i, a * row_scale[i]));
            }
        }
        let mut col_start = Vec::with_capacity(n + 1);
        let mut col_row = Vec::new();
        let mut col_val = Vec::new();
        col_start.push(0);
        for col in &mut cols {
            col.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < col.len() {
                let (i, mut a) = col[k];
                k += 1;
                while k < col.len() && col[k].0 == i {
                    a += col[k].1;
                    k += 1;
                }
                if a != 0.0 {
                    col_row.push(i);
                    col_val.push(a);
                }
            }
            col_start.push(col_row.len());
        }

        let cmax = lp.objective.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        let cscale = if cmax > 0.0 { cmax } else { 1.0 };
        let mut cost: Vec<f64> = lp.objective.iter().map(|c| -c / cscale).collect();
        cost.resize(n + m, 0.0);

        let mut lb = lp.lower.clone();
        let mut ub = lp.upper.clone();
        for i in 0..m {
            let s = row_scale[i];
            let (lo, hi) = match lp.relations[i] {
                Relation::Le => (f64::NEG_INFINITY, lp.rhs[i] * s),
                Relation::Ge => (lp.rhs[i] * s, f64::INFINITY),
                Relation::Eq => (lp.rhs[i] * s, lp.rhs[i] * s),
            };
            lb.push(-hi);
            ub.push(-lo);
        }

        let mut eng = Engine {
            m,
            n,
            col_start,
            col_row,
            col_val,
            cost,
            lb,
            ub,
            x: vec![0.0; n + m],
            status: vec![Status::Lower; n + m],
            head: Vec::new(),
            binv: Vec::new(),
            d: vec![0.0; n + m],
            since_refactor: 0,
            iterations: 0,
        };
        eng.slack_basis();
        eng
    }

    fn slack_basis(&mut self) {
        for j in 0..self.n {
            self.status[j] = Status::Lower;
        }
        for i in 0..self.m {
            self.status[self.n + i] = Status::Basic;
        }
        self.refactor();
    }

    #[inline]
    fn for_col(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n {
            for k in self.col_start[j]..self.col_start[j + 1] {
                f(self.col_row[k], self.col_val[k]);
            }
        } else {
            f(j - self.n, 1.0);
        }
    }

    fn normalize(&mut self, j: usize) {
        let st = self.status[j];
        if st == Status::Basic {
            return;
        }
        let (lo, hi) = (self.lb[j], self.ub[j]);
        let st = match st {
            Status::Lower if lo.is_finite() => Status::Lower,
            Status::Upper if hi.is_finite() => Status::Upper,
            _ if lo.is_finite() => Status::Lower,
            _ if hi.is_finite() => Status::Upper,
            _ => Status::Zero,
        };
        self.status[j] = st;
        self.x[j] = match st {
            Status::Lower => lo,
            Status::Upper => hi,
            _ => 0.0,
        };
    }

    /// Rebuilds `B⁻¹` from the basic statuses. Dependent structurals are
    /// swapped out for logicals.
    fn refactor(&mut self) {
        let (m, n) = (self.m, self.n);
        for j in 0..n + m {
            self.normalize(j);
        }
        loop {
            let structs: Vec<usize> = (0..n).filter(|&j| self.status[j] == Status::Basic).collect();
            let open_rows: Vec<usize> = (0..m).filter(|&i| self.status[n + i] != Status::Basic).collect();
            let k = structs.len();
            debug_assert_eq!(k, open_rows.len());
            let mut local = vec![usize::MAX; m];
            for (r, &i) in open_rows.iter().enumerate() {
                local[i] = r;
            }
            // Gauss-Jordan on [M | I], M = A[open_rows, structs].
            let w = 2 * k;
            let mut aug = vec![0.0; k * w];
            for (c, &j) in structs.iter().enumerate() {
                self.for_col(j, |i, a| {
                    if local[i] != usize::MAX {
                        aug[local[i] * w + c] = a;
                    }
                });
            }
            for r in 0..k {
                aug[r * w + k + r] = 1.0;
            }
            let mut pivot_row = vec![usize::MAX; k];
            let mut row_used = vec![false; k];
            let mut dependent = Vec::new();
            for c in 0..k {
                let mut best = SINGULAR_TOL;
                let mut p = usize::MAX;
                for r in 0..k {
                    if !row_used[r] && aug[r * w + c].abs() > best {
                        best = aug[r * w + c].abs();
                        p = r;
                    }
                }
                if p == usize::MAX {
                    dependent.push(c);
                    continue;
                }
                row_used[p] = true;
                pivot_row[c] = p;
                let inv = 1.0 / aug[p * w + c];
                for v in &mut aug[p * w..(p + 1) * w] {
                    *v *= inv;
                }
                let (before, rest) = aug.split_at_mut(p * w);
                let (prow, after) = rest.split_at_mut(w);
                for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
                    let f = row[c];
                    if f != 0.0 {
                        for (v, pv) in row.iter_mut().zip(prow.iter()) {
                            *v -= f * pv;
                        }
                    }
                }
            }
            if !dependent.is_empty() {
                for &c in &dependent {
                    let j = structs[c];
                    self.status[j] = Status::Lower;
                    self.normalize(j);
                }
                for r in 0..k {
                    if !row_used[r] {
                        self.status[n + open_rows[r]] = Status::Basic;
                    }
                }
                log::debug!("basis repair: {} dependent columns", dependent.len());
                continue;
            }

            // Position of each basic: structural c sits at row open_rows[pivot_row[c]],
            // a basic logical at its own row.
            self.head = vec![usize::MAX; m];
            self.binv = vec![0.0; m * m];
            for i in 0..m {
                if self.status[n + i] == Status::Basic {
                    self.head[i] = n + i;
                    self.binv[i * m + i] = 1.0;
                }
            }
            for (c, &j) in structs.iter().enumerate() {
                let pos = open_rows[pivot_row[c]];
                self.head[pos] = j;
                let src = &aug[pivot_row[c] * w + k..(pivot_row[c] + 1) * w];
                for (r, &i) in open_rows.iter().enumerate() {
                    self.binv[pos * m + i] = src[r];
                }
            }
            // Logical rows: −A[row, S] K.
            for (c, &j) in structs.iter().enumerate() {
                let pos = open_rows[pivot_row[c]];
                let mut entries = Vec::new();
                self.for_col(j, |i, a| entries.push((i, a)));
                for (i, a) in entries {
                    if local[i] == usize::MAX {
                        for &i2 in &open_rows {
                            let v = self.binv[pos * m + i2];
                            if v != 0.0 {
                                self.binv[i * m + i2] -= a * v;
                            }
                        }
                    }
                }
            }
            break;
        }
        self.since_refactor = 0;
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m];
        let mut entries: Vec<(usize, f64)> = Vec::new();
        self.for_col(j, |i, a| entries.push((i, a)));
        for (p, o) in out.iter_mut().enumerate() {
            let row = &self.binv[p * m..(p + 1) * m];
            let mut s = 0.0;
            for &(i, a) in &entries {
                s += row[i] * a;
            }
            *o = s;
        }
        out
    }

    fn compute_primal(&mut self) {
        let (m, n) = (self.m, self.n);
        let mut r = vec![0.0; m];
        for j in 0..n + m {
            if self.status[j] != Status::Basic {
                let v = self.x[j];
                if v != 0.0 {
                    self.for_col(j, |i, a| r[i] += a * v);
                }
            }
        }
        for p in 0..m {
            let row = &self.binv[p * m..(p + 1) * m];
            let mut s = 0.0;
            for (b, ri) in row.iter().zip(&r) {
                s += b * ri;
            }
            self.x[self.head[p]] = -s;
        }
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lb[j] - PRIMAL_TOL {
            self.lb[j] - v
        } else if v > self.ub[j] + PRIMAL_TOL {
            v - self.ub[j]
        } else {
            0.0
        }
    }

    fn reduced_costs(&self, cb: &[f64], cost: impl Fn(usize) -> f64) -> Vec<f64> {
        let (m, n) = (self.m, self.n);
        let mut y = vec![0.0; m];
        for (p, &c) in cb.iter().enumerate() {
            if c != 0.0 {
                for (yi, b) in y.iter_mut().zip(&self.binv[p * m..(p + 1) * m]) {
                    *yi += c * b;
                }
            }
        }
        let mut d = vec![0.0; n + m];
        for j in 0..n + m {
            if self.status[j] == Status::Basic {
                continue;
            }
            let mut s = cost(j);
            self.for_col(j, |i, a| s -= y[i] * a);
            d[j] = s;
        }
        d
    }

    fn attractive(&self, j: usize, d: f64) -> bool {
        if self.lb[j] == self.ub[j] {
            return false;
        }
        match self.status[j] {
            Status::Basic => false,
            Status::Lower => d < -DUAL_TOL,
            Status::Upper => d > DUAL_TOL,
            Status::Zero => d.abs() > DUAL_TOL,
        }
    }

    fn price(&self, d: &[f64], bland: bool) -> Option<usize> {
        let mut best = None;
        let mut best_val = 0.0;
        for (j, &dj) in d.iter().enumerate() {
            if self.attractive(j, dj) {
                if bland {
                    return Some(j);
                }
                if dj.abs() > best_val {
                    best_val = dj.abs();
                    best = Some(j);
                }
            }
        }
        best
    }

    /// Primal ratio test for entering `q` moving in direction `dir`.
    fn primal_ratio(&self, q: usize, dir: f64, alpha: &[f64], phase1: bool, bland: bool) -> Step {
        // (position, exact ratio, |delta|, hits upper)
        let mut cands: Vec<(usize, f64, f64, bool)> = Vec::new();
        let mut t_max = f64::INFINITY;
        for (p, &a) in alpha.iter().enumerate() {
            let delta = -dir * a;
            if delta.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.head[p];
            let (v, lo, hi) = (self.x[b], self.lb[b], self.ub[b]);
            let (bound, to_upper) = if phase1 && v < lo - PRIMAL_TOL {
                if delta > 0.0 {
                    (lo, false)
                } else {
                    continue;
                }
            } else if phase1 && v > hi + PRIMAL_TOL {
                if delta < 0.0 {
                    (hi, true)
                } else {
                    continue;
                }
            } else if delta > 0.0 {
                (hi, true)
            } else {
                (lo, false)
            };
            if !bound.is_finite() {
                continue;
            }
            let dist = ((bound - v) / delta).max(0.0);
            let relaxed = ((bound - v).abs() + PRIMAL_TOL) / delta.abs();
            t_max = t_max.min(relaxed);
            cands.push((p, dist, delta.abs(), to_upper));
        }
        let flip_len = self.ub[q] - self.lb[q];

        let chosen = if bland {
            let min = cands.iter().fold(f64::INFINITY, |acc, c| acc.min(c.1));
            cands
                .iter()
                .filter(|c| c.1 <= min)
                .min_by_key(|c| self.head[c.0])
                .copied()
        } else {
            let mut best: Option<(usize, f64, f64, bool)> = None;
            for &c in &cands {
                if c.1 <= t_max && best.is_none_or(|b| c.2 > b.2) {
                    best = Some(c);
                }
            }
            best
        };
        match chosen {
            Some((p, len, _, to_upper)) => {
                if flip_len.is_finite() && flip_len <= len {
                    Step::Flip
                } else {
                    Step::Pivot { row: p, to_upper, len }
                }
            }
            None if flip_len.is_finite() => Step::Flip,
            None => Step::Unbounded,
        }
    }

    /// `α_r = e_rᵀ B⁻¹ A` over nonbasic columns (zero for basics).
    fn pivot_row(&self, r: usize) -> Vec<f64> {
        let m = self.m;
        let rho = &self.binv[r * m..(r + 1) * m];
        let mut out = vec![0.0; self.n + self.m];
        for (j, o) in out.iter_mut().enumerate() {
            if self.status[j] != Status::Basic {
                let mut a = 0.0;
                self.for_col(j, |i, v| a += rho[i] * v);
                *o = a;
            }
        }
        out
    }

    /// Moves nonbasic `q` by `delta` and updates the basics to match.
    fn shift_entering(&mut self, q: usize, alpha: &[f64], delta: f64) {
        for (p, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                self.x[self.head[p]] -= a * delta;
            }
        }
        self.x[q] += delta;
    }

    fn flip(&mut self, q: usize, alpha: &[f64]) {
        let (lo, hi) = (self.lb[q], self.ub[q]);
        let (delta, st) = if self.status[q] == Status::Lower { (hi - lo, Status::Upper) } else { (lo - hi, Status::Lower) };
        self.shift_entering(q, alpha, delta);
        self.status[q] = st;
        self.normalize(q);
        self.iterations += 1;
    }

    /// Basis change: `q` enters at position `r` after moving by `delta`.
    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64], delta: f64, leave_upper: bool) {
        let m = self.m;
        let arow = self.pivot_row(r);
        let theta = self.d[q] / alpha[r];
        for (dj, a) in self.d.iter_mut().zip(&arow) {
            if *a != 0.0 {
                *dj -= theta * a;
            }
        }
        self.shift_entering(q, alpha, delta);

        let leaving = self.head[r];
        self.d[leaving] = -theta;
        self.d[q] = 0.0;
        self.status[leaving] = if leave_upper && self.lb[leaving] < self.ub[leaving] { Status::Upper } else { Status::Lower };
        self.normalize(leaving);
        self.status[q] = Status::Basic;
        self.head[r] = q;

        let inv = 1.0 / alpha[r];
        let prow: Vec<f64> = self.binv[r * m..(r + 1) * m].iter().map(|v| v * inv).collect();
        self.binv[r * m..(r + 1) * m].copy_from_slice(&prow);
        for (p, &a) in alpha.iter().enumerate() {
            if p != r && a != 0.0 {
                for (v, pv) in self.binv[p * m..(p + 1) * m].iter_mut().zip(&prow) {
                    *v -= a * pv;
                }
            }
        }
        self.since_refactor += 1;
        self.iterations += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor();
            self.refresh();
        }
    }

    /// Recomputes basic values and phase-2 reduced costs from scratch.
    fn refresh(&mut self) {
        self.compute_primal();
        let cb: Vec<f64> = self.head.iter().map(|&b| self.cost[b]).collect();
        self.d = self.reduced_costs(&cb, |j| self.cost[j]);
    }

    /// Flips boxed nonbasics whose reduced cost has the wrong sign; true when
    /// the basis is then dual feasible.
    fn dual_feasible_with_flips(&mut self) -> bool {
        let mut flips = Vec::new();
        for j in 0..self.n + self.m {
            if !self.attractive(j, self.d[j]) {
                continue;
            }
            if self.lb[j].is_finite() && self.ub[j].is_finite() {
                flips.push(j);
            } else {
                return false;
            }
        }
        for &j in &flips {
            self.status[j] = if self.d[j] < 0.0 { Status::Upper } else { Status::Lower };
            self.normalize(j);
        }
        if !flips.is_empty() {
            self.compute_primal();
        }
        true
    }

    /// Runs simplex iterations until a terminal status or `max_iter` pivots.
    pub fn solve(&mut self, max_iter: u64) -> LpStatus {
        let m = self.m;
        let start = self.iterations;
        let mut bland = false;
        let mut degenerate = 0usize;
        self.refresh();
        let mut fresh = true;
        loop {
            if self.iterations - start >= max_iter {
                self.refresh();
                return LpStatus::IterationLimit;
            }
            let max_inf = (0..m).map(|p| self.infeasibility(self.head[p])).fold(0.0, f64::max);

            if max_inf == 0.0 {
                let Some(q) = self.price(&self.d, bland) else {
                    if fresh {
                        return LpStatus::Optimal;
                    }
                    self.refresh();
                    fresh = true;
                    continue;
                };
                let dir = if self.d[q] < 0.0 { 1.0 } else { -1.0 };
                let alpha = self.ftran(q);
                match self.primal_ratio(q, dir, &alpha, false, bland) {
                    Step::Unbounded => {
                        if fresh {
                            return LpStatus::Unbounded;
                        }
                        self.refresh();
                        fresh = true;
                        continue;
                    }
                    Step::Flip => {
                        self.flip(q, &alpha);
                        degenerate = 0;
                    }
                    Step::Pivot { row, to_upper, len } => {
                        degenerate = if len <= 1e-12 { degenerate + 1 } else { 0 };
                        self.pivot(row, q, &alpha, dir * len, to_upper);
                    }
                }
            } else if self.dual_feasible_with_flips() {
                let mut r = usize::MAX;
                let mut worst = 0.0;
                for p in 0..m {
                    let inf = self.infeasibility(self.head[p]);
                    if inf > 0.0 && (r == usize::MAX || (!bland && inf > worst) || (bland && self.head[p] < self.head[r])) {
                        worst = inf;
                        r = p;
                    }
                }
                if r == usize::MAX {
                    continue;
                }
                let leaving = self.head[r];
                let increase = self.x[leaving] < self.lb[leaving];
                let target = if increase { self.lb[leaving] } else { self.ub[leaving] };
                let arow = self.pivot_row(r);
                let mut cands: Vec<(usize, f64, f64)> = Vec::new();
                let mut t_max = f64::INFINITY;
                for (j, &a) in arow.iter().enumerate() {
                    let st = self.status[j];
                    if st == Status::Basic || self.lb[j] == self.ub[j] || a.abs() <= PIVOT_TOL {
                        continue;
                    }
                    // x_leaving moves by −a Δx_j
                    let up_ok = matches!(st, Status::Lower | Status::Zero);
                    let down_ok = matches!(st, Status::Upper | Status::Zero);
                    let ok = if increase { (up_ok && a < 0.0) || (down_ok && a > 0.0) } else { (up_ok && a > 0.0) || (down_ok && a < 0.0) };
                    if !ok {
                        continue;
                    }
                    let dj = self.d[j].abs();
                    t_max = t_max.min((dj + DUAL_TOL) / a.abs());
                    cands.push((j, dj / a.abs(), a.abs()));
                }
                if cands.is_empty() {
                    if fresh {
                        return LpStatus::Infeasible;
                    }
                    self.refresh();
                    fresh = true;
                    continue;
                }
                let (q, ratio) = if bland {
                    let min = cands.iter().fold(f64::INFINITY, |acc, c| acc.min(c.1));
                    let q = cands.iter().filter(|c| c.1 <= min).map(|c| c.0).min().unwrap();
                    (q, min)
                } else {
                    let mut best: Option<(usize, f64, f64)> = None;
                    for &c in &cands {
                        if c.1 <= t_max && best.is_none_or(|b| c.2 > b.2) {
                            best = Some(c);
                        }
                    }
                    let b = best.unwrap_or(cands[0]);
                    (b.0, b.1)
                };
                let alpha = self.ftran(q);
                if alpha[r].abs() <= PIVOT_TOL || (alpha[r] - arow[q]).abs() > 1e-7 * (1.0 + arow[q].abs()) {
                    self.refactor();
                    self.refresh();
                    fresh = true;
                    continue;
                }
                let delta = (self.x[leaving] - target) / alpha[r];
                degenerate = if ratio <= 1e-12 { degenerate + 1 } else { 0 };
                self.pivot(r, q, &alpha, delta, !increase);
            } else {
                // Composite phase 1 on the sum of infeasibilities.
                let cb1: Vec<f64> = self
                    .head
                    .iter()
                    .map(|&b| {
                        if self.x[b] < self.lb[b] - PRIMAL_TOL {
                            -1.0
                        } else if self.x[b] > self.ub[b] + PRIMAL_TOL {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect();
                let d1 = self.reduced_costs(&cb1, |_| 0.0);
                let Some(q) = self.price(&d1, bland) else {
                    if fresh {
                        return LpStatus::Infeasible;
                    }
                    self.refresh();
                    fresh = true;
                    continue;
                };
                let dir = if d1[q] < 0.0 { 1.0 } else { -1.0 };
                let alpha = self.ftran(q);
                match self.primal_ratio(q, dir, &alpha, true, bland) {
                    Step::Unbounded => {
                        if fresh {
                            return LpStatus::Infeasible;
                        }
                        self.refresh();
                        fresh = true;
                        continue;
                    }
                    Step::Flip => {
                        self.flip(q, &alpha);
                        degenerate = 0;
                    }
                    Step::Pivot { row, to_upper, len } => {
                        degenerate = if len <= 1e-12 { degenerate + 1 } else { 0 };
                        self.pivot(row, q, &alpha, dir * len, to_upper);
                    }
                }
            }
            fresh = false;
            if degenerate > STALL_LIMIT && !bland {
                log::debug!("simplex stalled; switching to Bland's rule");
                bland = true;
            }
        }
    }

    pub fn structural_values(&self) -> Vec<f64> {
        self.x[..self.n].to_vec()
    }

    pub fn max_primal_infeasibility(&self) -> f64 {
        (0..self.n + self.m)
            .map(|j| (self.lb[j] - self.x[j]).max(self.x[j] - self.ub[j]).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn max_dual_infeasibility(&self) -> f64 {
        let cb: Vec<f64> = self.head.iter().map(|&b| self.cost[b]).collect();
        let d = self.reduced_costs(&cb, |j| self.cost[j]);
        (0..self.n + self.m)
            .filter(|&j| self.status[j] != Status::Basic && self.lb[j] < self.ub[j])
            .map(|j| match self.status[j] {
                Status::Lower => (-d[j]).max(0.0),
                Status::Upper => d[j].max(0.0),
                _ => d[j].abs(),
            })
            .fold(0.0, f64::max)
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lb[j], self.ub[j])
    }

    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.lb[j] = lo;
        self.ub[j] = hi;
        self.normalize(j);
    }

    pub fn snapshot(&self) -> Basis {
        Basis {
            status: self
                .status
                .iter()
                .map(|s| match s {
                    Status::Basic => BasisStatus::Basic,
                    Status::Lower => BasisStatus::Lower,
                    Status::Upper => BasisStatus::Upper,
                    Status::Zero => BasisStatus::Free,
                })
                .collect(),
        }
    }

    /// Installs a stored basis; falls back to the logical basis when it does
    /// not fit this problem.
    pub fn load(&mut self, basis: &Basis) {
        let basic = basis.status.iter().filter(|s| **s == BasisStatus::Basic).count();
        if basis.status.len() != self.n + self.m || basic != self.m {
            self.slack_basis();
            return;
        }
        for (s, b) in self.status.iter_mut().zip(&basis.status) {
            *s = match b {
                BasisStatus::Basic => Status::Basic,
                BasisStatus::Lower => Status::Lower,
                BasisStatus::Upper => Status::Upper,
                BasisStatus::Free => Status::Zero,
            };
        }
        self.refactor();
    }
}
