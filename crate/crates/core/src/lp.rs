//! Dense two-phase simplex for linear programs with box-bounded variables.
//!
//! Rows are `row . x <= bound`. Every row gets a slack column; rows that the
//! starting point violates also get an artificial column, which phase one
//! drives to zero. Nonbasic variables sit at one of their bounds, so box
//! constraints never become tableau rows.
//!
//! Pricing uses the largest reduced cost and falls back to Bland's rule after
//! a run of degenerate pivots, which rules out cycling.

use crate::error::{Error, Result};

/// Entries of the pivot column below this magnitude are treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-9;
/// Residual infeasibility phase one may leave behind and still report a feasible problem.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-7;
/// Reduced costs within this of zero count as optimal.
pub const OPTIMALITY_TOLERANCE: f64 = 1e-9;
/// Pivot and bound-flip budget shared by both phases.
pub const ITERATION_CAP: usize = 50_000;

const DEGENERATE_RUN_FOR_BLAND: usize = 30;
const STEP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// The iteration cap was hit before optimality was certified.
    IterationLimit,
}

/// One inequality `sum terms <= bound`, terms given sparsely as `(variable, coefficient)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub terms: Vec<(usize, f64)>,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub sense: Sense,
    pub rows: Vec<LpRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// A problem over `n` variables with zero objective and bounds `[0, inf)`.
    pub fn new(n: usize, sense: Sense) -> Self {
        LpProblem {
            objective: vec![0.0; n],
            sense,
            rows: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, bound: f64) {
        self.rows.push(LpRow { terms, bound });
    }

    pub fn add_dense_row(&mut self, coeffs: &[f64], bound: f64) {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(j, &c)| (j, c))
            .collect();
        self.add_row(terms, bound);
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        for (what, len) in [("lower", self.lower.len()), ("upper", self.upper.len())] {
            if len != n {
                return Err(Error::InvalidProblem(format!(
                    "{what} bounds have length {len}, objective has {n}"
                )));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidProblem("non-finite objective coefficient".into()));
        }
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
            {
                return Err(Error::InvalidProblem(format!(
                    "variable {j} has invalid bounds [{lo}, {hi}]"
                )));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.bound.is_finite() {
                return Err(Error::InvalidProblem(format!("row {i} has a non-finite bound")));
            }
            for &(j, c) in &row.terms {
                if j >= n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: j + 1,
                    });
                }
                if !c.is_finite() {
                    return Err(Error::InvalidProblem(format!(
                        "row {i} has a non-finite coefficient"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Tightens box bounds using the bounds each row implies, then drops rows
    /// the tightened box already guarantees. The feasible set is unchanged.
    ///
    /// Returns `false`, leaving the problem partly tightened but equivalent,
    /// if some variable's bounds would cross by more than
    /// [`FEASIBILITY_TOLERANCE`], which proves infeasibility. Smaller crossings
    /// from rounding collapse the variable to a point.
    pub fn presolve(&mut self) -> bool {
        const MIN_IMPROVEMENT: f64 = 1e-9;
        const MAX_SWEEPS: usize = 200;
        for row in &mut self.rows {
            row.terms.sort_by_key(|&(j, _)| j);
            row.terms.dedup_by(|b, a| {
                let same = a.0 == b.0;
                if same {
                    a.1 += b.1;
                }
                same
            });
        }
        for _ in 0..MAX_SWEEPS {
            let mut changed = false;
            for row in &self.rows {
                // Minimum activity, split into a finite part and the number
                // of unbounded contributions.
                let mut finite = 0.0;
                let mut unbounded = 0usize;
                let contribution = |j: usize, c: f64, lo: &[f64], hi: &[f64]| {
                    if c > 0.0 {
                        c * lo[j]
                    } else {
                        c * hi[j]
                    }
                };
                for &(j, c) in &row.terms {
                    let v = contribution(j, c, &self.lower, &self.upper);
                    if v.is_finite() {
                        finite += v;
                    } else {
                        unbounded += 1;
                    }
                }
                for &(j, c) in &row.terms {
                    if c == 0.0 {
                        continue;
                    }
                    let own = contribution(j, c, &self.lower, &self.upper);
                    let rest = match (unbounded, own.is_finite()) {
                        (0, _) => finite - own,
                        (1, false) => finite,
                        _ => continue,
                    };
                    let limit = (row.bound - rest) / c;
                    let (lo, hi) = if c > 0.0 {
                        if limit >= self.upper[j] - MIN_IMPROVEMENT {
                            continue;
                        }
                        (self.lower[j], limit)
                    } else {
                        if limit <= self.lower[j] + MIN_IMPROVEMENT {
                            continue;
                        }
                        (limit, self.upper[j])
                    };
                    if lo - hi > FEASIBILITY_TOLERANCE {
                        return false;
                    }
                    let (lo, hi) = if lo > hi {
                        let mid = 0.5 * (lo + hi);
                        (mid, mid)
                    } else {
                        (lo, hi)
                    };
                    self.lower[j] = lo;
                    self.upper[j] = hi;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let (lower, upper) = (&self.lower, &self.upper);
        self.rows.retain(|row| {
            let max_activity: f64 = row
                .terms
                .iter()
                .map(|&(j, c)| if c > 0.0 { c * upper[j] } else { c * lower[j] })
                .sum();
            !(max_activity <= row.bound)
        });
        true
    }

    /// Largest amount by which `x` violates a row or a box bound.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| {
            let lhs: f64 = r.terms.iter().map(|&(j, c)| c * x[j]).sum();
            lhs - r.bound
        });
        let boxes = (0..self.num_vars())
            .flat_map(|j| [self.lower[j] - x[j], x[j] - self.upper[j]]);
        rows.chain(boxes).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// The optimal point for `Optimal`; the last iterate for `IterationLimit`;
    /// empty otherwise.
    pub x: Vec<f64>,
    /// Objective in the problem's own sense; NaN unless `x` is populated.
    pub objective_value: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves `p`. Structural problems (bad dimensions or bounds) are errors;
/// infeasibility, unboundedness and stalls are reported through the status.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    p.validate()?;
    let mut s = Simplex::build(p);
    let status = s.run_phases(p);
    let n = p.num_vars();
    Ok(match status {
        LpStatus::Optimal | LpStatus::IterationLimit => {
            let x: Vec<f64> = (0..n)
                .map(|j| s.val[j].clamp(p.lower[j], p.upper[j]))
                .collect();
            let objective_value = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            LpSolution {
                status,
                x,
                objective_value,
                iterations: s.iterations,
            }
        }
        LpStatus::Infeasible | LpStatus::Unbounded => LpSolution {
            status,
            x: Vec::new(),
            objective_value: f64::NAN,
            iterations: s.iterations,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    Free,
}

struct Simplex {
    m: usize,
    ncols: usize,
    /// Row-major `m x (ncols + 1)`; the last column is `B^-1 b`.
    t: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    val: Vec<f64>,
    cost: Vec<f64>,
    reduced: Vec<f64>,
    enterable: Vec<bool>,
    artificials: Vec<usize>,
    iterations: usize,
}

impl Simplex {
    fn width(&self) -> usize {
        self.ncols + 1
    }

    fn build(p: &LpProblem) -> Self {
        let n = p.num_vars();
        let m = p.rows.len();
        let mut lo = p.lower.clone();
        let mut hi = p.upper.clone();
        let mut state = Vec::with_capacity(n + m);
        let mut val = Vec::with_capacity(n + m);
        for j in 0..n {
            if lo[j].is_finite() {
                state.push(VarState::AtLower);
                val.push(lo[j]);
            } else if hi[j].is_finite() {
                state.push(VarState::AtUpper);
                val.push(hi[j]);
            } else {
                state.push(VarState::Free);
                val.push(0.0);
            }
        }
        let residuals: Vec<f64> = p
            .rows
            .iter()
            .map(|r| r.bound - r.terms.iter().map(|&(j, c)| c * val[j]).sum::<f64>())
            .collect();
        let num_art = residuals.iter().filter(|r| **r < 0.0).count();
        let ncols = n + m + num_art;
        let width = ncols + 1;
        let mut t = vec![0.0; m * width];
        let mut basis = Vec::with_capacity(m);
        lo.resize(n + m, 0.0);
        hi.resize(n + m, f64::INFINITY);
        val.resize(n + m, 0.0);
        state.resize(n + m, VarState::AtLower);
        let mut artificials = Vec::with_capacity(num_art);
        for (i, row) in p.rows.iter().enumerate() {
            let base = i * width;
            let slack = n + i;
            let sign = if residuals[i] < 0.0 { -1.0 } else { 1.0 };
            for &(j, c) in &row.terms {
                t[base + j] += sign * c;
            }
            t[base + slack] = sign;
            t[base + ncols] = sign * row.bound;
            if sign > 0.0 {
                basis.push(slack);
                state[slack] = VarState::Basic(i);
                val[slack] = residuals[i];
            } else {
                let art = n + m + artificials.len();
                artificials.push(art);
                t[base + art] = 1.0;
                basis.push(art);
                lo.push(0.0);
                hi.push(f64::INFINITY);
                val.push(-residuals[i]);
                state.push(VarState::Basic(i));
            }
        }
        let mut enterable = vec![true; ncols];
        for &a in &artificials {
            enterable[a] = false;
        }
        Simplex {
            m,
            ncols,
            t,
            basis,
            state,
            lo,
            hi,
            val,
            cost: vec![0.0; ncols],
            reduced: vec![0.0; ncols],
            enterable,
            artificials,
            iterations: 0,
        }
    }

    fn run_phases(&mut self, p: &LpProblem) -> LpStatus {
        if !self.artificials.is_empty() {
            self.cost.iter_mut().for_each(|c| *c = 0.0);
            for &a in &self.artificials {
                self.cost[a] = 1.0;
            }
            self.price_all();
            match self.iterate() {
                LpStatus::Optimal => {}
                // Phase one is bounded below by zero, so anything else is a
                // numerical breakdown.
                _ => return LpStatus::IterationLimit,
            }
            self.refresh_basic_values();
            let infeasibility: f64 = self.artificials.iter().map(|&a| self.val[a]).sum();
            if infeasibility > FEASIBILITY_TOLERANCE {
                return LpStatus::Infeasible;
            }
            // Freeze the artificials: they may shrink to zero but never grow again.
            for &a in &self.artificials {
                self.hi[a] = self.val[a].max(0.0);
                if !matches!(self.state[a], VarState::Basic(_)) {
                    self.val[a] = 0.0;
                    self.state[a] = VarState::AtLower;
                }
            }
        }
        let flip = match p.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        for (j, &c) in p.objective.iter().enumerate() {
            self.cost[j] = flip * c;
        }
        self.price_all();
        let status = self.iterate();
        self.refresh_basic_values();
        status
    }

    /// Recomputes every reduced cost from the current tableau.
    fn price_all(&mut self) {
        let w = self.width();
        self.reduced.copy_from_slice(&self.cost);
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.t[i * w..i * w + self.ncols];
            for (d, &a) in self.reduced.iter_mut().zip(row) {
                *d -= cb * a;
            }
        }
        for &b in &self.basis {
            self.reduced[b] = 0.0;
        }
    }

    /// Basic values from `B^-1 b` minus the nonbasic contributions.
    fn refresh_basic_values(&mut self) {
        let w = self.width();
        for i in 0..self.m {
            let row = &self.t[i * w..(i + 1) * w];
            let mut v = row[self.ncols];
            for j in 0..self.ncols {
                if !matches!(self.state[j], VarState::Basic(_)) && row[j] != 0.0 {
                    v -= row[j] * self.val[j];
                }
            }
            self.val[self.basis[i]] = v;
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.ncols {
            if !self.enterable[j] || self.hi[j] <= self.lo[j] {
                continue;
            }
            let d = self.reduced[j];
            let dir = match self.state[j] {
                VarState::Basic(_) => continue,
                VarState::AtLower if d < -OPTIMALITY_TOLERANCE => 1.0,
                VarState::AtUpper if d > OPTIMALITY_TOLERANCE => -1.0,
                VarState::Free if d.abs() > OPTIMALITY_TOLERANCE => -d.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if d.abs() > best_score {
                best_score = d.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    fn iterate(&mut self) -> LpStatus {
        let w = self.width();
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations >= ITERATION_CAP {
                return LpStatus::IterationLimit;
            }
            let bland = degenerate_run > DEGENERATE_RUN_FOR_BLAND;
            let Some((j, dir)) = self.choose_entering(bland) else {
                return LpStatus::Optimal;
            };
            self.iterations += 1;

            // Ratio test. `None` as the leaving row means a bound flip.
            let mut step = self.hi[j] - self.lo[j];
            let mut leaving: Option<usize> = None;
            let mut leaving_pivot = 0.0f64;
            for i in 0..self.m {
                let a = self.t[i * w + j];
                if a.abs() <= PIVOT_TOLERANCE {
                    continue;
                }
                let b = self.basis[i];
                let delta = -dir * a;
                let limit = if delta < 0.0 {
                    (self.val[b] - self.lo[b]) / -delta
                } else {
                    (self.hi[b] - self.val[b]) / delta
                };
                if limit.is_nan() || limit == f64::INFINITY {
                    continue;
                }
                let limit = limit.max(0.0);
                let better = if limit < step - STEP_EPS {
                    true
                } else if limit <= step + STEP_EPS {
                    match leaving {
                        Some(r) if bland => b < self.basis[r],
                        Some(_) => a.abs() > leaving_pivot,
                        None => false,
                    }
                } else {
                    false
                };
                if better {
                    step = limit;
                    leaving = Some(i);
                    leaving_pivot = a.abs();
                }
            }
            if step == f64::INFINITY {
                return LpStatus::Unbounded;
            }

            if step <= STEP_EPS {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }

            // Move the entering variable and every basic variable along the edge.
            if step > 0.0 {
                self.val[j] += dir * step;
                for i in 0..self.m {
                    let a = self.t[i * w + j];
                    if a != 0.0 {
                        self.val[self.basis[i]] -= dir * a * step;
                    }
                }
            }

            match leaving {
                None => {
                    self.state[j] = if dir > 0.0 {
                        self.val[j] = self.hi[j];
                        VarState::AtUpper
                    } else {
                        self.val[j] = self.lo[j];
                        VarState::AtLower
                    };
                }
                Some(r) => {
                    let b = self.basis[r];
                    let delta = -dir * self.t[r * w + j];
                    if delta < 0.0 {
                        self.val[b] = self.lo[b];
                        self.state[b] = VarState::AtLower;
                    } else {
                        self.val[b] = self.hi[b];
                        self.state[b] = VarState::AtUpper;
                    }
                    self.pivot(r, j);
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let w = self.width();
        let piv = self.t[r * w + j];
        let mut prow: Vec<f64> = self.t[r * w..(r + 1) * w].iter().map(|v| v / piv).collect();
        prow[j] = 1.0;
        let nonzero: Vec<usize> = (0..w).filter(|&k| prow[k] != 0.0).collect();
        self.t[r * w..(r + 1) * w].copy_from_slice(&prow);
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            let f = row[j];
            if f == 0.0 {
                continue;
            }
            for &k in &nonzero {
                row[k] -= f * prow[k];
            }
            row[j] = 0.0;
        }
        let f = self.reduced[j];
        if f != 0.0 {
            for &k in &nonzero {
                if k < self.ncols {
                    self.reduced[k] -= f * prow[k];
                }
            }
            self.reduced[j] = 0.0;
        }
        let old = self.basis[r];
        self.basis[r] = j;
        self.state[j] = VarState::Basic(r);
        debug_assert!(!matches!(self.state[old], VarState::Basic(_)));
    }
}
