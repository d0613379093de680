//! Pairwise Frank-Wolfe for separable concave objectives over a polytope
//! given as an LP feasible region.

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpProblem, LpStatus, Sense};

/// Boundary coordinates are moved this far inside when taking gradients.
pub(crate) const GRADIENT_CLAMP: f64 = 1e-12;

const SAME_POINT: f64 = 1e-12;
const BISECTION_STEPS: usize = 200;

/// Derivatives of `f(x) = sum_i h(x_i)` with `h` concave on `[0, 1]`.
pub(crate) trait Separable {
    /// Exact derivative; may be infinite on the boundary.
    fn slope(&self, x: f64) -> f64;
    /// Derivative with arguments on the singular boundary moved just inside.
    fn safe_slope(&self, x: f64) -> f64;
}

/// Binary entropy per coordinate (labellings).
pub(crate) struct BinaryEntropy;

impl Separable for BinaryEntropy {
    fn slope(&self, x: f64) -> f64 {
        if x <= 0.0 {
            f64::INFINITY
        } else if x >= 1.0 {
            f64::NEG_INFINITY
        } else {
            ((1.0 - x) / x).ln()
        }
    }

    fn safe_slope(&self, x: f64) -> f64 {
        if x > 0.0 && x < 1.0 {
            self.slope(x)
        } else {
            self.slope(x.clamp(GRADIENT_CLAMP, 1.0 - GRADIENT_CLAMP))
        }
    }
}

pub(crate) struct FwOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub gap: f64,
    pub converged: bool,
}

struct ActiveSet {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl ActiveSet {
    /// The weighted combination, clamped into the box so rounding never
    /// pushes a coordinate past a bound where the slope is infinite.
    fn point(&self, lower: &[f64], upper: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; lower.len()];
        for (a, &w) in self.atoms.iter().zip(&self.weights) {
            for (xi, ai) in x.iter_mut().zip(a) {
                *xi += w * ai;
            }
        }
        for ((xi, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
            *xi = xi.clamp(*lo, *hi);
        }
        x
    }

    fn find(&self, v: &[f64]) -> Option<usize> {
        self.atoms.iter().position(|a| {
            a.iter()
                .zip(v)
                .all(|(p, q)| (p - q).abs() <= SAME_POINT)
        })
    }

    fn prune(&mut self) {
        let mut i = 0;
        while i < self.atoms.len() {
            if self.weights[i] <= 0.0 {
                self.atoms.swap_remove(i);
                self.weights.swap_remove(i);
            } else {
                i += 1;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// `phi'(gamma)` for `phi(gamma) = f(x + gamma d)`. Infinite terms of
/// opposite sign cannot meet at a feasible point, so their sum is read as 0.
fn directional<O: Separable>(obj: &O, x: &[f64], d: &[f64], gamma: f64) -> f64 {
    let mut total = 0.0;
    for (&xi, &di) in x.iter().zip(d) {
        if di != 0.0 {
            total += obj.slope(xi + gamma * di) * di;
        }
    }
    if total.is_nan() {
        0.0
    } else {
        total
    }
}

/// Exact maximizer of the concave `phi` on `[0, gamma_max]`.
fn line_search<O: Separable>(obj: &O, x: &[f64], d: &[f64], gamma_max: f64) -> f64 {
    if directional(obj, x, d, 0.0) <= 0.0 {
        return 0.0;
    }
    if directional(obj, x, d, gamma_max) >= 0.0 {
        return gamma_max;
    }
    let (mut lo, mut hi) = (0.0, gamma_max);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if directional(obj, x, d, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Maximizes `obj` over `region`, starting from the uniform mixture of
/// `start` (feasible points of `region`).
pub(crate) fn maximize<O: Separable>(
    obj: &O,
    region: &LpProblem,
    start: Vec<Vec<f64>>,
    tolerance: f64,
    max_iterations: usize,
) -> Result<FwOutcome> {
    let mut region = region.clone();
    region.sense = Sense::Maximize;

    let mut active = ActiveSet {
        atoms: Vec::new(),
        weights: Vec::new(),
    };
    for p in start {
        if active.find(&p).is_none() {
            active.atoms.push(p);
        }
    }
    if active.atoms.is_empty() {
        return Err(Error::InvalidProblem("no starting point".into()));
    }
    let k = active.atoms.len() as f64;
    active.weights = vec![1.0 / k; active.atoms.len()];

    let mut iterations = 0;
    loop {
        let x = active.point(&region.lower, &region.upper);
        let grad: Vec<f64> = x.iter().map(|&v| obj.safe_slope(v)).collect();

        region.objective.clone_from(&grad);
        let sol = solve_lp(&region)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::SolverFailure(sol.status));
        }
        let s = sol.x;
        let gx = dot(&grad, &x);
        let gap = (dot(&grad, &s) - gx).max(0.0);

        if gap <= tolerance || iterations >= max_iterations {
            return Ok(FwOutcome {
                x,
                iterations,
                gap,
                converged: gap <= tolerance,
            });
        }
        iterations += 1;

        let away = active
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (i, dot(&grad, a)))
            .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
            .0;

        let target = match active.find(&s) {
            Some(i) => i,
            None => {
                active.atoms.push(s);
                active.weights.push(0.0);
                active.atoms.len() - 1
            }
        };
        if target == away {
            // x is itself optimal up to the gap of a single atom: plain FW step.
            let d: Vec<f64> = active.atoms[target].iter().zip(&x).map(|(p, q)| p - q).collect();
            let gamma = line_search(obj, &x, &d, 1.0);
            active.weights.iter_mut().for_each(|w| *w *= 1.0 - gamma);
            active.weights[target] += gamma;
        } else {
            let alpha = active.weights[away];
            let d: Vec<f64> = active.atoms[target]
                .iter()
                .zip(&active.atoms[away])
                .map(|(p, q)| p - q)
                .collect();
            let gamma = line_search(obj, &x, &d, alpha);
            if gamma >= alpha {
                active.weights[away] = 0.0;
                active.weights[target] += alpha;
            } else {
                active.weights[away] -= gamma;
                active.weights[target] += gamma;
            }
        }
        active.prune();
    }
}
