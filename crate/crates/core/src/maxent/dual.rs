//! Projected Newton on the Lagrange dual of entropy maximization under
//! linear inequalities `a y <= b`.
//!
//! For multipliers `lambda >= 0` the primal maximizer is `y = grad phi(u)` with
//! `u = -a^T lambda`, where `phi` is the convex conjugate of the negated
//! entropy over the primal domain. The dual `phi(u) + b . lambda` is smooth and
//! convex; its gradient `b - a y` measures primal infeasibility, and
//! `lambda . (b - a y)` is the duality gap.

/// Conjugate of the negated entropy over the primal domain.
pub(crate) trait Conjugate {
    /// `phi(u)` and its gradient, the primal point.
    fn eval(&self, u: &[f64]) -> (f64, Vec<f64>);
    /// Diagonal part of the Hessian of `phi` at primal point `y`.
    fn curvature(&self, y: &[f64]) -> Vec<f64>;
    /// Whether the Hessian also has the rank-one term `-y y^T`.
    fn centered(&self) -> bool;
}

/// Probability simplex: `phi(u) = ln sum exp(u)`.
pub(crate) struct LogSumExp;

impl Conjugate for LogSumExp {
    fn eval(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let top = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = u.iter().map(|v| (v - top).exp()).collect();
        let z: f64 = e.iter().sum();
        (top + z.ln(), e.into_iter().map(|v| v / z).collect())
    }

    fn curvature(&self, y: &[f64]) -> Vec<f64> {
        y.to_vec()
    }

    fn centered(&self) -> bool {
        true
    }
}

/// Unit box with binary entropy per coordinate: `phi(u) = sum ln(1 + exp(u))`.
pub(crate) struct Softplus;

fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

impl Conjugate for Softplus {
    fn eval(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let value = u.iter().map(|&v| v.max(0.0) + (-v.abs()).exp().ln_1p()).sum();
        (value, u.iter().map(|&v| sigmoid(v)).collect())
    }

    fn curvature(&self, y: &[f64]) -> Vec<f64> {
        y.iter().map(|&v| v * (1.0 - v)).collect()
    }

    fn centered(&self) -> bool {
        false
    }
}

pub(crate) struct DualOutcome {
    pub y: Vec<f64>,
    pub iterations: usize,
    /// Larger of the constraint violation and the duality gap.
    pub gap: f64,
    pub converged: bool,
}

/// Upper limit on the width of the near-active band of multipliers.
const ACTIVE_BAND: f64 = 1e-3;
const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Minimizes the dual over `lambda >= 0`.
///
/// Multipliers within a shrinking band of zero whose gradient pushes them
/// down are moved by scaled gradient steps and the rest by Newton steps, so
/// the iteration cannot zigzag across the bound.
pub(crate) fn dual_newton<C: Conjugate>(
    conj: &C,
    a: &[Vec<f64>],
    b: &[f64],
    k: usize,
    tolerance: f64,
    max_iterations: usize,
) -> DualOutcome {
    let m = a.len();
    let eval = |lambda: &[f64]| -> (f64, Vec<f64>) {
        let u: Vec<f64> = (0..k)
            .map(|w| -(0..m).map(|j| lambda[j] * a[j][w]).sum::<f64>())
            .collect();
        let (phi, y) = conj.eval(&u);
        (phi + dot(b, lambda), y)
    };
    let mut lambda = vec![0.0; m];
    let (mut dual, mut y) = eval(&lambda);
    let mut iterations = 0;
    loop {
        let ay: Vec<f64> = a.iter().map(|row| dot(row, &y)).collect();
        let g: Vec<f64> = b.iter().zip(&ay).map(|(x, v)| x - v).collect();
        let violation = g.iter().fold(0.0f64, |v, &gj| v.max(-gj));
        let gap = dot(&lambda, &g).abs();
        let done = violation <= tolerance && gap <= tolerance;
        if done || iterations >= max_iterations {
            return DualOutcome {
                y,
                iterations,
                gap: gap.max(violation),
                converged: done,
            };
        }
        iterations += 1;

        let residual = lambda
            .iter()
            .zip(&g)
            .map(|(&l, &gj)| (l - (l - gj).max(0.0)).powi(2))
            .sum::<f64>()
            .sqrt();
        let band = residual.min(ACTIVE_BAND);
        let pinned: Vec<bool> = (0..m).map(|j| lambda[j] <= band && g[j] > 0.0).collect();

        let w = conj.curvature(&y);
        let centered = conj.centered();
        let hess = |j: usize, l: usize| {
            let mut v: f64 = (0..k).map(|i| w[i] * a[j][i] * a[l][i]).sum();
            if centered {
                v -= ay[j] * ay[l];
            }
            v
        };
        let free: Vec<usize> = (0..m).filter(|&j| !pinned[j]).collect();
        let f = free.len();
        let mut h = vec![vec![0.0; f]; f];
        for (r, &j) in free.iter().enumerate() {
            for (c, &l) in free.iter().enumerate().skip(r) {
                let v = hess(j, l);
                h[r][c] = v;
                h[c][r] = v;
            }
        }
        let rhs: Vec<f64> = free.iter().map(|&j| -g[j]).collect();
        let scale = (0..f).map(|r| h[r][r]).fold(1e-300f64, f64::max);
        let mut ridge = 1e-12 * scale;
        let step = loop {
            if let Some(d) = cholesky_solve(&h, &rhs, ridge) {
                break d;
            }
            ridge = (ridge * 100.0).max(1e-300);
        };
        let mut newton = vec![0.0; m];
        for (r, &j) in free.iter().enumerate() {
            newton[j] = step[r];
        }
        let mut gradient = vec![0.0; m];
        for j in 0..m {
            let d = -g[j] / hess(j, j).max(1e-12);
            gradient[j] = d;
            if pinned[j] {
                newton[j] = d;
            }
        }

        let mut accepted = false;
        for direction in [&newton, &gradient] {
            let mut t = 1.0;
            while t > MIN_STEP {
                let trial: Vec<f64> = lambda
                    .iter()
                    .zip(direction)
                    .map(|(l, d)| (l + t * d).max(0.0))
                    .collect();
                let (trial_dual, trial_y) = eval(&trial);
                let moved: Vec<f64> = trial.iter().zip(&lambda).map(|(p, q)| p - q).collect();
                let decrease = dot(&g, &moved);
                if trial_dual <= dual + ARMIJO * decrease + 1e-15 * dual.abs().max(1.0) {
                    lambda = trial;
                    dual = trial_dual;
                    y = trial_y;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if accepted {
                break;
            }
        }
        if !accepted {
            return DualOutcome {
                y,
                iterations,
                gap: gap.max(violation),
                converged: false,
            };
        }
    }
}

/// Solves `(h + ridge I) x = rhs` for symmetric `h`; `None` unless positive definite.
fn cholesky_solve(h: &[Vec<f64>], rhs: &[f64], ridge: f64) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = h[i][j] + if i == j { ridge } else { 0.0 };
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i][k] * y[k]).sum();
        y[i] = (rhs[i] - s) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k][i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i][i];
    }
    Some(x)
}
