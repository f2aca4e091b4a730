//! Projected gradient descent for smooth convex functions on a box.
//!
//! Returns the attained point together with a certified suboptimality slack:
//! for convex `L` and any `y` in the box, `L(x) - L(y) <= <g, x - y>`, and
//! the right side is maximized coordinate-wise at a vertex of the box.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexConfig {
    /// Sufficient-decrease parameter of the Armijo test.
    pub armijo: f64,
    /// Step shrink factor on a failed Armijo test.
    pub shrink: f64,
    pub max_iterations: usize,
    /// Stop when the projected gradient norm is `<= grad_tol * (1 + |L|)`.
    pub grad_tol: f64,
    /// Stop when one step decreases `L` by no more than this, or when the
    /// certified slack falls below it.
    pub objective_tol: f64,
}

impl ConvexConfig {
    /// Defaults for a target bound accuracy `eps`.
    pub fn for_eps(eps: f64) -> Self {
        Self {
            armijo: 1e-4,
            shrink: 0.5,
            max_iterations: 10_000,
            grad_tol: 1e-9,
            objective_tol: 1e-2 * eps,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Upper bound on `value - min L` (valid when `L` is convex).
    pub slack: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub gradient_evaluations: usize,
    /// False when the iteration cap was reached first.
    pub converged: bool,
}

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

/// `max_y <g, x - y>` over the box; zero exactly at a constrained minimizer.
fn duality_gap(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    (0..x.len())
        .map(|i| {
            if g[i] > 0.0 {
                g[i] * (x[i] - lo[i])
            } else {
                g[i] * (x[i] - hi[i])
            }
        })
        .sum()
}

/// Minimizes `f` over `[lo, hi]` starting from `x0` (projected onto the box).
pub fn minimize_box(
    f: &dyn Fn(&[f64]) -> f64,
    grad: &dyn Fn(&[f64]) -> Vec<f64>,
    lo: &[f64],
    hi: &[f64],
    x0: &[f64],
    cfg: &ConvexConfig,
) -> ConvexResult {
    let mut x = x0.to_vec();
    project(&mut x, lo, hi);
    let mut fx = f(&x);
    let mut g = grad(&x);
    let mut evals = 1;
    let mut gevals = 1;
    let mut step = 1.0;
    let mut iterations = 0;
    let mut trial = vec![0.0; x.len()];

    loop {
        let slack = duality_gap(&x, &g, lo, hi);
        // projected gradient step of unit length, as a stationarity measure
        let pg: f64 = (0..x.len())
            .map(|i| ((x[i] - g[i]).clamp(lo[i], hi[i]) - x[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        if pg <= cfg.grad_tol * (1.0 + fx.abs()) || slack <= cfg.objective_tol {
            return ConvexResult {
                x,
                value: fx,
                slack,
                iterations,
                evaluations: evals,
                gradient_evaluations: gevals,
                converged: true,
            };
        }
        if iterations >= cfg.max_iterations {
            return ConvexResult {
                x,
                value: fx,
                slack,
                iterations,
                evaluations: evals,
                gradient_evaluations: gevals,
                converged: false,
            };
        }
        iterations += 1;

        // backtracking along the projection arc
        let mut accepted = None;
        for _ in 0..60 {
            for i in 0..x.len() {
                trial[i] = (x[i] - step * g[i]).clamp(lo[i], hi[i]);
            }
            let ft = f(&trial);
            evals += 1;
            let decrease: f64 = (0..x.len()).map(|i| g[i] * (trial[i] - x[i])).sum();
            if ft <= fx + cfg.armijo * decrease {
                accepted = Some(ft);
                break;
            }
            step *= cfg.shrink;
        }
        let Some(ft) = accepted else {
            // no progress possible at machine precision
            return ConvexResult {
                x,
                value: fx,
                slack,
                iterations,
                evaluations: evals,
                gradient_evaluations: gevals,
                converged: true,
            };
        };
        let dropped = fx - ft;
        x.copy_from_slice(&trial);
        fx = ft;
        g = grad(&x);
        gevals += 1;
        step /= cfg.shrink;
        if dropped <= cfg.objective_tol {
            let slack = duality_gap(&x, &g, lo, hi);
            return ConvexResult {
                x,
                value: fx,
                slack,
                iterations,
                evaluations: evals,
                gradient_evaluations: gevals,
                converged: true,
            };
        }
    }
}
