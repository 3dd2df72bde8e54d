//! Optimal control layer: admissible projection, damped projected fixed-point
//! iteration on the discrete optimality system, and first-order diagnostics.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fem::FeFunction;
use crate::problems::project;
use crate::scheme::{CostateForm, Discretization, Fields};

/// Relative slack allowed when checking that the cost does not increase.
pub const COST_SLACK: f64 = 1e-12;

/// Largest cost increase treated as rounding noise.
pub fn cost_slack(cost: f64) -> f64 {
    COST_SLACK * cost.abs().max(1.0)
}

/// Clamps every coefficient of a piecewise constant control onto `[a, b]`.
pub fn project_admissible(u: &mut FeFunction, bounds: (f64, f64)) {
    u.coeffs.iter_mut().for_each(|v| *v = project(*v, bounds));
}

/// Settings of the fixed-point iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointOptions {
    /// Initial damping in `(0, 1]`.
    pub damping: f64,
    /// Smallest damping reached by halving after a cost increase.
    pub min_damping: f64,
    /// Absolute tolerance on `||u^{k+1} - u^k||_0`.
    pub tol: f64,
    pub max_iter: usize,
    pub costate: CostateForm,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            damping: 1.0,
            min_damping: 1.0 / 16.0,
            tol: 1e-8,
            max_iter: 200,
            costate: CostateForm::Consistent,
        }
    }
}

/// One accepted iterate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub du_norm: f64,
    pub cost: f64,
}

/// Discrete optimal state, co-state and control.
#[derive(Clone, Debug)]
pub struct Solution {
    pub state: Fields,
    pub costate: Fields,
    pub control: FeFunction,
    pub cost: f64,
    /// Cost of the initial control followed by one record per accepted iterate.
    pub log: Vec<IterationRecord>,
    pub converged: bool,
}

impl Solution {
    /// Writes the iteration log as CSV `iter,du_norm,cost`.
    pub fn write_log<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iter,du_norm,cost")?;
        for r in &self.log {
            writeln!(out, "{},{:e},{:e}", r.iter, r.du_norm, r.cost)?;
        }
        Ok(())
    }
}

/// `||a - b||_0` for piecewise constant controls.
pub fn control_distance(disc: &Discretization, a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(disc.control_mass())
        .map(|((a, b), m)| m * (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn evaluate(disc: &Discretization, u: &FeFunction, form: CostateForm) -> Result<(Fields, Fields, f64)> {
    let state = disc.solve_state(u)?;
    let costate = disc.solve_adjoint(&state, form)?;
    let cost = disc.cost(&state, u);
    Ok((state, costate, cost))
}

/// Iterates `u <- P((1 - s) u + s P0(-w / gamma))`, halving `s` whenever the
/// cost would increase and doubling it back after each accepted step, until
/// successive controls differ by at most `tol`.
///
/// Hitting `max_iter` is not an error: the last iterate is returned with
/// `converged = false`.
pub fn fixed_point_solve(disc: &Discretization, u0: &FeFunction, opts: &FixedPointOptions) -> Result<Solution> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) || !(opts.min_damping > 0.0) || !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("damping must lie in (0, 1], tolerances must be positive".into()));
    }
    let bounds = disc.problem().bounds;
    let gamma = disc.problem().gamma;
    let mut u = u0.clone();
    if u.coeffs.iter().any(|&v| project(v, bounds) != v) {
        return Err(Error::InvalidArgument("initial control is not admissible".into()));
    }
    let (mut state, mut costate, mut cost) = evaluate(disc, &u, opts.costate)?;
    let mut log = vec![IterationRecord { iter: 0, du_norm: 0.0, cost }];
    let mut damping = opts.damping;
    let mut converged = false;
    for iter in 1..=opts.max_iter {
        let means = disc.costate_means(&costate);
        loop {
            let mut next = u.clone();
            for (n, (&old, &w)) in next.coeffs.iter_mut().zip(u.coeffs.iter().zip(&means)) {
                *n = project((1.0 - damping) * old + damping * (-w / gamma), bounds);
            }
            let (s, c, j) = evaluate(disc, &next, opts.costate)?;
            if j > cost + cost_slack(cost) && damping > opts.min_damping {
                damping = (0.5 * damping).max(opts.min_damping);
                continue;
            }
            let du = control_distance(disc, &next.coeffs, &u.coeffs);
            u = next;
            state = s;
            costate = c;
            cost = j;
            log.push(IterationRecord { iter, du_norm: du, cost });
            // a successful step lets the damping grow back toward its initial value
            damping = (2.0 * damping).min(opts.damping);
            converged = du <= opts.tol;
            break;
        }
        if converged {
            break;
        }
    }
    Ok(Solution { state, costate, control: u, cost, log, converged })
}

/// Worst violation of the cellwise optimality conditions for `g = mean(w) + gamma u`:
/// `g >= 0` where `u = a`, `g <= 0` where `u = b`, `g = 0` elsewhere.
pub fn vi_residual(disc: &Discretization, costate: &Fields, u: &FeFunction) -> f64 {
    let (a, b) = disc.problem().bounds;
    let gamma = disc.problem().gamma;
    disc.costate_means(costate)
        .iter()
        .zip(&u.coeffs)
        .map(|(w, &u)| {
            let g = w + gamma * u;
            if u <= a {
                (-g).max(0.0)
            } else if u >= b {
                g.max(0.0)
            } else {
                g.abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Reduced cost `F(u) = J(y(u), omega(u), u)`.
pub fn reduced_cost(disc: &Discretization, u: &FeFunction) -> Result<f64> {
    let state = disc.solve_state(u)?;
    Ok(disc.cost(&state, u))
}

/// Outcome of a finite difference check of the reduced gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradientCheck {
    /// Worst relative mismatch using the transposed discrete state operator.
    pub transposed: f64,
    /// Same with the consistent adjoint form, which is not the exact
    /// derivative of the discrete cost.
    pub consistent: f64,
}

/// Compares `(gamma u + w, lambda)` with centered differences of the reduced
/// cost for `directions` random piecewise constant `lambda`.
pub fn gradient_check(disc: &Discretization, u: &FeFunction, h_fd: f64, directions: usize, seed: u64) -> Result<GradientCheck> {
    let state = disc.solve_state(u)?;
    let grad_t = disc.reduced_gradient(u, &disc.solve_adjoint(&state, CostateForm::Transposed)?);
    let grad_c = disc.reduced_gradient(u, &disc.solve_adjoint(&state, CostateForm::Consistent)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = GradientCheck { transposed: 0.0, consistent: 0.0 };
    for _ in 0..directions {
        let lambda: Vec<f64> = (0..u.coeffs.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let shifted = |t: f64| {
            let mut v = u.clone();
            v.coeffs.iter_mut().zip(&lambda).for_each(|(c, l)| *c += t * l);
            disc.solve_state(&v).map(|s| (s, v))
        };
        let ((sp, up), (sm, um)) = (shifted(h_fd)?, shifted(-h_fd)?);
        let fd = disc.cost_difference((&sp, &up), (&sm, &um)) / (2.0 * h_fd);
        let rel = |g: &[f64]| {
            let an: f64 = g.iter().zip(&lambda).map(|(g, l)| g * l).sum();
            let scale = an.abs().max(fd.abs());
            if scale == 0.0 {
                0.0
            } else {
                (an - fd).abs() / scale
            }
        };
        out.transposed = out.transposed.max(rel(&grad_t));
        out.consistent = out.consistent.max(rel(&grad_c));
    }
    Ok(out)
}
