//! Dörfler marking and the solve, estimate, mark, refine loop.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::estimate::LocalIndicators;
use crate::mesh::Mesh;
use crate::optctl::FixedPointOptions;
use crate::problems::Problem;
use crate::scheme::SchemeParams;
use crate::study::{level_mesh, solve_level, RunRecord};

/// Smallest set of cells, taken by decreasing indicator with ties broken by
/// lower index, whose indicators sum to at least `theta^2` of the total.
///
/// Returned indices are sorted ascending.
pub fn dorfler_mark(cell_totals: &[f64], theta: f64) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidArgument(format!("marking fraction {theta} must lie in (0, 1)")));
    }
    if cell_totals.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidArgument("indicators must be finite and nonnegative".into()));
    }
    let total: f64 = cell_totals.iter().sum();
    let target = theta * theta * total;
    let mut order: Vec<usize> = (0..cell_totals.len()).collect();
    order.sort_by(|&a, &b| cell_totals[b].total_cmp(&cell_totals[a]).then(a.cmp(&b)));
    let mut marked = Vec::new();
    let mut sum = 0.0;
    for c in order {
        if sum >= target && !marked.is_empty() {
            break;
        }
        if cell_totals[c] == 0.0 && total > 0.0 {
            break;
        }
        sum += cell_totals[c];
        marked.push(c);
    }
    marked.sort_unstable();
    Ok(marked)
}

/// Settings of the adaptive loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveOptions {
    /// Dörfler fraction in `(0, 1)`.
    pub theta: f64,
    /// The loop stops once the total number of unknowns exceeds this.
    pub max_dofs: usize,
    /// Hard cap on the number of solves; a safeguard, the budget normally stops the loop.
    pub max_iterations: usize,
    pub fixed_point: FixedPointOptions,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions { theta: 0.5, max_dofs: 100_000, max_iterations: 500, fixed_point: FixedPointOptions::default() }
    }
}

/// One pass of the adaptive loop.
#[derive(Clone, Debug)]
pub struct AdaptiveStep {
    pub record: RunRecord,
    /// Mesh the record was computed on.
    pub mesh: Arc<Mesh>,
    /// Per-cell indicators on that mesh.
    pub indicators: LocalIndicators,
    /// Cells marked for refinement on that mesh; empty on the last step.
    pub marked: Vec<usize>,
}

/// Runs solve, estimate, mark and refine from the coarsest mesh until the
/// unknown count exceeds `max_dofs` or `max_iterations` solves were done.
///
/// `on_step` sees each step as soon as it is available.
pub fn adaptive_loop(
    problem: &Problem,
    params: &SchemeParams,
    opts: &AdaptiveOptions,
    mut on_step: impl FnMut(&AdaptiveStep),
) -> Result<Vec<AdaptiveStep>> {
    params.validate()?;
    if !(opts.theta > 0.0 && opts.theta < 1.0) {
        return Err(Error::InvalidArgument(format!("marking fraction {} must lie in (0, 1)", opts.theta)));
    }
    let mut mesh = Arc::new(level_mesh(problem, 0)?);
    let mut steps: Vec<AdaptiveStep> = Vec::new();
    for iter in 0..opts.max_iterations.max(1) {
        let out = solve_level(problem, params, mesh.clone(), iter, &opts.fixed_point)?;
        let last = out.record.dofs_total > opts.max_dofs || iter + 1 >= opts.max_iterations;
        let marked = if last { Vec::new() } else { dorfler_mark(&out.indicators.cell_totals(), opts.theta)? };
        let step = AdaptiveStep { record: out.record, mesh: mesh.clone(), indicators: out.indicators, marked };
        on_step(&step);
        if last {
            steps.push(step);
            break;
        }
        let next = Arc::new(mesh.bisect_refine(&step.marked)?);
        steps.push(step);
        mesh = next;
    }
    Ok(steps)
}
