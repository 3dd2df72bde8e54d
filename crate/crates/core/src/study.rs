//! Experiment drivers: per-level solves, uniform convergence studies, rate
//! tables, CSV reporting and the coefficient assumption check.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::estimate::{efficiency_index, indicators, GlobalEstimate, LocalIndicators};
use crate::fem::{rule, CellGeom, FeFunction};
use crate::mesh::Mesh;
use crate::norms::{errors, ErrorReport};
use crate::optctl::{fixed_point_solve, project_admissible, FixedPointOptions, Solution};
use crate::problems::Problem;
use crate::scheme::{Discretization, SchemeParams};

/// Column names of the run CSV, in order.
pub const CSV_HEADER: &str =
    "level,dofs_total,h,err_u,err_y_triple,err_w_triple,err_omega,err_theta,err_p,err_q,eta_y,eta_w,eta_u,eta_total,efficiency,seconds";

/// Outcome of one solve on one mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub level: usize,
    pub dofs_total: usize,
    pub h: f64,
    pub errors: Option<ErrorReport>,
    pub estimate: GlobalEstimate,
    pub efficiency: Option<f64>,
    pub seconds: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Everything produced by a single level.
pub struct LevelOutput {
    pub disc: Discretization,
    pub solution: Solution,
    pub indicators: LocalIndicators,
    pub record: RunRecord,
}

/// Solves the optimality system on `mesh` starting from the admissible
/// control closest to zero, then estimates and measures the error.
pub fn solve_level(
    problem: &Problem,
    params: &SchemeParams,
    mesh: Arc<Mesh>,
    level: usize,
    fixed_point: &FixedPointOptions,
) -> Result<LevelOutput> {
    let start = Instant::now();
    let disc = Discretization::new(problem, params, mesh)?;
    let mut u0 = FeFunction::zeros(disc.control_space().clone());
    project_admissible(&mut u0, problem.bounds);
    let solution = fixed_point_solve(&disc, &u0, fixed_point)?;
    let ind = indicators(&disc, &solution);
    let estimate = ind.global();
    let errs = errors(&disc, &solution.state, &solution.costate, &solution.control);
    let efficiency = errs.and_then(|e| efficiency_index(estimate.eta_total, e.total()));
    let record = RunRecord {
        level,
        dofs_total: disc.dofs_total(),
        h: disc.mesh().mesh_size(),
        errors: errs,
        estimate,
        efficiency,
        seconds: start.elapsed().as_secs_f64(),
        iterations: solution.log.len() - 1,
        converged: solution.converged,
    };
    Ok(LevelOutput { disc, solution, indicators: ind, record })
}

/// Mesh of uniform level `level`: `initial_subdivisions * 2^level` subdivisions per unit length.
pub fn level_mesh(problem: &Problem, level: usize) -> Result<Mesh> {
    let n = problem
        .initial_subdivisions
        .checked_shl(level as u32)
        .filter(|n| *n >> level == problem.initial_subdivisions)
        .ok_or_else(|| Error::InvalidArgument(format!("level {level} is too fine")))?;
    Mesh::generate(problem.domain, n)
}

/// Uniform refinement study over levels `0..levels`.
///
/// `on_level` sees every record as soon as it is available.
pub fn run_convergence(
    problem: &Problem,
    params: &SchemeParams,
    levels: usize,
    fixed_point: &FixedPointOptions,
    mut on_level: impl FnMut(&RunRecord),
) -> Result<Vec<RunRecord>> {
    if problem.exact.is_none() {
        return Err(Error::InvalidArgument(format!("problem `{}` has no exact solution", problem.id)));
    }
    params.validate()?;
    let mut out = Vec::with_capacity(levels);
    for level in 0..levels {
        let mesh = Arc::new(level_mesh(problem, level)?);
        let rec = solve_level(problem, params, mesh, level, fixed_point)?.record;
        on_level(&rec);
        out.push(rec);
    }
    Ok(out)
}

/// Observed rates `log(e_i / e_{i+1}) / log(h_i / h_{i+1})` between consecutive entries.
pub fn observed_rates(e: &[f64], h: &[f64]) -> Vec<f64> {
    e.windows(2)
        .zip(h.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Error columns of the CSV, in header order.
pub const ERROR_COLUMNS: [&str; 7] = ["err_u", "err_y_triple", "err_w_triple", "err_omega", "err_theta", "err_p", "err_q"];

impl ErrorReport {
    /// Values in the order of [`ERROR_COLUMNS`].
    pub fn columns(&self) -> [f64; 7] {
        [self.err_u, self.err_y_triple, self.err_w_triple, self.err_omega, self.err_theta, self.err_p, self.err_q]
    }
}

/// Rates of each error column between consecutive records.
pub fn rate_table(records: &[RunRecord]) -> Option<Vec<[f64; 7]>> {
    let cols: Vec<[f64; 7]> = records.iter().map(|r| r.errors.map(|e| e.columns())).collect::<Option<_>>()?;
    let h: Vec<f64> = records.iter().map(|r| r.h).collect();
    let mut out = vec![[0.0; 7]; records.len().saturating_sub(1)];
    for k in 0..7 {
        let e: Vec<f64> = cols.iter().map(|c| c[k]).collect();
        for (row, r) in out.iter_mut().zip(observed_rates(&e, &h)) {
            row[k] = r;
        }
    }
    Some(out)
}

/// Writes the records under [`CSV_HEADER`]. Unknown values are written as
/// `NaN`; with `timing` off the `seconds` column is zero so that output is
/// reproducible byte for byte.
pub fn write_csv<W: Write>(records: &[RunRecord], mut out: W, timing: bool) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let errs = r.errors.map(|e| e.columns()).unwrap_or([f64::NAN; 7]);
        write!(out, "{},{},{:e}", r.level, r.dofs_total, r.h)?;
        for e in errs {
            write!(out, ",{e:e}")?;
        }
        let g = &r.estimate;
        write!(out, ",{:e},{:e},{:e},{:e}", g.eta_y, g.eta_w, g.eta_u, g.eta_total)?;
        let seconds = if timing { r.seconds } else { 0.0 };
        writeln!(out, ",{:e},{:e}", r.efficiency.unwrap_or(f64::NAN), seconds)?;
    }
    Ok(())
}

/// Margins of the sufficient well-posedness conditions on the coefficients.
///
/// Every margin is "left side minus right side" of an inequality that should
/// be nonnegative (strictly positive where noted).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssumptionReport {
    pub nu0: f64,
    pub sigma_min: f64,
    /// `||grad nu||_inf`, sampled.
    pub grad_nu_inf: f64,
    /// `||div beta||_0`, by quadrature.
    pub div_beta_l2: f64,
    /// `sigma_min - 9 ||grad nu||^2 / nu0`.
    pub reaction_margin: f64,
    /// `min(reaction_margin, nu0 / 12) - ||div beta||_0`, taking the unknown
    /// continuity constant as one; must be positive unless `div beta = 0`.
    pub divergence_margin: f64,
    /// `min(sigma - div beta) - 9 ||grad nu||^2 / nu0`, the condition used for
    /// the broken (DG) coercivity; must be positive.
    pub dg_margin: f64,
    /// Whether the augmentation constants meet the recommended lower bounds.
    pub augmentation_ok: bool,
}

impl AssumptionReport {
    /// True when every condition holds. The conditions are sufficient only.
    pub fn ok(&self) -> bool {
        self.reaction_margin >= 0.0 && (self.divergence_margin > 0.0 || self.div_beta_l2 == 0.0) && self.augmentation_ok
    }

    /// True when the broken (DG) coercivity condition holds.
    pub fn dg_ok(&self) -> bool {
        self.dg_margin > 0.0 && self.augmentation_ok
    }
}

/// Samples the coefficients at quadrature points of a fine structured mesh.
pub fn check_assumptions(problem: &Problem, params: &SchemeParams) -> Result<AssumptionReport> {
    let mesh = Mesh::generate(problem.domain, 32)?;
    let q = rule(6);
    let mut sigma_min = f64::INFINITY;
    let mut sigma_beta_min = f64::INFINITY;
    let mut grad_nu_inf: f64 = 0.0;
    let mut div_sq = 0.0;
    for c in 0..mesh.n_cells() {
        let g = CellGeom::new(&mesh, c);
        for (p, w) in q.points.iter().zip(&q.weights) {
            let x = g.map([p[0], p[1]]);
            let s = (problem.sigma)(x);
            let (_, gn) = (problem.nu)(x);
            let (_, db) = (problem.beta)(x);
            sigma_min = sigma_min.min(s);
            sigma_beta_min = sigma_beta_min.min(s - db);
            grad_nu_inf = grad_nu_inf.max(gn[0].hypot(gn[1]));
            div_sq += w * g.det.abs() * db * db;
        }
    }
    let nu0 = problem.nu_bounds.0;
    let penalty = 9.0 * grad_nu_inf * grad_nu_inf / nu0;
    let reaction_margin = sigma_min - penalty;
    let div_beta_l2 = div_sq.sqrt();
    let rho1_target = 2.0 * nu0 / 3.0;
    Ok(AssumptionReport {
        nu0,
        sigma_min,
        grad_nu_inf,
        div_beta_l2,
        reaction_margin,
        divergence_margin: reaction_margin.min(nu0 / 12.0) - div_beta_l2,
        dg_margin: sigma_beta_min - penalty,
        augmentation_ok: (params.rho1 - rho1_target).abs() <= 1e-12 * nu0.max(1.0) && params.rho2 > nu0 / 3.0,
    })
}
