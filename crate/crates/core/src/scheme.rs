//! Discretization of the optimality system: spaces, assembled operators,
//! cached factorizations and the state and co-state solves.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use crate::assembly::{ScalarShapes, VectorShapes};
use crate::error::{Error, Result};
use crate::fem::{rule, CellGeom, FeFunction, Space, SpaceKind, Tabulation};
use crate::linsolve::{Factorization, SparseMatrix, TripletBuilder};
use crate::mesh::Mesh;
use crate::problems::Problem;

/// Quadrature degree used for loads, tracking terms and the cost.
pub(crate) const DATA_DEGREE: usize = 8;

/// Discretization family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Conforming augmented mixed elements.
    Cg,
    /// Discontinuous Galerkin with upwind transport.
    Dg,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Cg => "cg",
            SchemeKind::Dg => "dg",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cg" => Ok(SchemeKind::Cg),
            "dg" => Ok(SchemeKind::Dg),
            _ => Err(Error::InvalidArgument(format!("unknown scheme `{s}` (expected cg or dg)"))),
        }
    }
}

/// Which bilinear form drives the co-state solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CostateForm {
    /// The continuous adjoint form discretized on its own; consistent with
    /// the exact co-state of the continuous problem.
    #[default]
    Consistent,
    /// The transpose of the discrete state operator; yields the exact
    /// gradient of the discrete reduced cost.
    Transposed,
}

/// Tunable scheme parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeParams {
    pub kind: SchemeKind,
    /// DG polynomial degree `k`: velocity `P_{k+1}`, vorticity and pressure `P_k`.
    pub degree: usize,
    /// Augmentation weight of the constitutive residual.
    pub rho1: f64,
    /// Augmentation weight of the divergence residual.
    pub rho2: f64,
    /// DG normal velocity jump penalty constant.
    pub a11: f64,
    /// DG tangential velocity jump penalty constant.
    pub c11: f64,
    /// DG pressure jump penalty constant.
    pub d11: f64,
    /// Apply the pressure jump penalty on boundary edges too.
    pub boundary_pressure_penalty: bool,
    /// CG only: use discontinuous linear vorticity.
    pub discontinuous_vorticity: bool,
}

impl SchemeParams {
    /// Defaults derived from the viscosity bounds of `problem`.
    pub fn new(kind: SchemeKind, problem: &Problem) -> Self {
        let (nu0, nu1) = problem.nu_bounds;
        SchemeParams {
            kind,
            degree: 0,
            rho1: 2.0 * nu0 / 3.0,
            rho2: 0.4 * nu0,
            a11: 10.0 * nu1,
            c11: 10.0 * nu1,
            d11: 1.0 / nu1,
            boundary_pressure_penalty: false,
            discontinuous_vorticity: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("a11", self.a11), ("c11", self.c11), ("d11", self.d11)];
        if let Some((n, v)) = positive.iter().find(|(_, v)| !(*v > 0.0)) {
            return Err(Error::InvalidArgument(format!("{n} must be positive, got {v}")));
        }
        if !(self.rho1 >= 0.0 && self.rho2 >= 0.0) {
            return Err(Error::InvalidArgument("augmentation constants must be nonnegative".into()));
        }
        if self.kind == SchemeKind::Dg && self.degree > 1 {
            return Err(Error::InvalidArgument(format!("DG degree {} is not supported (0 or 1)", self.degree)));
        }
        Ok(())
    }
}

/// Offsets of the stacked unknown `[velocity | vorticity | pressure | multiplier]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub velocity: usize,
    pub vorticity: usize,
    pub pressure: usize,
}

impl Layout {
    pub fn vorticity_offset(&self) -> usize {
        self.velocity
    }

    pub fn pressure_offset(&self) -> usize {
        self.velocity + self.vorticity
    }

    pub fn multiplier(&self) -> usize {
        self.velocity + self.vorticity + self.pressure
    }

    pub fn total(&self) -> usize {
        self.multiplier() + 1
    }
}

/// Everything assembly needs to know.
pub(crate) struct Setup {
    pub problem: Problem,
    pub params: SchemeParams,
    pub mesh: Arc<Mesh>,
    pub velocity: Arc<Space>,
    pub vorticity: Arc<Space>,
    pub pressure: Arc<Space>,
    pub control: Arc<Space>,
    pub layout: Layout,
    pub fixed: Vec<bool>,
}

impl Setup {
    pub fn volume_degree(&self) -> usize {
        match self.params.kind {
            SchemeKind::Cg => 7,
            SchemeKind::Dg => 2 * self.velocity.basis().degree() + 3,
        }
    }

    pub fn edge_degree(&self) -> usize {
        2 * self.velocity.basis().degree() + 2
    }
}

/// Velocity, vorticity and pressure of a primal or dual solve.
#[derive(Clone, Debug)]
pub struct Fields {
    pub velocity: FeFunction,
    pub vorticity: FeFunction,
    pub pressure: FeFunction,
    /// Lagrange multiplier of the zero-mean pressure constraint.
    pub multiplier: f64,
}

/// Assembled discrete optimality system on one mesh.
pub struct Discretization {
    setup: Setup,
    state_matrix: SparseMatrix,
    adjoint_matrix: SparseMatrix,
    state_lu: Factorization,
    adjoint_lu: Factorization,
    /// `(f, v)` on velocity rows.
    load: Vec<f64>,
    /// `(u, v)`: velocity rows by control columns.
    control_coupling: SparseMatrix,
    mass_velocity: SparseMatrix,
    mass_vorticity: SparseMatrix,
    /// `(y_d, v)` and `(omega_d, theta)`.
    target_velocity: Vec<f64>,
    target_vorticity: Vec<f64>,
    /// Cell areas per control unknown.
    control_mass: Vec<f64>,
}

impl fmt::Debug for Discretization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Discretization")
            .field("scheme", &self.setup.params.kind)
            .field("cells", &self.setup.mesh.n_cells())
            .field("layout", &self.setup.layout)
            .finish_non_exhaustive()
    }
}

impl Discretization {
    pub fn new(problem: &Problem, params: &SchemeParams, mesh: Arc<Mesh>) -> Result<Self> {
        params.validate()?;
        let (vk, wk, pk) = match params.kind {
            SchemeKind::Cg => (
                SpaceKind::MiniVelocity,
                if params.discontinuous_vorticity {
                    SpaceKind::DgScalar { degree: 1 }
                } else {
                    SpaceKind::VorticityCont { degree: 1 }
                },
                SpaceKind::LagrangeScalar { degree: 1 },
            ),
            SchemeKind::Dg => (
                SpaceKind::DgVector { degree: params.degree + 1 },
                SpaceKind::DgScalar { degree: params.degree },
                SpaceKind::DgScalar { degree: params.degree },
            ),
        };
        let velocity = Space::new(mesh.clone(), vk)?;
        let vorticity = Space::new(mesh.clone(), wk)?;
        let pressure = Space::new(mesh.clone(), pk)?;
        let control = Space::new(mesh.clone(), SpaceKind::PiecewiseConstVector)?;
        let layout = Layout { velocity: velocity.ndofs(), vorticity: vorticity.ndofs(), pressure: pressure.ndofs() };
        let mut fixed = vec![false; layout.total()];
        fixed[..layout.velocity].copy_from_slice(velocity.dirichlet_mask());
        let setup = Setup {
            problem: problem.clone(),
            params: params.clone(),
            mesh,
            velocity,
            vorticity,
            pressure,
            control,
            layout,
            fixed,
        };
        let (state_matrix, adjoint_matrix) = match params.kind {
            SchemeKind::Cg => crate::cg::assemble(&setup),
            SchemeKind::Dg => crate::dg::assemble(&setup),
        };
        let state_lu = Factorization::new(&state_matrix)?;
        let adjoint_lu = Factorization::new(&adjoint_matrix)?;
        let data = assemble_data(&setup);
        Ok(Discretization {
            setup,
            state_matrix,
            adjoint_matrix,
            state_lu,
            adjoint_lu,
            load: data.load,
            control_coupling: data.control_coupling,
            mass_velocity: data.mass_velocity,
            mass_vorticity: data.mass_vorticity,
            target_velocity: data.target_velocity,
            target_vorticity: data.target_vorticity,
            control_mass: data.control_mass,
        })
    }

    pub fn problem(&self) -> &Problem {
        &self.setup.problem
    }

    pub fn params(&self) -> &SchemeParams {
        &self.setup.params
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.setup.mesh
    }

    pub fn layout(&self) -> Layout {
        self.setup.layout
    }

    pub fn velocity_space(&self) -> &Arc<Space> {
        &self.setup.velocity
    }

    pub fn vorticity_space(&self) -> &Arc<Space> {
        &self.setup.vorticity
    }

    pub fn pressure_space(&self) -> &Arc<Space> {
        &self.setup.pressure
    }

    pub fn control_space(&self) -> &Arc<Space> {
        &self.setup.control
    }

    /// State operator with eliminated boundary unknowns.
    pub fn state_matrix(&self) -> &SparseMatrix {
        &self.state_matrix
    }

    /// Co-state operator of the consistent adjoint form.
    pub fn adjoint_matrix(&self) -> &SparseMatrix {
        &self.adjoint_matrix
    }

    /// Unknowns of the state and co-state systems plus the control unknowns.
    pub fn dofs_total(&self) -> usize {
        2 * self.setup.layout.total() + self.setup.control.ndofs()
    }

    /// Cell areas indexed by control unknown (the control mass diagonal).
    pub fn control_mass(&self) -> &[f64] {
        &self.control_mass
    }

    /// Right-hand side of the state system for control coefficients `u`.
    pub fn state_rhs(&self, u: &[f64]) -> Vec<f64> {
        let mut b = vec![0.0; self.setup.layout.total()];
        let bu = self.control_coupling.mul_vec(u);
        for (i, (l, c)) in self.load.iter().zip(bu).enumerate() {
            b[i] = l + c;
        }
        b
    }

    /// Solves the state system for the control `u`.
    pub fn solve_state(&self, u: &FeFunction) -> Result<Fields> {
        self.check_control(u)?;
        let x = self.state_lu.solve(&self.state_rhs(&u.coeffs))?;
        Ok(self.split(x))
    }

    /// Right-hand side of the co-state system: tracking mismatches.
    pub fn adjoint_rhs(&self, state: &Fields) -> Vec<f64> {
        let lay = self.setup.layout;
        let mut b = vec![0.0; lay.total()];
        let my = self.mass_velocity.mul_vec(&state.velocity.coeffs);
        for (i, (m, t)) in my.iter().zip(&self.target_velocity).enumerate() {
            if !self.setup.fixed[i] {
                b[i] = m - t;
            }
        }
        let mw = self.mass_vorticity.mul_vec(&state.vorticity.coeffs);
        for (i, (m, t)) in mw.iter().zip(&self.target_vorticity).enumerate() {
            b[lay.vorticity_offset() + i] = m - t;
        }
        b
    }

    /// Solves the co-state system driven by `state`.
    pub fn solve_adjoint(&self, state: &Fields, form: CostateForm) -> Result<Fields> {
        let b = self.adjoint_rhs(state);
        let x = match form {
            CostateForm::Consistent => self.adjoint_lu.solve(&b)?,
            CostateForm::Transposed => self.state_lu.solve_transpose(&b)?,
        };
        Ok(self.split(x))
    }

    /// `J = |y - y_d|^2 / 2 + |omega - omega_d|^2 / 2 + gamma |u|^2 / 2`.
    pub fn cost(&self, state: &Fields, u: &FeFunction) -> f64 {
        let (ty, tw) = self.tracking(state);
        let uu: f64 = u.coeffs.iter().zip(&self.control_mass).map(|(u, m)| m * u * u).sum();
        0.5 * (ty + tw + self.setup.problem.gamma * uu)
    }

    /// `cost(plus) - cost(minus)`, evaluated as `(a - b)(a + b) / 2` pointwise
    /// so that nearby arguments do not cancel catastrophically.
    pub fn cost_difference(&self, plus: (&Fields, &FeFunction), minus: (&Fields, &FeFunction)) -> f64 {
        let s = &self.setup;
        let quad = rule(DATA_DEGREE);
        let tv = Tabulation::new(s.velocity.basis(), &quad.points);
        let tw = Tabulation::new(s.vorticity.basis(), &quad.points);
        let mut d = 0.0;
        for c in 0..s.mesh.n_cells() {
            let geom = CellGeom::new(&s.mesh, c);
            for (q, (xi, wt)) in quad.points.iter().zip(&quad.weights).enumerate() {
                let x = geom.map(*xi);
                let wq = wt * geom.det;
                let yd = (s.problem.y_d)(x);
                let wd = (s.problem.omega_d)(x);
                let eval = |f: &Fields| {
                    let y = f.velocity.combine(c, &geom, &tv.values[q], &tv.grads[q]).value;
                    let w = f.vorticity.combine(c, &geom, &tw.values[q], &tw.grads[q]).value[0];
                    (y, w)
                };
                let ((yp, wp), (ym, wm)) = (eval(plus.0), eval(minus.0));
                for i in 0..2 {
                    d += wq * (yp[i] - ym[i]) * (yp[i] + ym[i] - 2.0 * yd[i]);
                }
                d += wq * (wp - wm) * (wp + wm - 2.0 * wd);
            }
        }
        let gamma = s.problem.gamma;
        d += plus
            .1
            .coeffs
            .iter()
            .zip(&minus.1.coeffs)
            .zip(&self.control_mass)
            .map(|((a, b), m)| gamma * m * (a - b) * (a + b))
            .sum::<f64>();
        0.5 * d
    }

    /// Squared tracking errors `(|y - y_d|^2, |omega - omega_d|^2)`.
    pub fn tracking(&self, state: &Fields) -> (f64, f64) {
        let s = &self.setup;
        let quad = rule(DATA_DEGREE);
        let tv = Tabulation::new(s.velocity.basis(), &quad.points);
        let tw = Tabulation::new(s.vorticity.basis(), &quad.points);
        let (mut ey, mut ew) = (0.0, 0.0);
        for c in 0..s.mesh.n_cells() {
            let geom = CellGeom::new(&s.mesh, c);
            for (q, (xi, wt)) in quad.points.iter().zip(&quad.weights).enumerate() {
                let x = geom.map(*xi);
                let wq = wt * geom.det;
                let y = state.velocity.combine(c, &geom, &tv.values[q], &tv.grads[q]).value;
                let w = state.vorticity.combine(c, &geom, &tw.values[q], &tw.grads[q]).value[0];
                let yd = (s.problem.y_d)(x);
                let wd = (s.problem.omega_d)(x);
                ey += wq * ((y[0] - yd[0]).powi(2) + (y[1] - yd[1]).powi(2));
                ew += wq * (w - wd).powi(2);
            }
        }
        (ey, ew)
    }

    /// Cellwise means of the co-state velocity, laid out like the control.
    pub fn costate_means(&self, costate: &Fields) -> Vec<f64> {
        self.control_coupling
            .mul_vec_transpose(&costate.velocity.coeffs)
            .iter()
            .zip(&self.control_mass)
            .map(|(a, m)| a / m)
            .collect()
    }

    /// Reduced gradient `gamma u + P0 w` as coefficients of the L2 dual pairing
    /// `(gamma u + w, lambda)` for piecewise constant `lambda`.
    pub fn reduced_gradient(&self, u: &FeFunction, costate: &Fields) -> Vec<f64> {
        let bw = self.control_coupling.mul_vec_transpose(&costate.velocity.coeffs);
        u.coeffs
            .iter()
            .zip(&self.control_mass)
            .zip(bw)
            .map(|((u, m), b)| self.setup.problem.gamma * m * u + b)
            .collect()
    }

    /// Residual `|A x - b|_inf / max(1, |b|_inf)` of the state solve.
    pub fn state_residual(&self, u: &FeFunction, state: &Fields) -> f64 {
        let b = self.state_rhs(&u.coeffs);
        relative_residual(&self.state_matrix, &self.stack(state), &b)
    }

    /// Residual of the consistent co-state solve.
    pub fn adjoint_residual(&self, state: &Fields, costate: &Fields) -> f64 {
        let b = self.adjoint_rhs(state);
        relative_residual(&self.adjoint_matrix, &self.stack(costate), &b)
    }

    /// Stacks fields into one unknown vector.
    pub fn stack(&self, f: &Fields) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.setup.layout.total());
        x.extend_from_slice(&f.velocity.coeffs);
        x.extend_from_slice(&f.vorticity.coeffs);
        x.extend_from_slice(&f.pressure.coeffs);
        x.push(f.multiplier);
        x
    }

    /// Splits a stacked unknown vector into fields.
    pub fn split(&self, x: Vec<f64>) -> Fields {
        let lay = self.setup.layout;
        let s = &self.setup;
        let part = |space: &Arc<Space>, r: std::ops::Range<usize>| FeFunction {
            space: space.clone(),
            coeffs: x[r].to_vec(),
        };
        Fields {
            velocity: part(&s.velocity, 0..lay.velocity),
            vorticity: part(&s.vorticity, lay.vorticity_offset()..lay.pressure_offset()),
            pressure: part(&s.pressure, lay.pressure_offset()..lay.multiplier()),
            multiplier: x[lay.multiplier()],
        }
    }

    /// Writes the state matrix in `row col value` coordinate format.
    pub fn write_state_matrix<W: Write>(&self, out: W) -> std::io::Result<()> {
        self.state_matrix.write_coordinate(out)
    }

    fn check_control(&self, u: &FeFunction) -> Result<()> {
        if u.space.kind() != SpaceKind::PiecewiseConstVector || u.coeffs.len() != self.setup.control.ndofs() {
            return Err(Error::InvalidArgument(format!(
                "control must be piecewise constant with {} coefficients",
                self.setup.control.ndofs()
            )));
        }
        Ok(())
    }
}

fn relative_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r = ax.iter().zip(b).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    r / crate::linsolve::norm_inf(b).max(1.0)
}

struct Data {
    load: Vec<f64>,
    control_coupling: SparseMatrix,
    mass_velocity: SparseMatrix,
    mass_vorticity: SparseMatrix,
    target_velocity: Vec<f64>,
    target_vorticity: Vec<f64>,
    control_mass: Vec<f64>,
}

fn assemble_data(s: &Setup) -> Data {
    let (vs, ws) = (&s.velocity, &s.vorticity);
    let (nv, nw, nu) = (vs.ndofs(), ws.ndofs(), s.control.ndofs());
    let quad = rule(DATA_DEGREE);
    let tv = Tabulation::new(vs.basis(), &quad.points);
    let tw = Tabulation::new(ws.basis(), &quad.points);
    let mut load = vec![0.0; nv];
    let mut target_velocity = vec![0.0; nv];
    let mut target_vorticity = vec![0.0; nw];
    let mut control_mass = vec![0.0; nu];
    let nvl = vs.n_local();
    let nwl = ws.n_local();
    let mut cc = TripletBuilder::with_capacity(nv, nu, s.mesh.n_cells() * nvl);
    let mut mv = TripletBuilder::with_capacity(nv, nv, s.mesh.n_cells() * nvl * nvl / 2);
    let mut mw = TripletBuilder::with_capacity(nw, nw, s.mesh.n_cells() * nwl * nwl);
    let mut lm = vec![0.0; nvl * nvl];
    let mut lw = vec![0.0; nwl * nwl];
    let mut lc = vec![0.0; nvl];
    for c in 0..s.mesh.n_cells() {
        let geom = CellGeom::new(&s.mesh, c);
        lm.iter_mut().for_each(|v| *v = 0.0);
        lw.iter_mut().for_each(|v| *v = 0.0);
        lc.iter_mut().for_each(|v| *v = 0.0);
        let vd = vs.cell_dofs(c);
        let wd = ws.cell_dofs(c);
        for (q, (xi, wt)) in quad.points.iter().zip(&quad.weights).enumerate() {
            let x = geom.map(*xi);
            let wq = wt * geom.det;
            let v = VectorShapes::new(vs, &geom, &tv.values[q], &tv.grads[q]);
            let w = ScalarShapes::new(ws, &geom, &tw.values[q], &tw.grads[q]);
            let f = (s.problem.f)(x);
            let yd = (s.problem.y_d)(x);
            let od = (s.problem.omega_d)(x);
            for i in 0..v.n {
                let k = v.comp[i];
                load[vd[i]] += wq * f[k] * v.val[i];
                target_velocity[vd[i]] += wq * yd[k] * v.val[i];
                lc[i] += wq * v.val[i];
                for j in 0..v.n {
                    if v.comp[j] == k {
                        lm[i * nvl + j] += wq * v.val[i] * v.val[j];
                    }
                }
            }
            for a in 0..w.n {
                target_vorticity[wd[a]] += wq * od * w.val[a];
                for b in 0..w.n {
                    lw[a * nwl + b] += wq * w.val[a] * w.val[b];
                }
            }
        }
        let ud = s.control.cell_dofs(c);
        for i in 0..nvl {
            // velocity local dof i has component i % 2, matching control dof ud[i % 2]
            if !s.fixed[vd[i]] {
                cc.add(vd[i], ud[i % 2], lc[i]);
            }
            for j in 0..nvl {
                mv.add(vd[i], vd[j], lm[i * nvl + j]);
            }
        }
        for a in 0..nwl {
            for b in 0..nwl {
                mw.add(wd[a], wd[b], lw[a * nwl + b]);
            }
        }
        let area = s.mesh.area(c);
        control_mass[ud[0]] = area;
        control_mass[ud[1]] = area;
    }
    for (i, &f) in s.velocity.dirichlet_mask().iter().enumerate() {
        if f {
            load[i] = 0.0;
        }
    }
    Data {
        load,
        control_coupling: cc.build(),
        mass_velocity: mv.build(),
        mass_vorticity: mw.build(),
        target_velocity,
        target_vorticity,
        control_mass,
    }
}
