//! Norms, jump seminorms, errors against exact solutions and Gram matrices.

use crate::assembly::{ScalarShapes, VectorShapes};
use crate::dg::{edge_quadrature, EdgeStabilization};
use crate::fem::{rule, CellGeom, FeFunction, Space, Tabulation};
use crate::linsolve::{SparseMatrix, TripletBuilder};
use crate::mesh::Point;
use crate::problems::ExactFields;
use crate::scheme::{Discretization, Fields, SchemeKind};

/// Quadrature degree for errors against non-polynomial exact fields.
pub const ERROR_DEGREE: usize = 10;

/// Kahan-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Sums `values` in order with compensation.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = CompensatedSum::default();
    values.into_iter().for_each(|v| s.add(v));
    s.value()
}

/// `curl v = d v2/dx - d v1/dy` from a gradient `g[i][j] = d v_i / d x_j`.
pub fn curl(g: [[f64; 2]; 2]) -> f64 {
    g[1][0] - g[0][1]
}

/// `div v` from a gradient.
pub fn div(g: [[f64; 2]; 2]) -> f64 {
    g[0][0] + g[1][1]
}

/// Vector curl of a scalar: `(d w/dy, -d w/dx)`.
pub fn curl_scalar(g: [f64; 2]) -> [f64; 2] {
    [g[1], -g[0]]
}

/// Value and gradient of `f` at physical point `x` inside cell `c`.
pub(crate) fn eval_at(f: &FeFunction, c: usize, geom: &CellGeom, x: Point) -> crate::fem::PointValue {
    let (v, g) = f.space.basis().eval(geom.inverse_map(x));
    f.combine(c, geom, &v, &g)
}

/// Integrates `g(cell, x, weight)` contributions over all cells.
fn integrate_cells(space: &Space, degree: usize, mut g: impl FnMut(usize, &CellGeom, Point, usize, f64)) {
    let quad = rule(degree);
    let mesh = space.mesh();
    for c in 0..mesh.n_cells() {
        let geom = CellGeom::new(mesh, c);
        for (q, (xi, w)) in quad.points.iter().zip(&quad.weights).enumerate() {
            g(c, &geom, geom.map(*xi), q, w * geom.det);
        }
    }
}

/// `||f||_0`, summing both components for vector fields.
pub fn l2_norm(f: &FeFunction) -> f64 {
    l2_error(f, |_| [0.0; 2])
}

/// `||exact - f||_0`.
pub fn l2_error(f: &FeFunction, exact: impl Fn(Point) -> [f64; 2]) -> f64 {
    let quad = rule(ERROR_DEGREE);
    let tab = Tabulation::new(f.space.basis(), &quad.points);
    let nc = f.space.ncomp();
    let mut s = CompensatedSum::default();
    integrate_cells(&f.space, ERROR_DEGREE, |c, geom, x, q, w| {
        let v = f.combine(c, geom, &tab.values[q], &tab.grads[q]).value;
        let e = exact(x);
        s.add(w * (0..nc).map(|k| (e[k] - v[k]).powi(2)).sum::<f64>());
    });
    s.value().sqrt()
}

/// `|||v|||_1^2 = ||v||^2 + ||curl v||^2 + ||div v||^2`, broken over cells.
pub fn triple_norm(v: &FeFunction) -> f64 {
    triple_error(v, |_| ([0.0; 2], [[0.0; 2]; 2]))
}

/// `|||exact - v|||_1` with `exact` returning value and gradient.
pub fn triple_error(v: &FeFunction, exact: impl Fn(Point) -> ([f64; 2], [[f64; 2]; 2])) -> f64 {
    let quad = rule(ERROR_DEGREE);
    let tab = Tabulation::new(v.space.basis(), &quad.points);
    let mut s = CompensatedSum::default();
    integrate_cells(&v.space, ERROR_DEGREE, |c, geom, x, q, w| {
        let h = v.combine(c, geom, &tab.values[q], &tab.grads[q]);
        let (ev, eg) = exact(x);
        let d = [ev[0] - h.value[0], ev[1] - h.value[1]];
        let mut g = eg;
        for i in 0..2 {
            for j in 0..2 {
                g[i][j] -= h.grad[i][j];
            }
        }
        s.add(w * (d[0] * d[0] + d[1] * d[1] + curl(g).powi(2) + div(g).powi(2)));
    });
    s.value().sqrt()
}

/// `|exact - v|_j^2 = sum_E int_E C11 [[e]]_T^2 + A11 [[e]]_N^2` over all edges,
/// with boundary jumps equal to the trace.
pub fn velocity_jump_sq(v: &FeFunction, stab: &EdgeStabilization, exact: impl Fn(Point) -> [f64; 2]) -> f64 {
    let mesh = v.space.mesh();
    let degree = 2 * v.space.basis().degree() + 2;
    let mut s = CompensatedSum::default();
    for (e, edge) in mesh.edges().iter().enumerate() {
        let n = mesh.edge_normal(e);
        let sides = if edge.boundary { 1 } else { 2 };
        let geoms = edge.cells.map(|c| CellGeom::new(mesh, c));
        for (x, w) in edge_quadrature(mesh, e, degree) {
            let ex = exact(x);
            let (mut jt, mut jn) = (0.0, 0.0);
            for k in 0..sides {
                let h = eval_at(v, edge.cells[k], &geoms[k], x).value;
                let d = [ex[0] - h[0], ex[1] - h[1]];
                let sgn = if k == 0 { 1.0 } else { -1.0 };
                jt += sgn * (d[0] * n[1] - d[1] * n[0]);
                jn += sgn * (d[0] * n[0] + d[1] * n[1]);
            }
            s.add(w * (stab.c11[e] * jt * jt + stab.a11[e] * jn * jn));
        }
    }
    s.value()
}

/// `|exact - p|_j^2 = sum_E int_E D11 [[e]]^2` over all edges.
pub fn scalar_jump_sq(p: &FeFunction, stab: &EdgeStabilization, exact: impl Fn(Point) -> f64) -> f64 {
    let mesh = p.space.mesh();
    let degree = 2 * p.space.basis().degree() + 2;
    let mut s = CompensatedSum::default();
    for (e, edge) in mesh.edges().iter().enumerate() {
        let sides = if edge.boundary { 1 } else { 2 };
        let geoms = edge.cells.map(|c| CellGeom::new(mesh, c));
        for (x, w) in edge_quadrature(mesh, e, degree) {
            let ex = exact(x);
            let mut j = 0.0;
            for k in 0..sides {
                let h = eval_at(p, edge.cells[k], &geoms[k], x).value[0];
                j += if k == 0 { ex - h } else { h - ex };
            }
            s.add(w * stab.d11[e] * j * j);
        }
    }
    s.value()
}

/// DG norms `(|||v|||_{1,h}, ||p||_h)`.
pub fn dg_norms(v: &FeFunction, p: &FeFunction, stab: &EdgeStabilization) -> (f64, f64) {
    let vj = velocity_jump_sq(v, stab, |_| [0.0; 2]);
    let pj = scalar_jump_sq(p, stab, |_| 0.0);
    ((triple_norm(v).powi(2) + vj).sqrt(), (l2_norm(p).powi(2) + pj).sqrt())
}

/// Errors of a discrete optimal solution against the exact one.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorReport {
    pub err_u: f64,
    /// `|||y - y_h|||_1`, or its DG counterpart with jumps.
    pub err_y_triple: f64,
    pub err_w_triple: f64,
    pub err_omega: f64,
    pub err_theta: f64,
    /// `||p - p_h||_0`, or `||p - p_h||_h` for DG.
    pub err_p: f64,
    pub err_q: f64,
}

impl ErrorReport {
    /// Total error combining every variable in the energy norms.
    pub fn total(&self) -> f64 {
        [self.err_u, self.err_y_triple, self.err_omega, self.err_p, self.err_w_triple, self.err_theta, self.err_q]
            .iter()
            .map(|e| e * e)
            .sum::<f64>()
            .sqrt()
    }
}

/// Domain means of the exact pressures, so that errors compare zero-mean fields.
fn exact_pressure_means(disc: &Discretization, exact: &dyn Fn(Point) -> ExactFields) -> (f64, f64) {
    let (mut p, mut q, mut area) = (CompensatedSum::default(), CompensatedSum::default(), 0.0);
    integrate_cells(disc.pressure_space(), ERROR_DEGREE, |_, _, x, _, w| {
        let e = exact(x);
        p.add(w * e.p);
        q.add(w * e.q);
        area += w;
    });
    (p.value() / area, q.value() / area)
}

/// Errors against the exact solution, when the problem has one.
pub fn errors(disc: &Discretization, state: &Fields, costate: &Fields, u: &FeFunction) -> Option<ErrorReport> {
    let problem = disc.problem();
    let exact = problem.exact.clone()?;
    let (pm, qm) = exact_pressure_means(disc, exact.as_ref());
    let err_u = l2_error(u, |x| problem.exact_control(x).unwrap_or([0.0; 2]));
    let mut r = ErrorReport {
        err_u,
        err_y_triple: triple_error(&state.velocity, |x| {
            let e = exact(x);
            (e.y, e.grad_y)
        }),
        err_w_triple: triple_error(&costate.velocity, |x| {
            let e = exact(x);
            (e.w, e.grad_w)
        }),
        err_omega: l2_error(&state.vorticity, |x| [exact(x).omega, 0.0]),
        err_theta: l2_error(&costate.vorticity, |x| [exact(x).theta, 0.0]),
        err_p: l2_error(&state.pressure, |x| [exact(x).p - pm, 0.0]),
        err_q: l2_error(&costate.pressure, |x| [exact(x).q - qm, 0.0]),
    };
    if disc.params().kind == SchemeKind::Dg {
        let p = disc.params();
        let stab = EdgeStabilization::new(disc.mesh(), p.a11, p.c11, p.d11);
        let add = |a: f64, b: f64| (a * a + b).sqrt();
        r.err_y_triple = add(r.err_y_triple, velocity_jump_sq(&state.velocity, &stab, |x| exact(x).y));
        r.err_w_triple = add(r.err_w_triple, velocity_jump_sq(&costate.velocity, &stab, |x| exact(x).w));
        r.err_p = add(r.err_p, scalar_jump_sq(&state.pressure, &stab, |x| exact(x).p - pm));
        r.err_q = add(r.err_q, scalar_jump_sq(&costate.pressure, &stab, |x| exact(x).q - qm));
    }
    Some(r)
}

/// Gram matrix of `||(v, theta)||^2` (with jump terms for DG) over the
/// stacked `[velocity | vorticity]` unknowns, boundary rows included.
pub fn velocity_vorticity_gram(disc: &Discretization) -> SparseMatrix {
    let vs = disc.velocity_space();
    let ws = disc.vorticity_space();
    let (nv, nw) = (vs.ndofs(), ws.ndofs());
    let mesh = disc.mesh();
    let mut tb = TripletBuilder::new(nv + nw, nv + nw);
    let quad = rule(2 * vs.basis().degree().max(1));
    let tv = Tabulation::new(vs.basis(), &quad.points);
    let tw = Tabulation::new(ws.basis(), &quad.points);
    for c in 0..mesh.n_cells() {
        let geom = CellGeom::new(mesh, c);
        let vd = vs.cell_dofs(c);
        let wd = ws.cell_dofs(c);
        for (q, w) in quad.weights.iter().enumerate() {
            let wq = w * geom.det;
            let v = VectorShapes::new(vs, &geom, &tv.values[q], &tv.grads[q]);
            let t = ScalarShapes::new(ws, &geom, &tw.values[q], &tw.grads[q]);
            for i in 0..v.n {
                for j in 0..v.n {
                    let m = if v.comp[i] == v.comp[j] { v.val[i] * v.val[j] } else { 0.0 };
                    tb.add(vd[i], vd[j], wq * (m + v.curl[i] * v.curl[j] + v.div[i] * v.div[j]));
                }
            }
            for a in 0..t.n {
                for b in 0..t.n {
                    tb.add(nv + wd[a], nv + wd[b], wq * t.val[a] * t.val[b]);
                }
            }
        }
    }
    if disc.params().kind == SchemeKind::Dg {
        let p = disc.params();
        let stab = EdgeStabilization::new(mesh, p.a11, p.c11, p.d11);
        for (e, edge) in mesh.edges().iter().enumerate() {
            let n = mesh.edge_normal(e);
            let sides = if edge.boundary { 1 } else { 2 };
            let geoms = edge.cells.map(|c| CellGeom::new(mesh, c));
            for (x, w) in edge_quadrature(mesh, e, 2 * vs.basis().degree() + 2) {
                let sh: Vec<VectorShapes> =
                    (0..sides).map(|k| crate::dg::vector_shapes_at(vs, &geoms[k], x)).collect();
                for si in 0..sides {
                    for i in 0..sh[si].n {
                        let sgi = if si == 0 { 1.0 } else { -1.0 };
                        let (ti, ni) = (sgi * sh[si].cross_n(i, n), sgi * sh[si].dot_n(i, n));
                        for sj in 0..sides {
                            for j in 0..sh[sj].n {
                                let sgj = if sj == 0 { 1.0 } else { -1.0 };
                                let (tj, nj) = (sgj * sh[sj].cross_n(j, n), sgj * sh[sj].dot_n(j, n));
                                let val = w * (stab.c11[e] * ti * tj + stab.a11[e] * ni * nj);
                                tb.add(vs.cell_dofs(edge.cells[si])[i], vs.cell_dofs(edge.cells[sj])[j], val);
                            }
                        }
                    }
                }
            }
        }
    }
    tb.build()
}

/// Gram matrix of `||phi||_0^2` (plus the pressure jump seminorm for DG).
pub fn pressure_gram(disc: &Discretization) -> SparseMatrix {
    let ps = disc.pressure_space();
    let mesh = disc.mesh();
    let np = ps.ndofs();
    let mut tb = TripletBuilder::new(np, np);
    let quad = rule(2 * ps.basis().degree().max(1));
    let tp = Tabulation::new(ps.basis(), &quad.points);
    for c in 0..mesh.n_cells() {
        let geom = CellGeom::new(mesh, c);
        let pd = ps.cell_dofs(c);
        for (q, w) in quad.weights.iter().enumerate() {
            let wq = w * geom.det;
            let s = ScalarShapes::new(ps, &geom, &tp.values[q], &tp.grads[q]);
            for a in 0..s.n {
                for b in 0..s.n {
                    tb.add(pd[a], pd[b], wq * s.val[a] * s.val[b]);
                }
            }
        }
    }
    if disc.params().kind == SchemeKind::Dg {
        let p = disc.params();
        let stab = EdgeStabilization::new(mesh, p.a11, p.c11, p.d11);
        for (e, edge) in mesh.edges().iter().enumerate() {
            let sides = if edge.boundary { 1 } else { 2 };
            let geoms = edge.cells.map(|c| CellGeom::new(mesh, c));
            for (x, w) in edge_quadrature(mesh, e, 2 * ps.basis().degree() + 2) {
                let sh: Vec<ScalarShapes> =
                    (0..sides).map(|k| crate::dg::scalar_shapes_at(ps, &geoms[k], x)).collect();
                for si in 0..sides {
                    for a in 0..sh[si].n {
                        for sj in 0..sides {
                            for b in 0..sh[sj].n {
                                let sg = if si == sj { 1.0 } else { -1.0 };
                                let val = w * stab.d11[e] * sg * sh[si].val[a] * sh[sj].val[b];
                                tb.add(ps.cell_dofs(edge.cells[si])[a], ps.cell_dofs(edge.cells[sj])[b], val);
                            }
                        }
                    }
                }
            }
        }
    }
    tb.build()
}
