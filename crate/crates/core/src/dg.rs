//! Discontinuous Galerkin scheme: broken volume integrals plus jump and
//! average couplings, penalties and upwind transport fluxes on edges.

use crate::assembly::{LocalMatrix, ScalarShapes, VectorShapes};
use crate::cg::{volume_terms, Transport};
use crate::fem::{CellGeom, Space};
use crate::linsolve::SparseMatrix;
use crate::mesh::{Mesh, Point};
use crate::quadrature::interval_rule;
use crate::scheme::Setup;

/// Per-edge penalty parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeStabilization {
    /// Normal velocity jump penalty, scaling like 1/h.
    pub a11: Vec<f64>,
    /// Tangential velocity jump penalty, scaling like 1/h.
    pub c11: Vec<f64>,
    /// Pressure jump penalty, scaling like h.
    pub d11: Vec<f64>,
}

impl EdgeStabilization {
    /// Interior edges use the smaller neighbour diameter for the 1/h penalties
    /// and the larger one for the pressure penalty; boundary edges use their
    /// own cell.
    pub fn new(mesh: &Mesh, a11: f64, c11: f64, d11: f64) -> Self {
        let ne = mesh.n_edges();
        let mut out = EdgeStabilization { a11: vec![0.0; ne], c11: vec![0.0; ne], d11: vec![0.0; ne] };
        for (e, edge) in mesh.edges().iter().enumerate() {
            let h0 = mesh.diameter(edge.cells[0]);
            let h1 = mesh.diameter(edge.cells[1]);
            let (hmin, hmax) = (h0.min(h1), h0.max(h1));
            out.a11[e] = a11 / hmin;
            out.c11[e] = c11 / hmin;
            out.d11[e] = d11 * hmax;
        }
        out
    }
}

/// Quadrature points and weights (scaled by the length) of edge `e`.
pub(crate) fn edge_quadrature(mesh: &Mesh, e: usize, degree: usize) -> Vec<(Point, f64)> {
    let rule = interval_rule(degree).expect("internal quadrature degree");
    let [a, b] = mesh.edges()[e].vertices.map(|v| mesh.vertices()[v]);
    let len = mesh.edge_length(e);
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(t, w)| ([a[0] + t[0] * (b[0] - a[0]), a[1] + t[0] * (b[1] - a[1])], w * len))
        .collect()
}

/// Shape functions of a vector space at a physical point of cell geometry `g`.
pub(crate) fn vector_shapes_at(space: &Space, g: &CellGeom, x: Point) -> VectorShapes {
    let (v, d) = space.basis().eval(g.inverse_map(x));
    VectorShapes::new(space, g, &v, &d)
}

/// Shape functions of a scalar space at a physical point of cell geometry `g`.
pub(crate) fn scalar_shapes_at(space: &Space, g: &CellGeom, x: Point) -> ScalarShapes {
    let (v, d) = space.basis().eval(g.inverse_map(x));
    ScalarShapes::new(space, g, &v, &d)
}

/// Assembles the state and co-state DG matrices.
pub(crate) fn assemble(s: &Setup) -> (SparseMatrix, SparseMatrix) {
    let (mut st, mut ad) = volume_terms(s, Transport::Integrated);
    let mesh = &s.mesh;
    let p = &s.params;
    let stab = EdgeStabilization::new(mesh, p.a11, p.c11, p.d11);
    let (vs, ws, ps) = (&s.velocity, &s.vorticity, &s.pressure);
    let (nvl, nwl, npl) = (vs.n_local(), ws.n_local(), ps.n_local());
    let nl = nvl + nwl + npl;
    let lay = s.layout;
    let mut ls = LocalMatrix::new(2 * nl);
    let mut la = LocalMatrix::new(2 * nl);
    let mut dofs = vec![0usize; 2 * nl];
    let sign = [1.0, -1.0];

    for (e, edge) in mesh.edges().iter().enumerate() {
        let sides = if edge.boundary { 1 } else { 2 };
        let avg = if edge.boundary { 1.0 } else { 0.5 };
        let n = mesh.edge_normal(e);
        let geoms = edge.cells.map(|c| CellGeom::new(mesh, c));
        let (a11, c11, d11) = (stab.a11[e], stab.c11[e], stab.d11[e]);
        let pressure_penalty = !edge.boundary || p.boundary_pressure_penalty;
        ls.clear();
        la.clear();
        for (x, wq) in edge_quadrature(mesh, e, s.edge_degree()) {
            let nu = (s.problem.nu)(x).0;
            let bn = {
                let b = (s.problem.beta)(x).0;
                b[0] * n[0] + b[1] * n[1]
            };
            let v: Vec<VectorShapes> = (0..sides).map(|k| vector_shapes_at(vs, &geoms[k], x)).collect();
            let w: Vec<ScalarShapes> = (0..sides).map(|k| scalar_shapes_at(ws, &geoms[k], x)).collect();
            let q: Vec<ScalarShapes> = (0..sides).map(|k| scalar_shapes_at(ps, &geoms[k], x)).collect();
            let vel = |k: usize, i: usize| k * nl + i;
            let vort = |k: usize, a: usize| k * nl + nvl + a;
            let pres = |k: usize, a: usize| k * nl + nvl + nwl + a;

            for si in 0..sides {
                for i in 0..v[si].n {
                    let jt_i = sign[si] * v[si].cross_n(i, n);
                    let jn_i = sign[si] * v[si].dot_n(i, n);
                    for sj in 0..sides {
                        for b in 0..w[sj].n {
                            let c = wq * avg * w[sj].val[b] * nu * jt_i;
                            ls.add(vel(si, i), vort(sj, b), c);
                            la.add(vel(si, i), vort(sj, b), c);
                            ls.add(vort(sj, b), vel(si, i), -c);
                            la.add(vort(sj, b), vel(si, i), -c);
                        }
                        for j in 0..v[sj].n {
                            let jt_j = sign[sj] * v[sj].cross_n(j, n);
                            let jn_j = sign[sj] * v[sj].dot_n(j, n);
                            let c = wq * (c11 * nu * jt_j * jt_i + a11 * jn_j * jn_i);
                            ls.add(vel(si, i), vel(sj, j), c);
                            la.add(vel(si, i), vel(sj, j), c);
                        }
                        for a in 0..q[sj].n {
                            let c = wq * avg * q[sj].val[a] * jn_i;
                            ls.add(vel(si, i), pres(sj, a), c);
                            la.add(vel(si, i), pres(sj, a), -c);
                            ls.add(pres(sj, a), vel(si, i), c);
                            la.add(pres(sj, a), vel(si, i), c);
                        }
                    }
                }
            }

            if pressure_penalty {
                for si in 0..sides {
                    for a in 0..q[si].n {
                        for sj in 0..sides {
                            for b in 0..q[sj].n {
                                let c = wq * d11 * sign[si] * q[si].val[a] * sign[sj] * q[sj].val[b];
                                ls.add(pres(si, a), pres(sj, b), -c);
                                la.add(pres(si, a), pres(sj, b), c);
                            }
                        }
                    }
                }
            }

            // upwind flux: the inflow trace is the upwind cell's, zero on the boundary
            let up = if bn >= 0.0 { 0 } else { 1 };
            if up < sides {
                let flux = bn.abs();
                for rho in 0..sides {
                    let test_sign = if rho == up { 1.0 } else { -1.0 };
                    for i in 0..v[rho].n {
                        for j in 0..v[up].n {
                            if v[rho].comp[i] != v[up].comp[j] {
                                continue;
                            }
                            let c = wq * flux * v[up].val[j] * test_sign * v[rho].val[i];
                            ls.add(vel(rho, i), vel(up, j), c);
                            la.add(vel(up, j), vel(rho, i), c);
                        }
                    }
                }
            }
        }
        for k in 0..sides {
            let c = edge.cells[k];
            let base = k * nl;
            dofs[base..base + nvl].copy_from_slice(vs.cell_dofs(c));
            for (d, &g) in dofs[base + nvl..base + nvl + nwl].iter_mut().zip(ws.cell_dofs(c)) {
                *d = lay.vorticity_offset() + g;
            }
            for (d, &g) in dofs[base + nvl + nwl..base + nl].iter_mut().zip(ps.cell_dofs(c)) {
                *d = lay.pressure_offset() + g;
            }
        }
        ls.scatter(&dofs[..sides * nl], &mut st);
        la.scatter(&dofs[..sides * nl], &mut ad);
    }
    (st.build(), ad.build())
}
