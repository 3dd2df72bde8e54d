//! Conforming augmented mixed scheme: MINI velocity, continuous (or broken)
//! linear vorticity and continuous linear pressure. The cell integrals are
//! shared with the DG scheme.

use crate::assembly::{LocalMatrix, ScalarShapes, SystemBuilder, VectorShapes};
use crate::fem::{rule, CellGeom, Tabulation, MAX_BASIS};
use crate::linsolve::SparseMatrix;
use crate::scheme::Setup;

/// How the transport term enters the volume integrals.
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Transport {
    /// `(sigma y + (beta . grad) y, v)`; the co-state uses its formal adjoint.
    Direct,
    /// `((sigma - div beta) y, v) - (y, (beta . grad) v)`, completed by edge
    /// fluxes; the co-state block is the exact transpose.
    Integrated,
}

/// Assembles the state and co-state saddle point matrices.
pub(crate) fn assemble(s: &Setup) -> (SparseMatrix, SparseMatrix) {
    let (st, ad) = volume_terms(s, Transport::Direct);
    (st.build(), ad.build())
}

/// Cell integrals of both saddle point operators plus the pressure mean
/// constraint. Broken spaces give the volume part of the DG operators.
pub(crate) fn volume_terms(s: &Setup, transport: Transport) -> (SystemBuilder, SystemBuilder) {
    let (vs, ws, ps) = (&s.velocity, &s.vorticity, &s.pressure);
    let lay = s.layout;
    let n = lay.total();
    let (rho1, rho2) = (s.params.rho1, s.params.rho2);
    let quad = rule(s.volume_degree());
    let tv = Tabulation::new(vs.basis(), &quad.points);
    let tw = Tabulation::new(ws.basis(), &quad.points);
    let tp = Tabulation::new(ps.basis(), &quad.points);
    let (nvl, nwl, npl) = (vs.n_local(), ws.n_local(), ps.n_local());
    let nl = nvl + nwl + npl;
    let cap = s.mesh.n_cells() * nl * nl;
    let mut st = SystemBuilder::new(n, s.fixed.clone(), cap);
    let mut ad = SystemBuilder::new(n, s.fixed.clone(), cap);
    let mut ls = LocalMatrix::new(nl);
    let mut la = LocalMatrix::new(nl);
    let mut dofs = vec![0usize; nl];
    let prob = &s.problem;

    for c in 0..s.mesh.n_cells() {
        let geom = CellGeom::new(&s.mesh, c);
        ls.clear();
        la.clear();
        let mut mean = [0.0; MAX_BASIS];
        for (q, (xi, wt)) in quad.points.iter().zip(&quad.weights).enumerate() {
            let x = geom.map(*xi);
            let wq = wt * geom.det;
            let (nu, gnu) = (prob.nu)(x);
            let sigma = (prob.sigma)(x);
            let (beta, divb) = (prob.beta)(x);
            let v = VectorShapes::new(vs, &geom, &tv.values[q], &tv.grads[q]);
            let w = ScalarShapes::new(ws, &geom, &tw.values[q], &tw.grads[q]);
            let p = ScalarShapes::new(ps, &geom, &tp.values[q], &tp.grads[q]);
            for i in 0..v.n {
                let (ki, phi) = (v.comp[i], v.val[i]);
                let cross = if ki == 0 { -gnu[1] * phi } else { gnu[0] * phi };
                for j in 0..v.n {
                    let (kj, gj) = (v.comp[j], v.grad[j]);
                    let same = ki == kj;
                    let mut visc = gj[ki] * gnu[kj];
                    if same {
                        visc += gj[0] * gnu[0] + gj[1] * gnu[1];
                    }
                    let common = -visc * phi + rho1 * v.curl[j] * v.curl[i] + rho2 * v.div[j] * v.div[i];
                    let (mut ts, mut ta) = (0.0, 0.0);
                    if same {
                        let bgj = beta[0] * gj[0] + beta[1] * gj[1];
                        let gi = v.grad[i];
                        let bgi = beta[0] * gi[0] + beta[1] * gi[1];
                        match transport {
                            Transport::Direct => {
                                ts = (sigma * v.val[j] + bgj) * phi;
                                ta = ((sigma - divb) * v.val[j] - bgj) * phi;
                            }
                            Transport::Integrated => {
                                ts = (sigma - divb) * v.val[j] * phi - v.val[j] * bgi;
                                ta = (sigma - divb) * v.val[j] * phi - phi * bgj;
                            }
                        }
                    }
                    ls.add(i, j, wq * (common + ts));
                    la.add(i, j, wq * (common + ta));
                }
                for a in 0..w.n {
                    let vw = wq * ((nu - rho1) * w.val[a] * v.curl[i] + w.val[a] * cross);
                    let wv = -wq * nu * w.val[a] * v.curl[i];
                    ls.add(i, nvl + a, vw);
                    la.add(i, nvl + a, vw);
                    ls.add(nvl + a, i, wv);
                    la.add(nvl + a, i, wv);
                }
                for a in 0..p.n {
                    let b = -wq * p.val[a] * v.div[i];
                    ls.add(i, nvl + nwl + a, b);
                    la.add(i, nvl + nwl + a, -b);
                    ls.add(nvl + nwl + a, i, b);
                    la.add(nvl + nwl + a, i, b);
                }
            }
            for a in 0..w.n {
                for b in 0..w.n {
                    let m = wq * nu * w.val[a] * w.val[b];
                    ls.add(nvl + a, nvl + b, m);
                    la.add(nvl + a, nvl + b, m);
                }
            }
            for a in 0..p.n {
                mean[a] += wq * p.val[a];
            }
        }
        dofs[..nvl].copy_from_slice(vs.cell_dofs(c));
        for (d, &g) in dofs[nvl..nvl + nwl].iter_mut().zip(ws.cell_dofs(c)) {
            *d = lay.vorticity_offset() + g;
        }
        for (d, &g) in dofs[nvl + nwl..].iter_mut().zip(ps.cell_dofs(c)) {
            *d = lay.pressure_offset() + g;
        }
        ls.scatter(&dofs, &mut st);
        la.scatter(&dofs, &mut ad);
        for (a, &m) in mean.iter().enumerate().take(npl) {
            let g = dofs[nvl + nwl + a];
            for b in [&mut st, &mut ad] {
                b.add(g, lay.multiplier(), m);
                b.add(lay.multiplier(), g, m);
            }
        }
    }
    (st, ad)
}
