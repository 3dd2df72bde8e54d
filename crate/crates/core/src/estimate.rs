//! Residual-based a posteriori error indicators.

use std::io::Write;

use crate::dg::{edge_quadrature, EdgeStabilization};
use crate::fem::{rule, solve_small, Basis, CellGeom, PointValue, Tabulation};
use crate::norms::{curl, div, eval_at, CompensatedSum};
use crate::optctl::Solution;
use crate::scheme::{Discretization, SchemeKind};

/// Per-cell squared indicators.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalIndicators {
    pub scheme: SchemeKind,
    pub eta_y_sq: Vec<f64>,
    pub eta_w_sq: Vec<f64>,
    pub eta_u_sq: Vec<f64>,
    /// Data oscillation of the state equations (zero for CG).
    pub theta_y_sq: Vec<f64>,
    /// Data oscillation of the co-state equations (zero for CG).
    pub theta_w_sq: Vec<f64>,
}

/// Global estimator values.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GlobalEstimate {
    pub eta_y: f64,
    pub eta_w: f64,
    pub eta_u: f64,
    pub eta_total: f64,
    pub theta_total: f64,
}

impl LocalIndicators {
    fn zeros(scheme: SchemeKind, n: usize) -> Self {
        LocalIndicators {
            scheme,
            eta_y_sq: vec![0.0; n],
            eta_w_sq: vec![0.0; n],
            eta_u_sq: vec![0.0; n],
            theta_y_sq: vec![0.0; n],
            theta_w_sq: vec![0.0; n],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.eta_y_sq.len()
    }

    /// `eta_y^2 + eta_w^2 + eta_u^2` per cell.
    pub fn cell_totals(&self) -> Vec<f64> {
        (0..self.n_cells()).map(|c| self.eta_y_sq[c] + self.eta_w_sq[c] + self.eta_u_sq[c]).collect()
    }

    /// Square roots of compensated sums taken in cell order.
    pub fn global(&self) -> GlobalEstimate {
        let sum = |v: &[f64]| crate::norms::compensated_sum(v.iter().copied());
        let (y, w, u) = (sum(&self.eta_y_sq), sum(&self.eta_w_sq), sum(&self.eta_u_sq));
        let theta = sum(&self.theta_y_sq) + sum(&self.theta_w_sq);
        GlobalEstimate {
            eta_y: y.sqrt(),
            eta_w: w.sqrt(),
            eta_u: u.sqrt(),
            eta_total: (y + w + u).sqrt(),
            theta_total: theta.sqrt(),
        }
    }

    /// Writes CSV `cell_id,eta_y_sq,eta_w_sq,eta_u_sq`.
    pub fn write_heatmap<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "cell_id,eta_y_sq,eta_w_sq,eta_u_sq")?;
        for c in 0..self.n_cells() {
            writeln!(out, "{c},{:e},{:e},{:e}", self.eta_y_sq[c], self.eta_w_sq[c], self.eta_u_sq[c])?;
        }
        Ok(())
    }
}

/// Estimator divided by the true total error.
pub fn efficiency_index(eta_total: f64, true_error: f64) -> Option<f64> {
    (true_error > 0.0).then(|| eta_total / true_error)
}

/// Strong residuals of the state and co-state equations at one point.
struct PointResiduals {
    momentum_y: [f64; 2],
    constitutive_y: f64,
    divergence_y: f64,
    momentum_w: [f64; 2],
    constitutive_w: f64,
    divergence_w: f64,
    control: [f64; 2],
}

/// Values needed by the residuals at a point.
struct PointData {
    u: [f64; 2],
    y: PointValue,
    omega: PointValue,
    p: PointValue,
    w: PointValue,
    theta: PointValue,
    q: PointValue,
}

/// Coefficient samples, exact or projected.
#[derive(Clone, Copy, Default)]
struct Coeffs {
    nu: f64,
    grad_nu: [f64; 2],
    beta: [f64; 2],
    div_beta: f64,
    sigma: f64,
    f: [f64; 2],
    y_d: [f64; 2],
    omega_d: f64,
}

impl Coeffs {
    const LEN: usize = 12;

    fn sample(disc: &Discretization, x: [f64; 2]) -> Self {
        let p = disc.problem();
        let (nu, grad_nu) = (p.nu)(x);
        let (beta, div_beta) = (p.beta)(x);
        Coeffs { nu, grad_nu, beta, div_beta, sigma: (p.sigma)(x), f: (p.f)(x), y_d: (p.y_d)(x), omega_d: (p.omega_d)(x) }
    }

    fn to_array(self) -> [f64; Self::LEN] {
        [
            self.nu,
            self.grad_nu[0],
            self.grad_nu[1],
            self.beta[0],
            self.beta[1],
            self.div_beta,
            self.sigma,
            self.f[0],
            self.f[1],
            self.y_d[0],
            self.y_d[1],
            self.omega_d,
        ]
    }

    fn from_array(a: &[f64]) -> Self {
        Coeffs {
            nu: a[0],
            grad_nu: [a[1], a[2]],
            beta: [a[3], a[4]],
            div_beta: a[5],
            sigma: a[6],
            f: [a[7], a[8]],
            y_d: [a[9], a[10]],
            omega_d: a[11],
        }
    }
}

/// `2 eps(v) grad nu`, i.e. `(grad v + grad v^T) grad nu`.
fn two_eps_dot(g: [[f64; 2]; 2], gnu: [f64; 2]) -> [f64; 2] {
    let mut r = [0.0; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i] += (g[i][j] + g[j][i]) * gnu[j];
        }
    }
    r
}

fn convect(beta: [f64; 2], g: [[f64; 2]; 2]) -> [f64; 2] {
    [beta[0] * g[0][0] + beta[1] * g[0][1], beta[0] * g[1][0] + beta[1] * g[1][1]]
}

fn residuals(d: &PointData, k: &Coeffs, gamma: f64) -> PointResiduals {
    let (y, w) = (d.y.value, d.w.value);
    let ey = two_eps_dot(d.y.grad, k.grad_nu);
    let ew = two_eps_dot(d.w.grad, k.grad_nu);
    let curl_omega = [d.omega.grad[0][1], -d.omega.grad[0][0]];
    let curl_theta = [d.theta.grad[0][1], -d.theta.grad[0][0]];
    let by = convect(k.beta, d.y.grad);
    let bw = convect(k.beta, d.w.grad);
    let gp = d.p.grad[0];
    let gq = d.q.grad[0];
    let mut my = [0.0; 2];
    let mut mw = [0.0; 2];
    for i in 0..2 {
        my[i] = k.f[i] + d.u[i] + ey[i] - k.nu * curl_omega[i] - by[i] - k.sigma * y[i] - gp[i];
        mw[i] = y[i] - k.y_d[i] + ew[i] - k.nu * curl_theta[i] + bw[i] + k.div_beta * w[i] - k.sigma * w[i] + gq[i];
    }
    PointResiduals {
        momentum_y: my,
        constitutive_y: d.omega.value[0] - curl(d.y.grad),
        divergence_y: div(d.y.grad),
        momentum_w: mw,
        constitutive_w: d.theta.value[0] - curl(d.w.grad) - (d.omega.value[0] - k.omega_d) / k.nu,
        divergence_w: div(d.w.grad),
        control: [w[0] + gamma * d.u[0], w[1] + gamma * d.u[1]],
    }
}

fn sq(v: [f64; 2]) -> f64 {
    v[0] * v[0] + v[1] * v[1]
}

/// Local indicators of a discrete optimal solution.
pub fn indicators(disc: &Discretization, sol: &Solution) -> LocalIndicators {
    let kind = disc.params().kind;
    let mesh = disc.mesh();
    let mut out = LocalIndicators::zeros(kind, mesh.n_cells());
    volume_indicators(disc, sol, &mut out);
    if kind == SchemeKind::Dg {
        edge_indicators(disc, sol, &mut out);
    }
    out
}

fn volume_indicators(disc: &Discretization, sol: &Solution, out: &mut LocalIndicators) {
    let kind = disc.params().kind;
    let mesh = disc.mesh();
    let gamma = disc.problem().gamma;
    let degree = match kind {
        SchemeKind::Cg => 7,
        SchemeKind::Dg => 2 * disc.velocity_space().basis().degree() + 3,
    };
    let quad = rule(degree);
    let (st, co) = (&sol.state, &sol.costate);
    let tabs = [&st.velocity, &st.vorticity, &st.pressure, &co.velocity, &co.vorticity, &co.pressure]
        .map(|f| Tabulation::new(f.space.basis(), &quad.points));
    // projection basis for the data oscillation terms
    let proj_basis = if disc.params().degree == 0 { Basis::P0 } else { Basis::P1 };
    let proj_tab = Tabulation::new(proj_basis, &quad.points);
    let nq = quad.points.len();
    let mut samples = vec![[0.0; Coeffs::LEN]; nq];
    for c in 0..mesh.n_cells() {
        let geom = CellGeom::new(mesh, c);
        let h2 = mesh.diameter(c).powi(2);
        let ud = sol.control.space.cell_dofs(c);
        let u = [sol.control.coeffs[ud[0]], sol.control.coeffs[ud[1]]];
        let xs: Vec<[f64; 2]> = quad.points.iter().map(|xi| geom.map(*xi)).collect();
        let exact: Vec<Coeffs> = xs.iter().map(|&x| Coeffs::sample(disc, x)).collect();
        let data: Vec<PointData> = (0..nq)
            .map(|q| {
                let ev = |i: usize, f: &crate::fem::FeFunction| f.combine(c, &geom, &tabs[i].values[q], &tabs[i].grads[q]);
                PointData {
                    u,
                    y: ev(0, &st.velocity),
                    omega: ev(1, &st.vorticity),
                    p: ev(2, &st.pressure),
                    w: ev(3, &co.velocity),
                    theta: ev(4, &co.vorticity),
                    q: ev(5, &co.pressure),
                }
            })
            .collect();
        let (mut ey, mut ew, mut eu) = (CompensatedSum::default(), CompensatedSum::default(), CompensatedSum::default());
        for q in 0..nq {
            let wq = quad.weights[q] * geom.det;
            let r = residuals(&data[q], &exact[q], gamma);
            let div_terms = if kind == SchemeKind::Cg { 1.0 } else { 0.0 };
            ey.add(wq * (h2 * sq(r.momentum_y) + r.constitutive_y.powi(2) + div_terms * r.divergence_y.powi(2)));
            ew.add(wq * (h2 * sq(r.momentum_w) + r.constitutive_w.powi(2) + div_terms * r.divergence_w.powi(2)));
            eu.add(wq * h2 * sq(r.control));
        }
        out.eta_y_sq[c] = ey.value();
        out.eta_w_sq[c] = ew.value();
        out.eta_u_sq[c] = eu.value();
        if kind == SchemeKind::Dg {
            for (s, e) in samples.iter_mut().zip(&exact) {
                *s = e.to_array();
            }
            let projected = project_samples(&samples, &proj_tab, &quad.weights);
            let (mut ty, mut tw) = (CompensatedSum::default(), CompensatedSum::default());
            for q in 0..nq {
                let wq = quad.weights[q] * geom.det;
                let (k, kh) = (exact[q], Coeffs::from_array(&projected[q]));
                let d = &data[q];
                let dnu = [k.grad_nu[0] - kh.grad_nu[0], k.grad_nu[1] - kh.grad_nu[1]];
                let dbeta = [k.beta[0] - kh.beta[0], k.beta[1] - kh.beta[1]];
                let curl_omega = [d.omega.grad[0][1], -d.omega.grad[0][0]];
                let curl_theta = [d.theta.grad[0][1], -d.theta.grad[0][0]];
                let dn = k.nu - kh.nu;
                let react = (k.sigma - k.div_beta) - (kh.sigma - kh.div_beta);
                ty.add(
                    wq * h2
                        * (sq([k.f[0] - kh.f[0], k.f[1] - kh.f[1]])
                            + sq(two_eps_dot(d.y.grad, dnu))
                            + dn * dn * sq(curl_omega)
                            + sq(convect(dbeta, d.y.grad))
                            + (k.sigma - kh.sigma).powi(2) * sq(d.y.value)),
                );
                tw.add(
                    wq * h2
                        * (sq([k.y_d[0] - kh.y_d[0], k.y_d[1] - kh.y_d[1]])
                            + sq(two_eps_dot(d.w.grad, dnu))
                            + dn * dn * sq(curl_theta)
                            + sq(convect(dbeta, d.w.grad))
                            + react * react * sq(d.w.value)
                            + (k.omega_d - kh.omega_d).powi(2)),
                );
            }
            out.theta_y_sq[c] = ty.value();
            out.theta_w_sq[c] = tw.value();
        }
    }
}

/// Cellwise L2 projection of sampled data onto the basis in `tab`.
fn project_samples(samples: &[[f64; Coeffs::LEN]], tab: &Tabulation, weights: &[f64]) -> Vec<[f64; Coeffs::LEN]> {
    let n = tab.n_basis;
    let mut m = vec![0.0; n * n];
    let mut r = vec![0.0; n * Coeffs::LEN];
    for (q, w) in weights.iter().enumerate() {
        let v = &tab.values[q];
        for a in 0..n {
            for b in 0..n {
                m[a * n + b] += w * v[a] * v[b];
            }
            for k in 0..Coeffs::LEN {
                r[a * Coeffs::LEN + k] += w * v[a] * samples[q][k];
            }
        }
    }
    let coef = solve_small(&m, &r, n, Coeffs::LEN);
    (0..weights.len())
        .map(|q| {
            let mut out = [0.0; Coeffs::LEN];
            for a in 0..n {
                for k in 0..Coeffs::LEN {
                    out[k] += coef[a * Coeffs::LEN + k] * tab.values[q][a];
                }
            }
            out
        })
        .collect()
}

fn edge_indicators(disc: &Discretization, sol: &Solution, out: &mut LocalIndicators) {
    let mesh = disc.mesh();
    let p = disc.params();
    let stab = EdgeStabilization::new(mesh, p.a11, p.c11, p.d11);
    let degree = 2 * disc.velocity_space().basis().degree() + 2;
    let (st, co) = (&sol.state, &sol.costate);
    for (e, edge) in mesh.edges().iter().enumerate() {
        let n = mesh.edge_normal(e);
        let he = mesh.edge_length(e);
        let geoms = edge.cells.map(|c| CellGeom::new(mesh, c));
        let (mut ay, mut aw) = (CompensatedSum::default(), CompensatedSum::default());
        for (x, wq) in edge_quadrature(mesh, e, degree) {
            let nu = (disc.problem().nu)(x).0;
            let trace = |f: &crate::fem::FeFunction, k: usize| eval_at(f, edge.cells[k], &geoms[k], x).value;
            if edge.boundary {
                let y = trace(&st.velocity, 0);
                let w = trace(&co.velocity, 0);
                let (ps, qs) = if p.boundary_pressure_penalty {
                    (trace(&st.pressure, 0)[0], trace(&co.pressure, 0)[0])
                } else {
                    (0.0, 0.0)
                };
                ay.add(wq * ((stab.c11[e] + stab.a11[e]) * sq(y) + stab.d11[e] * ps * ps));
                aw.add(wq * ((stab.c11[e] + stab.a11[e]) * sq(w) + stab.d11[e] * qs * qs));
                continue;
            }
            let jump_v = |f: &crate::fem::FeFunction| {
                let (a, b) = (trace(f, 0), trace(f, 1));
                let d = [a[0] - b[0], a[1] - b[1]];
                (d[0] * n[1] - d[1] * n[0], d[0] * n[0] + d[1] * n[1])
            };
            let jump_s = |f: &crate::fem::FeFunction| trace(f, 0)[0] - trace(f, 1)[0];
            let term = |v: &crate::fem::FeFunction, vort: &crate::fem::FeFunction, pres: &crate::fem::FeFunction| {
                let (jt, jn) = jump_v(v);
                let (dp, dw) = (jump_s(pres), jump_s(vort));
                // flux jump of p n + nu omega t, then the penalized traces
                let flux = he * (dp * dp + nu * nu * dw * dw);
                let trace = stab.c11[e] * jt * jt + stab.a11[e] * jn * jn + stab.d11[e] * dp * dp;
                0.5 * (flux + trace)
            };
            ay.add(wq * term(&st.velocity, &st.vorticity, &st.pressure));
            aw.add(wq * term(&co.velocity, &co.vorticity, &co.pressure));
        }
        let sides = if edge.boundary { 1 } else { 2 };
        for k in 0..sides {
            out.eta_y_sq[edge.cells[k]] += ay.value();
            out.eta_w_sq[edge.cells[k]] += aw.value();
        }
    }
}
