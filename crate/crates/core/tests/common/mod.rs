//! Shared oracles and fixtures for the integration tests.
#![allow(dead_code)]

pub mod jet;

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use vvp::linsolve::SparseMatrix;
use vvp::mesh::{Domain, Mesh, Point};
use vvp::norms::{pressure_gram, velocity_vorticity_gram};
use vvp::problems::{Problem, ProblemId};
use vvp::scheme::{Discretization, SchemeKind, SchemeParams};

pub fn dense(a: &SparseMatrix) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.n_rows(), a.n_cols());
    for (i, j, v) in a.iter() {
        m[(i, j)] += v;
    }
    m
}

/// Rows `rows` and columns `cols` of `a`.
pub fn select(a: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])])
}

/// Sorted eigenvalues of the symmetric pencil `(a, b)` with `b` positive definite.
pub fn generalized_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let l = b.clone().cholesky().expect("Gram matrix must be positive definite").l();
    let li = l.clone().try_inverse().expect("invertible factor");
    let c = &li * a * li.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn sym_part(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn unit_square(n: usize) -> Arc<Mesh> {
    Arc::new(Mesh::generate(Domain::UnitSquare, n).unwrap())
}

pub fn discretize(problem: &Problem, kind: SchemeKind, mesh: Arc<Mesh>) -> Discretization {
    let params = SchemeParams::new(kind, problem);
    Discretization::new(problem, &params, mesh).unwrap()
}

pub fn smooth() -> Problem {
    Problem::new(ProblemId::Smooth, 1.0)
}

/// Constant coefficients `nu = 1`, `sigma = 1`, given transport, zero data.
pub fn constant_problem(beta: [f64; 2]) -> Problem {
    let mut p = Problem::new(ProblemId::Smooth, 1.0);
    p.nu = Arc::new(|_| (1.0, [0.0, 0.0]));
    p.nu_bounds = (1.0, 1.0);
    p.sigma = Arc::new(|_| 1.0);
    p.beta = Arc::new(move |_| (beta, 0.0));
    p.f = Arc::new(|_| [0.0, 0.0]);
    p.y_d = Arc::new(|_| [0.0, 0.0]);
    p.omega_d = Arc::new(|_| 0.0);
    p.exact = None;
    p
}

/// Cell of `mesh` containing `x`, with barycentric coordinates.
pub fn locate(mesh: &Mesh, x: Point) -> Option<(usize, [f64; 3])> {
    (0..mesh.n_cells()).find_map(|c| {
        let [a, b, d] = mesh.cell_points(c);
        let det = (b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]);
        let l1 = ((x[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (x[1] - a[1])) / det;
        let l2 = ((b[0] - a[0]) * (x[1] - a[1]) - (x[0] - a[0]) * (b[1] - a[1])) / det;
        let l0 = 1.0 - l1 - l2;
        (l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12).then_some((c, [l0, l1, l2]))
    })
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

pub fn free_velocity(disc: &Discretization) -> Vec<usize> {
    (0..disc.layout().velocity).filter(|&i| !disc.velocity_space().is_dirichlet(i)).collect()
}

pub fn vorticity_rows(disc: &Discretization) -> Vec<usize> {
    let l = disc.layout();
    (l.vorticity_offset()..l.pressure_offset()).collect()
}

pub fn pressure_rows(disc: &Discretization) -> Vec<usize> {
    let l = disc.layout();
    (l.pressure_offset()..l.multiplier()).collect()
}

/// Smallest eigenvalue of the symmetric part of the velocity and vorticity
/// block relative to the Gram matrix of the scheme's norm.
pub fn coercivity_constant(disc: &Discretization) -> f64 {
    let mut rows = free_velocity(disc);
    rows.extend(vorticity_rows(disc));
    let a = select(&dense(disc.state_matrix()), &rows, &rows);
    let gram = dense(&velocity_vorticity_gram(disc));
    let g = select(&gram, &rows, &rows);
    generalized_eigenvalues(&sym_part(&a), &g)[0]
}

/// Discrete inf-sup constant of the conforming pressure coupling in the
/// velocity norm `|||v|||_1`, with constants factored out.
pub fn inf_sup(disc: &Discretization) -> f64 {
    let rows = free_velocity(disc);
    let cols = pressure_rows(disc);
    let b = select(&dense(disc.state_matrix()), &rows, &cols);
    let x = select(&dense(&velocity_vorticity_gram(disc)), &rows, &rows);
    let m = dense(&pressure_gram(disc));
    let s = b.transpose() * x.cholesky().unwrap().solve(&b);
    let ev = generalized_eigenvalues(&s, &m);
    assert!(ev[0].abs() < 1e-10 * ev[ev.len() - 1], "constants must be the only kernel");
    ev[1].sqrt()
}
