//! Finite element spaces on triangles: MINI velocity, continuous and
//! discontinuous Lagrange elements and piecewise constants.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use crate::quadrature::{triangle_rule, QuadratureRule};

/// Scalar shape function families on the reference triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    P0,
    P1,
    P2,
    /// Linear hats followed by the cubic bubble `27 λ0 λ1 λ2`.
    P1Bubble,
}

pub const MAX_BASIS: usize = 6;

impl Basis {
    pub fn len(self) -> usize {
        match self {
            Basis::P0 => 1,
            Basis::P1 => 3,
            Basis::P1Bubble => 4,
            Basis::P2 => 6,
        }
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn degree(self) -> usize {
        match self {
            Basis::P0 => 0,
            Basis::P1 => 1,
            Basis::P2 => 2,
            Basis::P1Bubble => 3,
        }
    }

    /// Values and reference gradients at `xi`.
    pub fn eval(self, xi: [f64; 2]) -> ([f64; MAX_BASIS], [[f64; 2]; MAX_BASIS]) {
        let mut v = [0.0; MAX_BASIS];
        let mut g = [[0.0; 2]; MAX_BASIS];
        let l = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
        let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
        match self {
            Basis::P0 => v[0] = 1.0,
            Basis::P1 | Basis::P1Bubble => {
                for i in 0..3 {
                    v[i] = l[i];
                    g[i] = dl[i];
                }
                if self == Basis::P1Bubble {
                    v[3] = 27.0 * l[0] * l[1] * l[2];
                    for d in 0..2 {
                        g[3][d] = 27.0
                            * (dl[0][d] * l[1] * l[2] + l[0] * dl[1][d] * l[2] + l[0] * l[1] * dl[2][d]);
                    }
                }
            }
            Basis::P2 => {
                for i in 0..3 {
                    v[i] = l[i] * (2.0 * l[i] - 1.0);
                    for d in 0..2 {
                        g[i][d] = (4.0 * l[i] - 1.0) * dl[i][d];
                    }
                }
                for j in 0..3 {
                    let (a, b) = ((j + 1) % 3, (j + 2) % 3);
                    v[3 + j] = 4.0 * l[a] * l[b];
                    for d in 0..2 {
                        g[3 + j][d] = 4.0 * (dl[a][d] * l[b] + l[a] * dl[b][d]);
                    }
                }
            }
        }
        (v, g)
    }

    /// Reference nodes of the nodal functions; the bubble has none.
    fn nodes(self) -> Vec<[f64; 2]> {
        match self {
            Basis::P0 => vec![[1.0 / 3.0, 1.0 / 3.0]],
            Basis::P1 | Basis::P1Bubble => vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            Basis::P2 => vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.0, 0.5], [0.5, 0.0]],
        }
    }
}

/// Basis values and reference gradients tabulated at a set of points.
#[derive(Clone, Debug)]
pub struct Tabulation {
    pub n_basis: usize,
    pub values: Vec<[f64; MAX_BASIS]>,
    pub grads: Vec<[[f64; 2]; MAX_BASIS]>,
}

impl Tabulation {
    pub fn new(basis: Basis, points: &[[f64; 2]]) -> Self {
        let (values, grads) = points.iter().map(|&p| basis.eval(p)).unzip();
        Tabulation { n_basis: basis.len(), values, grads }
    }
}

/// Affine map from the reference triangle onto a cell.
#[derive(Clone, Copy, Debug)]
pub struct CellGeom {
    pub origin: Point,
    pub jac: [[f64; 2]; 2],
    pub inv_t: [[f64; 2]; 2],
    pub det: f64,
}

impl CellGeom {
    pub fn new(mesh: &Mesh, c: usize) -> Self {
        let [a, b, d] = mesh.cell_points(c);
        let jac = [[b[0] - a[0], d[0] - a[0]], [b[1] - a[1], d[1] - a[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv_t = [[jac[1][1] / det, -jac[1][0] / det], [-jac[0][1] / det, jac[0][0] / det]];
        CellGeom { origin: a, jac, inv_t, det }
    }

    pub fn map(&self, xi: [f64; 2]) -> Point {
        [
            self.origin[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            self.origin[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    /// Reference coordinates of a physical point.
    pub fn inverse_map(&self, x: Point) -> [f64; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        // J^{-1} = (J^{-T})^T
        [
            self.inv_t[0][0] * d[0] + self.inv_t[1][0] * d[1],
            self.inv_t[0][1] * d[0] + self.inv_t[1][1] * d[1],
        ]
    }

    pub fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1],
            self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1],
        ]
    }
}

/// Finite element space kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Continuous P1 plus one cubic bubble per cell and component, zero on the boundary.
    MiniVelocity,
    LagrangeScalar { degree: usize },
    VorticityCont { degree: usize },
    DgVector { degree: usize },
    DgScalar { degree: usize },
    PiecewiseConstVector,
}

impl SpaceKind {
    pub fn ncomp(self) -> usize {
        match self {
            SpaceKind::MiniVelocity | SpaceKind::DgVector { .. } | SpaceKind::PiecewiseConstVector => 2,
            _ => 1,
        }
    }

    pub fn is_continuous(self) -> bool {
        matches!(
            self,
            SpaceKind::MiniVelocity | SpaceKind::LagrangeScalar { .. } | SpaceKind::VorticityCont { .. }
        )
    }

    fn basis(self) -> Result<Basis> {
        let by_degree = |k: usize, continuous: bool| match (k, continuous) {
            (0, false) => Ok(Basis::P0),
            (1, _) => Ok(Basis::P1),
            (2, false) => Ok(Basis::P2),
            _ => Err(Error::InvalidArgument(format!(
                "{} elements of degree {k} are not available",
                if continuous { "continuous" } else { "discontinuous" }
            ))),
        };
        match self {
            SpaceKind::MiniVelocity => Ok(Basis::P1Bubble),
            SpaceKind::LagrangeScalar { degree } | SpaceKind::VorticityCont { degree } => by_degree(degree, true),
            SpaceKind::DgVector { degree } | SpaceKind::DgScalar { degree } => by_degree(degree, false),
            SpaceKind::PiecewiseConstVector => Ok(Basis::P0),
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::MiniVelocity => write!(f, "mini_velocity"),
            SpaceKind::LagrangeScalar { degree } => write!(f, "lagrange_scalar {degree}"),
            SpaceKind::VorticityCont { degree } => write!(f, "vorticity_cont {degree}"),
            SpaceKind::DgVector { degree } => write!(f, "dg_vector {degree}"),
            SpaceKind::DgScalar { degree } => write!(f, "dg_scalar {degree}"),
            SpaceKind::PiecewiseConstVector => write!(f, "piecewise_const_vector"),
        }
    }
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.split_whitespace();
        let tag = it.next().unwrap_or("");
        let degree = || -> Result<usize> {
            s.split_whitespace()
                .nth(1)
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("space kind `{s}` needs a degree")))
        };
        match tag {
            "mini_velocity" => Ok(SpaceKind::MiniVelocity),
            "lagrange_scalar" => Ok(SpaceKind::LagrangeScalar { degree: degree()? }),
            "vorticity_cont" => Ok(SpaceKind::VorticityCont { degree: degree()? }),
            "dg_vector" => Ok(SpaceKind::DgVector { degree: degree()? }),
            "dg_scalar" => Ok(SpaceKind::DgScalar { degree: degree()? }),
            "piecewise_const_vector" => Ok(SpaceKind::PiecewiseConstVector),
            _ => Err(Error::InvalidArgument(format!("unknown space kind `{s}`"))),
        }
    }
}

/// A finite element space with its degree-of-freedom map.
///
/// Local degree of freedom `l` of a cell belongs to scalar shape function
/// `l / ncomp` and component `l % ncomp`. Continuous spaces number vertex
/// values first, then bubbles, with components interleaved.
#[derive(Debug)]
pub struct Space {
    mesh: Arc<Mesh>,
    kind: SpaceKind,
    basis: Basis,
    ncomp: usize,
    n_local: usize,
    ndofs: usize,
    dofs: Vec<usize>,
    dirichlet: Vec<bool>,
}

impl Space {
    pub fn new(mesh: Arc<Mesh>, kind: SpaceKind) -> Result<Arc<Space>> {
        let basis = kind.basis()?;
        let ncomp = kind.ncomp();
        let n_local = basis.len() * ncomp;
        let nc = mesh.n_cells();
        let nv = mesh.n_vertices();
        let mut dofs = Vec::with_capacity(nc * n_local);
        let ndofs = if kind.is_continuous() {
            for (c, cell) in mesh.cells().iter().enumerate() {
                for b in 0..basis.len() {
                    for k in 0..ncomp {
                        let node = if b < 3 { cell[b] } else { nv + c };
                        dofs.push(node * ncomp + k);
                    }
                }
            }
            (nv + if basis == Basis::P1Bubble { nc } else { 0 }) * ncomp
        } else {
            dofs.extend(0..nc * n_local);
            nc * n_local
        };
        let mut dirichlet = vec![false; ndofs];
        if kind == SpaceKind::MiniVelocity {
            for v in (0..nv).filter(|&v| mesh.is_boundary_vertex(v)) {
                for k in 0..ncomp {
                    dirichlet[v * ncomp + k] = true;
                }
            }
        }
        Ok(Arc::new(Space { mesh, kind, basis, ncomp, n_local, ndofs, dofs, dirichlet }))
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn n_local(&self) -> usize {
        self.n_local
    }

    pub fn ndofs(&self) -> usize {
        self.ndofs
    }

    pub fn cell_dofs(&self, c: usize) -> &[usize] {
        &self.dofs[c * self.n_local..(c + 1) * self.n_local]
    }

    /// Degrees of freedom fixed by the homogeneous velocity boundary condition.
    pub fn is_dirichlet(&self, dof: usize) -> bool {
        self.dirichlet[dof]
    }

    pub fn dirichlet_mask(&self) -> &[bool] {
        &self.dirichlet
    }

    /// Quadrature degree that integrates products of two members exactly.
    pub fn mass_degree(&self) -> usize {
        (2 * self.basis.degree()).max(1)
    }
}

/// Value and gradient of a field, both sized for vectors.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointValue {
    pub value: [f64; 2],
    /// `grad[i][j] = d value_i / d x_j`
    pub grad: [[f64; 2]; 2],
}

/// A finite element function.
#[derive(Clone, Debug)]
pub struct FeFunction {
    pub space: Arc<Space>,
    pub coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn zeros(space: Arc<Space>) -> Self {
        let n = space.ndofs();
        FeFunction { space, coeffs: vec![0.0; n] }
    }

    pub fn from_coeffs(space: Arc<Space>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.ndofs() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                space.ndofs(),
                coeffs.len()
            )));
        }
        Ok(FeFunction { space, coeffs })
    }

    /// Value and physical gradient in cell `c` at reference point `xi`.
    pub fn evaluate(&self, c: usize, xi: [f64; 2]) -> PointValue {
        let geom = CellGeom::new(self.space.mesh(), c);
        let (v, g) = self.space.basis().eval(xi);
        self.combine(c, &geom, &v, &g)
    }

    /// Same as [`FeFunction::evaluate`] with pre-tabulated shape functions.
    pub fn combine(
        &self,
        c: usize,
        geom: &CellGeom,
        v: &[f64; MAX_BASIS],
        g: &[[f64; 2]; MAX_BASIS],
    ) -> PointValue {
        let sp = &self.space;
        let nc = sp.ncomp();
        let mut out = PointValue::default();
        for (l, &dof) in sp.cell_dofs(c).iter().enumerate() {
            let (b, k) = (l / nc, l % nc);
            let a = self.coeffs[dof];
            if a == 0.0 {
                continue;
            }
            let pg = geom.grad(g[b]);
            out.value[k] += a * v[b];
            out.grad[k][0] += a * pg[0];
            out.grad[k][1] += a * pg[1];
        }
        out
    }

    /// Mean value over cell `c`.
    pub fn cell_mean(&self, c: usize) -> [f64; 2] {
        let rule = triangle_rule(self.space.basis().degree().max(1)).expect("valid degree");
        let geom = CellGeom::new(self.space.mesh(), c);
        let mut m = [0.0; 2];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let (v, g) = self.space.basis().eval(*p);
            let pv = self.combine(c, &geom, &v, &g);
            m[0] += 2.0 * w * pv.value[0];
            m[1] += 2.0 * w * pv.value[1];
        }
        m
    }

    /// Writes the plain-text field format.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "vvpfield 1")?;
        writeln!(out, "{}", self.space.kind())?;
        writeln!(out, "{}", self.coeffs.len())?;
        for a in &self.coeffs {
            writeln!(out, "{a}")?;
        }
        Ok(())
    }

    /// Reads a field written by [`FeFunction::write_dump`] onto a matching space.
    pub fn read_dump<R: BufRead>(space: Arc<Space>, input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, Ok(l))) => Ok((i + 1, l)),
                Some((i, Err(e))) => Err(Error::Parse { line: i + 1, message: e.to_string() }),
                None => Err(Error::Parse { line: 0, message: format!("missing {what}") }),
            }
        };
        let (l, header) = next("header")?;
        if header.trim() != "vvpfield 1" {
            return Err(Error::Parse { line: l, message: "missing `vvpfield 1` header".into() });
        }
        let (l, kind) = next("space kind")?;
        if kind.trim().parse::<SpaceKind>()? != space.kind() {
            return Err(Error::Parse { line: l, message: format!("space kind `{}` does not match", kind.trim()) });
        }
        let (l, n) = next("length")?;
        let n: usize = n.trim().parse().map_err(|_| Error::Parse { line: l, message: "bad length".into() })?;
        let mut coeffs = Vec::with_capacity(n);
        for _ in 0..n {
            let (l, s) = next("coefficient")?;
            coeffs.push(s.trim().parse().map_err(|_| Error::Parse { line: l, message: "bad coefficient".into() })?);
        }
        FeFunction::from_coeffs(space, coeffs)
    }
}

/// Interpolates `f` (returning both components; scalar spaces use the first).
///
/// Continuous spaces use nodal interpolation with zero bubble coefficients;
/// discontinuous and piecewise constant spaces use the cellwise L2 projection.
pub fn interpolate(space: &Arc<Space>, f: impl Fn(Point) -> [f64; 2]) -> FeFunction {
    let mesh = space.mesh().clone();
    let nc = space.ncomp();
    let nb = space.basis().len();
    let mut out = FeFunction::zeros(space.clone());
    if space.kind().is_continuous() {
        let nodes = space.basis().nodes();
        for c in 0..mesh.n_cells() {
            let geom = CellGeom::new(&mesh, c);
            for (b, xi) in nodes.iter().enumerate() {
                let val = f(geom.map(*xi));
                for k in 0..nc {
                    let dof = space.cell_dofs(c)[b * nc + k];
                    out.coeffs[dof] = if space.is_dirichlet(dof) { 0.0 } else { val[k] };
                }
            }
        }
        return out;
    }
    let rule = triangle_rule(space.mass_degree() + 6).expect("valid degree");
    let tab = Tabulation::new(space.basis(), &rule.points);
    let mut mass = vec![0.0; nb * nb];
    let mut rhs = vec![0.0; nb * nc];
    for c in 0..mesh.n_cells() {
        let geom = CellGeom::new(&mesh, c);
        mass.iter_mut().for_each(|m| *m = 0.0);
        rhs.iter_mut().for_each(|r| *r = 0.0);
        for (q, (p, w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let val = f(geom.map(*p));
            let v = &tab.values[q];
            for i in 0..nb {
                for j in 0..nb {
                    mass[i * nb + j] += w * v[i] * v[j];
                }
                for k in 0..nc {
                    rhs[i * nc + k] += w * v[i] * val[k];
                }
            }
        }
        let sol = solve_small(&mass, &rhs, nb, nc);
        for (l, &dof) in space.cell_dofs(c).iter().enumerate() {
            out.coeffs[dof] = sol[l];
        }
    }
    out
}

/// Solves the small dense system `m X = r` with `nrhs` right-hand sides stored
/// row-interleaved, using Gaussian elimination with partial pivoting.
pub(crate) fn solve_small(m: &[f64], r: &[f64], n: usize, nrhs: usize) -> Vec<f64> {
    let mut a = m.to_vec();
    let mut x = r.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs())).unwrap();
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            for k in 0..nrhs {
                x.swap(col * nrhs + k, piv * nrhs + k);
            }
        }
        let d = a[col * n + col];
        for i in col + 1..n {
            let f = a[i * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[i * n + j] -= f * a[col * n + j];
            }
            for k in 0..nrhs {
                x[i * nrhs + k] -= f * x[col * nrhs + k];
            }
        }
    }
    for col in (0..n).rev() {
        for k in 0..nrhs {
            let mut s = x[col * nrhs + k];
            for j in col + 1..n {
                s -= a[col * n + j] * x[j * nrhs + k];
            }
            x[col * nrhs + k] = s / a[col * n + col];
        }
    }
    x
}

/// Gauss rule on the reference triangle; panics only on invalid degrees,
/// which are internal constants.
pub(crate) fn rule(degree: usize) -> QuadratureRule<2> {
    triangle_rule(degree).expect("internal quadrature degree")
}
