//! Shared assembly helpers: shape function evaluation in physical
//! coordinates, local block matrices and global scattering.

use crate::fem::{CellGeom, Space, MAX_BASIS};
use crate::linsolve::{SparseMatrix, TripletBuilder};

pub(crate) const MAX_VEC: usize = 2 * MAX_BASIS;

/// Shape functions of a vector space at one point.
#[derive(Clone, Copy)]
pub(crate) struct VectorShapes {
    pub n: usize,
    pub comp: [usize; MAX_VEC],
    pub val: [f64; MAX_VEC],
    pub grad: [[f64; 2]; MAX_VEC],
    pub curl: [f64; MAX_VEC],
    pub div: [f64; MAX_VEC],
}

impl VectorShapes {
    pub fn new(space: &Space, geom: &CellGeom, v: &[f64; MAX_BASIS], g: &[[f64; 2]; MAX_BASIS]) -> Self {
        let nb = space.basis().len();
        let mut s = VectorShapes {
            n: 2 * nb,
            comp: [0; MAX_VEC],
            val: [0.0; MAX_VEC],
            grad: [[0.0; 2]; MAX_VEC],
            curl: [0.0; MAX_VEC],
            div: [0.0; MAX_VEC],
        };
        for b in 0..nb {
            let pg = geom.grad(g[b]);
            for k in 0..2 {
                let l = 2 * b + k;
                s.comp[l] = k;
                s.val[l] = v[b];
                s.grad[l] = pg;
                s.curl[l] = if k == 0 { -pg[1] } else { pg[0] };
                s.div[l] = pg[k];
            }
        }
        s
    }

    /// Tangential trace `v x n = v1 n2 - v2 n1` of shape function `l`.
    #[inline]
    pub fn cross_n(&self, l: usize, n: [f64; 2]) -> f64 {
        if self.comp[l] == 0 {
            self.val[l] * n[1]
        } else {
            -self.val[l] * n[0]
        }
    }

    /// Normal trace `v . n` of shape function `l`.
    #[inline]
    pub fn dot_n(&self, l: usize, n: [f64; 2]) -> f64 {
        self.val[l] * n[self.comp[l]]
    }
}

/// Shape functions of a scalar space at one point.
#[derive(Clone, Copy)]
pub(crate) struct ScalarShapes {
    pub n: usize,
    pub val: [f64; MAX_BASIS],
    pub grad: [[f64; 2]; MAX_BASIS],
}

impl ScalarShapes {
    pub fn new(space: &Space, geom: &CellGeom, v: &[f64; MAX_BASIS], g: &[[f64; 2]; MAX_BASIS]) -> Self {
        let n = space.basis().len();
        let mut s = ScalarShapes { n, val: [0.0; MAX_BASIS], grad: [[0.0; 2]; MAX_BASIS] };
        for b in 0..n {
            s.val[b] = v[b];
            s.grad[b] = geom.grad(g[b]);
        }
        s
    }
}

/// Dense local matrix over the velocity, vorticity and pressure unknowns of
/// one or two cells.
pub(crate) struct LocalMatrix {
    pub n: usize,
    pub a: Vec<f64>,
}

impl LocalMatrix {
    pub fn new(n: usize) -> Self {
        LocalMatrix { n, a: vec![0.0; n * n] }
    }

    pub fn clear(&mut self) {
        self.a.iter_mut().for_each(|v| *v = 0.0);
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] += v;
    }

    pub fn scatter(&self, dofs: &[usize], out: &mut SystemBuilder) {
        for (i, &gi) in dofs.iter().enumerate() {
            for (j, &gj) in dofs.iter().enumerate() {
                let v = self.a[i * self.n + j];
                if v != 0.0 {
                    out.add(gi, gj, v);
                }
            }
        }
    }
}

/// Triplet builder that eliminates fixed unknowns symmetrically, leaving a
/// unit diagonal in their rows.
pub(crate) struct SystemBuilder {
    tb: TripletBuilder,
    fixed: Vec<bool>,
}

impl SystemBuilder {
    pub fn new(n: usize, fixed: Vec<bool>, cap: usize) -> Self {
        debug_assert_eq!(fixed.len(), n);
        SystemBuilder { tb: TripletBuilder::with_capacity(n, n, cap), fixed }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if !self.fixed[i] && !self.fixed[j] {
            self.tb.add(i, j, v);
        }
    }

    pub fn build(mut self) -> SparseMatrix {
        for (i, &f) in self.fixed.iter().enumerate() {
            if f {
                self.tb.add(i, i, 1.0);
            }
        }
        self.tb.build()
    }
}
