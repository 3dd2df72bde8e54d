//! Sparse matrices and a direct solver.
//!
//! Factorization is a supernodal LU with partial pivoting and a column
//! approximate-minimum-degree ordering, provided by `faer` and run
//! single-threaded for reproducibility. Solves add up to three steps of
//! iterative refinement against the original matrix.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates `(row, col, value)` triplets.
#[derive(Clone, Debug, Default)]
pub struct TripletBuilder {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        TripletBuilder { n_rows, n_cols, entries: Vec::new() }
    }

    pub fn with_capacity(n_rows: usize, n_cols: usize, cap: usize) -> Self {
        TripletBuilder { n_rows, n_cols, entries: Vec::with_capacity(cap) }
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    /// Sorts entries by (row, column) and sums duplicates.
    pub fn build(mut self) -> SparseMatrix {
        self.entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; self.n_rows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last = None;
        for &(r, c, v) in &self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix { n_rows: self.n_rows, n_cols: self.n_cols, row_ptr, col_idx, values }
    }
}

impl SparseMatrix {
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut b = TripletBuilder::with_capacity(n_rows, n_cols, triplets.len());
        for &(r, c, v) in triplets {
            b.entries.push((r, c, v));
        }
        b.build()
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &a)| (i, j, a))
        })
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| {
                let (c, v) = self.row(i);
                c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum()
            })
            .collect()
    }

    /// `y = A^T x`
    pub fn mul_vec_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_cols];
        for i in 0..self.n_rows {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                y[j] += a * x[i];
            }
        }
        y
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut b = TripletBuilder::with_capacity(self.n_cols, self.n_rows, self.nnz());
        for (i, j, a) in self.iter() {
            b.entries.push((j, i, a));
        }
        b.build()
    }

    /// Writes `row col value` lines after a `rows cols nnz` header.
    pub fn write_coordinate<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for (i, j, a) in self.iter() {
            writeln!(out, "{i} {j} {a:e}")?;
        }
        Ok(())
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, j, a) in self.iter() {
            d[i][j] = a;
        }
        d
    }
}

/// Maximum-norm of a vector.
pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// An LU factorization ready for repeated solves.
pub struct Factorization {
    matrix: SparseMatrix,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factorization").field("n", &self.matrix.n_rows).finish()
    }
}

const REFINEMENT_STEPS: usize = 3;

impl Factorization {
    pub fn new(matrix: &SparseMatrix) -> Result<Self> {
        if matrix.n_rows != matrix.n_cols {
            return Err(Error::InvalidArgument("matrix must be square".into()));
        }
        let n = matrix.n_rows;
        if let Some(i) = (0..n).find(|&i| matrix.row_ptr[i] == matrix.row_ptr[i + 1]) {
            return Err(Error::StructurallySingular { column: i });
        }
        let mut col_used = vec![false; n];
        matrix.col_idx.iter().for_each(|&j| col_used[j] = true);
        if let Some(j) = col_used.iter().position(|u| !u) {
            return Err(Error::StructurallySingular { column: j });
        }
        let trip: Vec<Triplet<usize, usize, f64>> = matrix.iter().map(|(i, j, a)| Triplet::new(i, j, a)).collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
            .map_err(|e| Error::InvalidArgument(format!("sparse matrix construction failed: {e:?}")))?;
        let lu = a.sp_lu().map_err(|e| match e {
            LuError::SymbolicSingular { index } => Error::StructurallySingular { column: index },
            LuError::Generic(e) => Error::InvalidArgument(format!("factorization failed: {e:?}")),
        })?;
        Ok(Factorization { matrix: matrix.clone(), lu })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.solve_impl(b, false)
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.solve_impl(b, true)
    }

    fn raw(&self, b: &[f64], transpose: bool) -> Vec<f64> {
        let mut rhs = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
        if transpose {
            self.lu.solve_transpose_in_place(rhs.as_mut());
        } else {
            self.lu.solve_in_place(rhs.as_mut());
        }
        (0..b.len()).map(|i| rhs[(i, 0)]).collect()
    }

    fn residual(&self, x: &[f64], b: &[f64], transpose: bool) -> Vec<f64> {
        let ax = if transpose { self.matrix.mul_vec_transpose(x) } else { self.matrix.mul_vec(x) };
        b.iter().zip(ax).map(|(b, a)| b - a).collect()
    }

    fn solve_impl(&self, b: &[f64], transpose: bool) -> Result<Vec<f64>> {
        if b.len() != self.matrix.n_rows {
            return Err(Error::InvalidArgument(format!(
                "right-hand side has length {}, expected {}",
                b.len(),
                self.matrix.n_rows
            )));
        }
        let tol = 1e-10 * norm_inf(b).max(1.0);
        let mut x = self.raw(b, transpose);
        if let Some(row) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::SingularPivot { row });
        }
        let mut r = self.residual(&x, b, transpose);
        for _ in 0..REFINEMENT_STEPS {
            if norm_inf(&r) <= 0.01 * tol {
                break;
            }
            let dx = self.raw(&r, transpose);
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(x, d)| x + d).collect();
            let rt = self.residual(&trial, b, transpose);
            if norm_inf(&rt) >= norm_inf(&r) {
                break;
            }
            x = trial;
            r = rt;
        }
        let res = norm_inf(&r);
        if !res.is_finite() {
            return Err(Error::SingularPivot { row: r.iter().position(|v| !v.is_finite()).unwrap_or(0) });
        }
        if res > tol {
            return Err(Error::Inaccurate { residual: res, tolerance: tol });
        }
        Ok(x)
    }
}

/// Factorizes and solves in one call.
pub fn solve(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    Factorization::new(a)?.solve(b)
}
