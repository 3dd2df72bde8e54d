//! Sparse LU against a dense LU oracle.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vvp::linsolve::{solve, Factorization, SparseMatrix};
use vvp::Error;

fn random_sparse(n: usize, seed: u64) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, 4.0 + rng.random_range(0.0..1.0)));
        for _ in 0..4 {
            t.push((i, rng.random_range(0..n), rng.random_range(-1.0..1.0)));
        }
    }
    SparseMatrix::from_triplets(n, n, &t)
}

fn to_nalgebra(a: &SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.n_rows(), a.n_cols());
    for (i, j, v) in a.iter() {
        d[(i, j)] += v;
    }
    d
}

#[test]
fn matches_dense_lu_on_random_systems() {
    for seed in 0..5 {
        let a = random_sparse(50, seed);
        let b: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let x = solve(&a, &b).unwrap();
        let want = to_nalgebra(&a).lu().solve(&DVector::from_column_slice(&b)).unwrap();
        for (x, w) in x.iter().zip(want.iter()) {
            assert!((x - w).abs() < 1e-12 * w.abs().max(1.0));
        }
    }
}

#[test]
fn transpose_solve_matches_dense() {
    let a = random_sparse(40, 9);
    let b: Vec<f64> = (0..40).map(|i| 1.0 + i as f64).collect();
    let x = Factorization::new(&a).unwrap().solve_transpose(&b).unwrap();
    let want = to_nalgebra(&a).transpose().lu().solve(&DVector::from_column_slice(&b)).unwrap();
    for (x, w) in x.iter().zip(want.iter()) {
        assert!((x - w).abs() < 1e-11 * w.abs().max(1.0));
    }
}

#[test]
fn repeated_solves_are_bitwise_identical() {
    let a = random_sparse(60, 4);
    let b: Vec<f64> = (0..60).map(|i| (i as f64).cos()).collect();
    let x1 = solve(&a, &b).unwrap();
    let x2 = Factorization::new(&a.clone()).unwrap().solve(&b).unwrap();
    assert_eq!(x1, x2);
}

#[test]
fn empty_row_is_structurally_singular() {
    let a = SparseMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (2, 2, 1.0), (2, 1, 1.0)]);
    assert!(matches!(Factorization::new(&a), Err(Error::StructurallySingular { column: 1 })));
}

#[test]
fn length_mismatch_is_rejected() {
    let a = random_sparse(5, 1);
    assert!(solve(&a, &[1.0; 4]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    /// Renumbering the unknowns permutes the solution and nothing else.
    #[test]
    fn symmetric_permutation_permutes_the_solution(seed in 0u64..1000, shift in 1usize..29) {
        let n = 30;
        let a = random_sparse(n, seed);
        let perm: Vec<usize> = (0..n).map(|i| (i * 7 + shift) % n).collect();
        let pa = SparseMatrix::from_triplets(n, n, &a.iter().map(|(i, j, v)| (perm[i], perm[j], v)).collect::<Vec<_>>());
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 10.0).collect();
        let mut pb = vec![0.0; n];
        for i in 0..n {
            pb[perm[i]] = b[i];
        }
        let x = solve(&a, &b).unwrap();
        let px = solve(&pa, &pb).unwrap();
        for i in 0..n {
            prop_assert!((px[perm[i]] - x[i]).abs() < 1e-12 * x[i].abs().max(1.0));
        }
    }

    #[test]
    fn residual_is_small(seed in 0u64..1000) {
        let a = random_sparse(25, seed);
        let b: Vec<f64> = (0..25).map(|i| ((seed + i) as f64).sin()).collect();
        let x = solve(&a, &b).unwrap();
        let r: f64 = a.mul_vec(&x).iter().zip(&b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(r < 1e-12);
    }
}
