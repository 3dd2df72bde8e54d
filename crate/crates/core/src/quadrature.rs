//! Gauss-type quadrature on the reference triangle and the unit interval.
//!
//! Triangle rules are collapsed tensor products of Gauss-Legendre rules, so all
//! weights are positive and all points are interior.

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 24;

/// Points and weights of a quadrature rule.
#[derive(Clone, Debug)]
pub struct QuadratureRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
}

impl<const D: usize> QuadratureRule<D> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Rule on the reference triangle with vertices (0,0), (1,0), (0,1), exact for
/// polynomials of total degree `degree`. Weights sum to 1/2.
pub fn triangle_rule(degree: usize) -> Result<QuadratureRule<2>> {
    check_degree(degree)?;
    // x = s, y = t (1 - s); the Jacobian (1 - s) raises the degree in s by one
    let n = degree.div_ceil(2) + 1;
    let (gx, gw) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (s, ws) in gx.iter().zip(&gw) {
        for (t, wt) in gx.iter().zip(&gw) {
            points.push([*s, t * (1.0 - s)]);
            weights.push(ws * wt * (1.0 - s));
        }
    }
    Ok(QuadratureRule { points, weights })
}

/// Rule on [0, 1] exact for polynomials of degree `degree`. Weights sum to 1.
pub fn interval_rule(degree: usize) -> Result<QuadratureRule<1>> {
    check_degree(degree)?;
    let (x, w) = gauss_legendre(degree / 2 + 1);
    Ok(QuadratureRule { points: x.into_iter().map(|x| [x]).collect(), weights: w })
}

fn check_degree(degree: usize) -> Result<()> {
    if degree == 0 || degree > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "quadrature degree {degree} outside 1..={MAX_DEGREE}"
        )));
    }
    Ok(())
}

/// Gauss-Legendre nodes and weights mapped to [0, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wi;
        w[n - 1 - i] = 0.5 * wi;
    }
    (x, w)
}

/// Value and derivative of the Legendre polynomial of degree `n` at `z`.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
