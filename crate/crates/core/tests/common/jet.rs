//! Truncated bivariate Taylor polynomials: forward-mode differentiation up to
//! third order, used to rebuild manufactured fields independently.

use std::ops::{Add, Mul, Neg, Sub};

pub const ORDER: usize = 3;

/// `c[i][j]` is the coefficient of `dx^i dy^j`, kept for `i + j <= ORDER`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub c: [[f64; ORDER + 1]; ORDER + 1],
}

impl Jet {
    pub fn constant(v: f64) -> Jet {
        let mut c = [[0.0; ORDER + 1]; ORDER + 1];
        c[0][0] = v;
        Jet { c }
    }

    /// The coordinate `x` (`axis = 0`) or `y` (`axis = 1`) at value `v`.
    pub fn variable(v: f64, axis: usize) -> Jet {
        let mut j = Jet::constant(v);
        if axis == 0 {
            j.c[1][0] = 1.0;
        } else {
            j.c[0][1] = 1.0;
        }
        j
    }

    pub fn value(&self) -> f64 {
        self.c[0][0]
    }

    /// Partial derivative `d^(i+j) / dx^i dy^j`.
    pub fn d(&self, i: usize, j: usize) -> f64 {
        let fact = |n: usize| (1..=n).product::<usize>() as f64;
        self.c[i][j] * fact(i) * fact(j)
    }

    /// Applies a scalar function given its derivatives at the constant term.
    fn compose(self, derivs: [f64; ORDER + 1]) -> Jet {
        let mut h = self;
        h.c[0][0] = 0.0;
        let mut out = Jet::constant(derivs[0]);
        let mut power = Jet::constant(1.0);
        let mut fact = 1.0;
        for (k, d) in derivs.iter().enumerate().skip(1) {
            power = power * h;
            fact *= k as f64;
            out = out + power * (d / fact);
        }
        out
    }

    pub fn sin(self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(self) -> Jet {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn exp(self) -> Jet {
        let e = self.value().exp();
        self.compose([e; ORDER + 1])
    }

    pub fn powi(self, n: u32) -> Jet {
        (0..n).fold(Jet::constant(1.0), |acc, _| acc * self)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        for i in 0..=ORDER {
            for j in 0..=ORDER - i {
                self.c[i][j] += o.c[i][j];
            }
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * -1.0
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet::constant(0.0);
        for i in 0..=ORDER {
            for j in 0..=ORDER - i {
                for k in 0..=ORDER - i - j {
                    for l in 0..=ORDER - i - j - k {
                        out.c[i + k][j + l] += self.c[i][j] * o.c[k][l];
                    }
                }
            }
        }
        out
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, s: f64) -> Jet {
        self.c.iter_mut().flatten().for_each(|v| *v *= s);
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, s: f64) -> Jet {
        self.c[0][0] += s;
        self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        -j + self
    }
}
