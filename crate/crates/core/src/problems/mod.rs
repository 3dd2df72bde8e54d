//! Coefficients and data of the model control problems.

mod generated;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{Domain, Point};

/// Exact state, co-state and pressures of a manufactured problem, together with
/// the strong state operator (equal to `f + u`) and the strong adjoint operator
/// (equal to `y - y_d`) applied to them.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ExactFields {
    pub y: [f64; 2],
    /// `grad_y[i][j] = d y_i / d x_j`
    pub grad_y: [[f64; 2]; 2],
    pub omega: f64,
    pub p: f64,
    pub w: [f64; 2],
    pub grad_w: [[f64; 2]; 2],
    pub theta: f64,
    pub q: f64,
    pub state_op: [f64; 2],
    pub adjoint_op: [f64; 2],
}

/// Registered problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemId {
    /// Smooth solution on the unit square; viscosity nearly vanishes at the origin.
    Smooth,
    /// Unit triangle with exponential boundary layers along two legs.
    Layer,
    /// L-shaped domain with constant forcing, no known solution.
    LShape,
    /// T-shaped domain with constant forcing, no known solution.
    TShape,
}

impl ProblemId {
    pub const ALL: [ProblemId; 4] = [ProblemId::Smooth, ProblemId::Layer, ProblemId::LShape, ProblemId::TShape];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Smooth => "smooth",
            ProblemId::Layer => "layer",
            ProblemId::LShape => "lshape",
            ProblemId::TShape => "tshape",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

pub type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;
/// Value and gradient of a scalar coefficient.
pub type GradField = Arc<dyn Fn(Point) -> (f64, [f64; 2]) + Send + Sync>;
/// Value and divergence of a vector coefficient.
pub type DivField = Arc<dyn Fn(Point) -> ([f64; 2], f64) + Send + Sync>;
pub type ExactField = Arc<dyn Fn(Point) -> ExactFields + Send + Sync>;

/// Data of a distributed control problem.
///
/// Fields are public so that callers can alter coefficients, for example to
/// enforce a coercivity assumption in a study.
#[derive(Clone)]
pub struct Problem {
    pub id: ProblemId,
    pub domain: Domain,
    /// Viscosity and its gradient.
    pub nu: GradField,
    /// Lower and upper viscosity bounds.
    pub nu_bounds: (f64, f64),
    pub sigma: ScalarField,
    /// Transport field and its divergence.
    pub beta: DivField,
    /// Body force, excluding the control.
    pub f: VectorField,
    pub y_d: VectorField,
    pub omega_d: ScalarField,
    /// Box constraints on each control component.
    pub bounds: (f64, f64),
    pub gamma: f64,
    pub exact: Option<ExactField>,
    /// Subdivisions per unit length of the coarsest mesh.
    pub initial_subdivisions: usize,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("bounds", &self.bounds)
            .field("gamma", &self.gamma)
            .finish_non_exhaustive()
    }
}

/// Componentwise clamp onto `[a, b]`.
pub fn project(v: f64, (a, b): (f64, f64)) -> f64 {
    b.min(a.max(v))
}

impl Problem {
    pub fn new(id: ProblemId, gamma: f64) -> Problem {
        match id {
            ProblemId::Smooth => manufactured(
                id,
                Domain::UnitSquare,
                gamma,
                (-0.5, 0.5),
                (1e-3, 1.0),
                Arc::new(|x: Point| (1e-3 + 0.999 * x[0] * x[1], [0.999 * x[1], 0.999 * x[0]])),
                100.0,
                None,
                generated::square_fields,
                4,
            ),
            ProblemId::Layer => manufactured(
                id,
                Domain::UnitTriangle,
                gamma,
                (0.0, 0.1),
                (1.0, 1.00025),
                Arc::new(|x: Point| (1.0 + 1e-3 * x[0] * x[1], [1e-3 * x[1], 1e-3 * x[0]])),
                100.0,
                Some([1.0, 1.0]),
                generated::triangle_fields,
                4,
            ),
            ProblemId::LShape | ProblemId::TShape => {
                let (domain, nu_max) = if id == ProblemId::LShape {
                    (Domain::LShape, 2.0)
                } else {
                    (Domain::TShape, 3.25)
                };
                Problem {
                    id,
                    domain,
                    nu: Arc::new(|x: Point| (1.0 + x[0] * x[0], [2.0 * x[0], 0.0])),
                    nu_bounds: (1.0, nu_max),
                    sigma: Arc::new(|_| 0.0),
                    beta: Arc::new(|_| ([1.0, 1.0], 0.0)),
                    f: Arc::new(|_| [1.0, 1.0]),
                    y_d: Arc::new(|x: Point| [x[1], -x[0]]),
                    omega_d: Arc::new(|_| -2.0),
                    bounds: (0.0, 1.0),
                    gamma,
                    exact: None,
                    initial_subdivisions: 8,
                }
            }
        }
    }

    /// The exact optimal control, when known.
    pub fn exact_control(&self, x: Point) -> Option<[f64; 2]> {
        let e = (self.exact.as_ref()?)(x);
        Some(e.w.map(|w| project(-w / self.gamma, self.bounds)))
    }

    /// Replaces the reaction coefficient by a constant.
    pub fn with_sigma(mut self, sigma: f64) -> Problem {
        self.sigma = Arc::new(move |_| sigma);
        self
    }
}

#[allow(clippy::too_many_arguments)]
fn manufactured(
    id: ProblemId,
    domain: Domain,
    gamma: f64,
    bounds: (f64, f64),
    nu_bounds: (f64, f64),
    nu: GradField,
    sigma: f64,
    beta: Option<[f64; 2]>,
    fields: fn(f64, f64) -> ExactFields,
    initial_subdivisions: usize,
) -> Problem {
    let exact: ExactField = Arc::new(move |x: Point| fields(x[0], x[1]));
    let beta: DivField = match beta {
        Some(b) => Arc::new(move |_| (b, 0.0)),
        // transport by the exact state velocity, which is solenoidal
        None => {
            let e = exact.clone();
            Arc::new(move |x| (e(x).y, 0.0))
        }
    };
    let e = exact.clone();
    let f: VectorField = Arc::new(move |x| {
        let v = e(x);
        let u = v.w.map(|w| project(-w / gamma, bounds));
        [v.state_op[0] - u[0], v.state_op[1] - u[1]]
    });
    let e = exact.clone();
    let y_d: VectorField = Arc::new(move |x| {
        let v = e(x);
        [v.y[0] - v.adjoint_op[0], v.y[1] - v.adjoint_op[1]]
    });
    let e = exact.clone();
    let omega_d: ScalarField = Arc::new(move |x| e(x).omega);
    Problem {
        id,
        domain,
        nu,
        nu_bounds,
        sigma: Arc::new(move |_| sigma),
        beta,
        f,
        y_d,
        omega_d,
        bounds,
        gamma,
        exact: Some(exact),
        initial_subdivisions,
    }
}
