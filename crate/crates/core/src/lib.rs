//! Finite element solvers for distributed optimal control of generalized
//! Oseen flow written in velocity, vorticity and pressure.

pub mod adapt;
mod assembly;
mod cg;
pub mod dg;
pub mod error;
pub mod estimate;
pub mod fem;
pub mod linsolve;
pub mod mesh;
pub mod norms;
pub mod optctl;
pub mod problems;
pub mod quadrature;
pub mod scheme;
pub mod study;

pub use error::{Error, Result};
