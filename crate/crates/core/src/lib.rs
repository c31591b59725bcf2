//! Steady corotating and counter-rotating vortex-patch pairs for the Euler and
//! generalized SQG equations, computed by Newton continuation in the patch size.

pub mod boundary;
pub mod error;
pub mod functionals;
pub mod integrals;
pub mod io;
pub mod linearization;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod validation;

pub use num_complex::Complex64;
pub use boundary::{AmplitudeRule, BoundaryCoefficients, CircleGrid, Model};
pub use error::{Error, Result};
pub use io::SolutionFile;
pub use functionals::{PairKind, ProblemSpec, ResidualVector, Velocity, VelocityKind};
pub use linearization::JacobianMatrix;
pub use solver::{Branch, ContinuationOptions, NewtonOptions, PairSolution};
pub use special::MultiplierTable;
pub use validation::{Thresholds, ValidationReport};
