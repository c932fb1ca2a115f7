//! Exact lattice-polytope geometry, sublattice interior points, the jump
//! ascent for deep points, and a certified lower-bound prover for the
//! smallest achievable barycentric depth, with an exact rational MILP solver
//! underneath.
//!
//! Geometry kernels and the LP/MILP solver are generic over [`Scalar`];
//! anything that certifies a bound is instantiated with [`Rational`].

pub mod bounds;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod jump;
pub mod lattice;
pub mod linalg;
pub mod milp;
pub mod prover;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Rational = num_rational::BigRational;
pub type Integer = num_bigint::BigInt;

pub type RationalPoint = geometry::Point<Rational>;
pub type Problem = milp::MilpProblem<Rational>;
pub type Solution = milp::MilpSolution<Rational>;
pub type FloatProblem = milp::MilpProblem<f64>;
