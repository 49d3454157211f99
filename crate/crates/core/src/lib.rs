//! Large regular simplices centred at the origin inside the unit cube
//! `[-1/2, 1/2]^n`.
//!
//! A regular `n`-simplex with barycenter at the origin corresponds to an
//! orthogonal `(n+1) × (n+1)` matrix whose first column is constant; the
//! smaller the largest entry of that matrix, the longer the edge of the
//! simplex that fits in the cube. The crate builds such matrices from
//! Hadamard matrices, a cosine/sine construction, Kronecker doubling and a
//! one-step dimension reduction, picks the best chain per dimension, and
//! verifies the resulting coordinates independently.
//!
//! Module map:
//!
//! * [`matrix`]: dense matrices, max-norm, Kronecker products.
//! * [`hadamard`]: Sylvester/Paley generation, order registry.
//! * [`ohat`]: constructions and transformations of `Ô_n` members.
//! * [`simplex`]: vertex extraction and the geometric verifier.
//! * [`bounds`]: closed-form lower and upper bounds.
//! * [`planner`]: per-dimension search over construction chains.
//! * [`cli`]: the `regsimplex` command-line front end.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod hadamard;
pub mod matrix;
pub mod ohat;
pub mod planner;
pub mod simplex;

pub use error::{Error, Result};
pub use hadamard::HadamardMatrix;
pub use matrix::{Matrix, NormValue};
pub use ohat::{OhatMatrix, PhaseChoice, PivotMode};
pub use planner::{ConstructionPlan, PlanConfig, Planner};
pub use simplex::{SimplexEmbedding, Tolerances, VerificationReport};
