//! Spectral zone control for Dirac-comb periodic potentials.
//!
//! A period cell `[0, π]` carries a δ of strength `V°` at its left edge and a
//! smooth part produced by one of two inverse-problem transforms: shifting a
//! single level of the auxiliary infinite well, or changing the spectral
//! weight of one auxiliary eigenstate. The cell is continued periodically and
//! its band structure and imaginary quasi-momentum are computed from the
//! one-period monodromy matrix.

pub mod auxiliary;
pub mod cell;
pub mod error;
pub mod floquet;
pub mod ode;
pub mod roots;
pub mod shooting;
pub mod sweep;
pub mod transforms;

pub use cell::{BandStructure, CellPotential, Gap, SmoothPart, TransformSpec, WeightAnchorSpec, Zone};
pub use error::{Error, Result};
pub use floquet::{ForbiddennessCurve, MonodromyMatrix};
