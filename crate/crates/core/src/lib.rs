//! Mixed finite elements for the Maxwell viscoelastic wave model in velocity-stress form
//!
//! ```text
//! rho v_t = div sigma + f,    sigma + sigma_t = C eps(v)    in Omega x [0, T]
//! ```
//!
//! on rectangles, discretized with symmetric H(div)-conforming stresses,
//! discontinuous velocities, and Crank-Nicolson in time.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod assembly;
pub mod cli;
pub mod error;
pub mod fespace;
pub mod linalg;
pub mod material;
pub mod mesh;
pub mod mms;
pub mod quadrature;
pub mod timestepper;

pub use error::{Error, Result};
pub use fespace::{ElementFamily, StressSpace, VelocitySpace};
pub use material::{IsotropicMaterial, VoigtTensor};
pub use mesh::StructuredMesh;
pub use mms::{Example, ExactSolution};
