//! Sparse storage and the reduced stress-side solver used by the time stepper.

mod block;
mod schur;
mod sparse;

pub use block::{block_diag_inverse, BlockDiagInverse};
pub use schur::{build_schur, SchurSolver, DEFAULT_SOLVER_TOL};
pub use sparse::{SparseMatrix, TripletBuilder};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
