use super::{axpy, dot, norm, BlockDiagInverse, SparseMatrix};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_SOLVER_TOL: f64 = 1e-12;

/// Stress-side Schur complement `S = (1/dt + 1/2) A + (dt/4) B^T C^{-1} B`
/// with a Jacobi-preconditioned conjugate gradient solve.
#[derive(Debug, Clone)]
pub struct SchurSolver {
    matrix: SparseMatrix,
    inv_diag: Vec<f64>,
    dt: f64,
    tol: f64,
}

/// Builds the reduced operator for time step `dt`.
pub fn build_schur(a: &SparseMatrix, b: &SparseMatrix, c_inv: &BlockDiagInverse, dt: f64) -> Result<SchurSolver> {
    SchurSolver::new(a, b, c_inv, dt, DEFAULT_SOLVER_TOL)
}

impl SchurSolver {
    pub fn new(a: &SparseMatrix, b: &SparseMatrix, c_inv: &BlockDiagInverse, dt: f64, tol: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return invalid(format!("time step must be positive, got {dt}"));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return invalid(format!("solver tolerance must lie in (0, 1), got {tol}"));
        }
        let r = a.nrows();
        if a.ncols() != r || b.ncols() != r || b.nrows() != c_inv.dim() {
            return invalid(format!(
                "inconsistent shapes: A {}x{}, B {}x{}, C^-1 {}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c_inv.dim()
            ));
        }
        let cb = c_inv.to_sparse().matmul(b)?;
        let btcb = b.transpose().matmul(&cb)?;
        let matrix = a.linear_combination(1.0 / dt + 0.5, &btcb, 0.25 * dt)?;
        let inv_diag = matrix
            .diagonal()
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                if d > 0.0 {
                    Ok(1.0 / d)
                } else {
                    Err(Error::NumericalSingularity { block: i, reason: format!("nonpositive diagonal {d}") })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { matrix, inv_diag, dt, tol })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.solve_from(rhs, vec![0.0; rhs.len()])
    }

    /// Conjugate gradient started from `x`; stops when `||S x - b|| <= tol ||b||`.
    pub fn solve_from(&self, rhs: &[f64], mut x: Vec<f64>) -> Result<Vec<f64>> {
        let n = self.dim();
        if rhs.len() != n || x.len() != n {
            return invalid(format!("rhs of length {} for system of dimension {n}", rhs.len()));
        }
        let bnorm = norm(rhs);
        if bnorm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let target = self.tol * bnorm;
        let cap = 5 * n.max(1);
        let mut iterations = 0;
        let mut ax = vec![0.0; n];
        loop {
            // (Re)start from the true residual so drift in the recurrence cannot fake convergence.
            self.matrix.mul_vec_into(&x, &mut ax);
            let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let mut rnorm = norm(&r);
            if rnorm <= target {
                return Ok(x);
            }
            if iterations >= cap {
                return Err(Error::ConvergenceFailure { iterations, residual: rnorm / bnorm });
            }
            let mut z: Vec<f64> = r.iter().zip(&self.inv_diag).map(|(a, d)| a * d).collect();
            let mut p = z.clone();
            let mut rz = dot(&r, &z);
            let mut sp = vec![0.0; n];
            while iterations < cap {
                iterations += 1;
                self.matrix.mul_vec_into(&p, &mut sp);
                let psp = dot(&p, &sp);
                if !(psp > 0.0) {
                    return Err(Error::NumericalSingularity {
                        block: 0,
                        reason: "Schur complement is not positive definite".into(),
                    });
                }
                let step = rz / psp;
                axpy(step, &p, &mut x);
                axpy(-step, &sp, &mut r);
                rnorm = norm(&r);
                if rnorm <= 0.5 * target {
                    break;
                }
                for ((zi, ri), d) in z.iter_mut().zip(&r).zip(&self.inv_diag) {
                    *zi = ri * d;
                }
                let rz_new = dot(&r, &z);
                let beta = rz_new / rz;
                rz = rz_new;
                for (pi, zi) in p.iter_mut().zip(&z) {
                    *pi = zi + beta * *pi;
                }
            }
        }
    }
}
