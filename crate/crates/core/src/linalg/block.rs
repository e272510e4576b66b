use nalgebra::DMatrix;

use super::{SparseMatrix, TripletBuilder};
use crate::error::{invalid, Error, Result};

/// Exact inverse of a block-diagonal matrix with equal, contiguous square blocks.
#[derive(Debug, Clone)]
pub struct BlockDiagInverse {
    block_size: usize,
    /// Row-major inverse blocks, `block_size^2` values each.
    blocks: Vec<f64>,
}

/// Inverts each `block_size x block_size` diagonal block of `c`.
///
/// Entries outside the diagonal blocks must be absent or zero. Blocks must be SPD.
pub fn block_diag_inverse(c: &SparseMatrix, block_size: usize) -> Result<BlockDiagInverse> {
    let n = c.nrows();
    if block_size == 0 || c.ncols() != n || !n.is_multiple_of(block_size) {
        return invalid(format!("{}x{} matrix cannot be split into {block_size}-blocks", n, c.ncols()));
    }
    let nb = n / block_size;
    let mut blocks = Vec::with_capacity(nb * block_size * block_size);
    for b in 0..nb {
        let lo = b * block_size;
        let mut m = DMatrix::zeros(block_size, block_size);
        for i in 0..block_size {
            let (cols, vals) = c.row(lo + i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j < lo || j >= lo + block_size {
                    if v != 0.0 {
                        return invalid(format!("entry ({}, {j}) lies outside block {b}", lo + i));
                    }
                    continue;
                }
                m[(i, j - lo)] = v;
            }
        }
        let chol = m.clone().cholesky().ok_or_else(|| Error::NumericalSingularity {
            block: b,
            reason: "block is not positive definite".into(),
        })?;
        let inv = chol.inverse();
        let scale = m.abs().max();
        if !inv.iter().all(|v| v.is_finite()) || inv.abs().max() * scale > 1e14 {
            return Err(Error::NumericalSingularity { block: b, reason: "block is ill-conditioned".into() });
        }
        for i in 0..block_size {
            for j in 0..block_size {
                blocks.push(inv[(i, j)]);
            }
        }
    }
    Ok(BlockDiagInverse { block_size, blocks })
}

impl BlockDiagInverse {
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn dim(&self) -> usize {
        self.blocks.len() / self.block_size
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim(), "block inverse dimension mismatch");
        let k = self.block_size;
        let mut y = vec![0.0; x.len()];
        for (b, (yb, xb)) in y.chunks_mut(k).zip(x.chunks(k)).enumerate() {
            let blk = &self.blocks[b * k * k..(b + 1) * k * k];
            for (i, yi) in yb.iter_mut().enumerate() {
                *yi = blk[i * k..(i + 1) * k].iter().zip(xb).map(|(a, v)| a * v).sum();
            }
        }
        y
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        let k = self.block_size;
        let n = self.dim();
        let mut tb = TripletBuilder::with_capacity(n, n, n * k);
        for b in 0..n / k {
            for i in 0..k {
                for j in 0..k {
                    tb.push(b * k + i, b * k + j, self.blocks[b * k * k + i * k + j]);
                }
            }
        }
        tb.build()
    }
}
