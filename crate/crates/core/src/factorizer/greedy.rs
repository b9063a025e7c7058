//! Decision-directed greedy solver for the power-of-two sparse recovery
//! problem `min ‖target − L ρ‖` over `ρ ∈ {0, ±2^e}^K` with a support budget.

use crate::error::{mismatch, Error, Result};
use crate::po2::{nearest_in_alphabet, DenseMatrix, QuantizerConfig, ScalarPo2};

/// Sparse coefficient vector produced by the greedy solver.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseColumn {
    /// Length of the coefficient vector (number of basis columns).
    pub len: usize,
    /// Selected `(index, coefficient)` pairs in pick order.
    pub picks: Vec<(usize, ScalarPo2)>,
}

impl SparseColumn {
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.len];
        for &(j, c) in &self.picks {
            v[j] = c.value();
        }
        v
    }
}

/// A basis `L` prepared for repeated greedy solves: column-major copy,
/// squared column norms and the Gram matrix `LᵀL`.
pub struct ColumnSolver {
    n: usize,
    k: usize,
    columns: Vec<f64>,
    norms_sq: Vec<f64>,
    gram: Vec<f64>,
    usable: usize,
}

impl ColumnSolver {
    pub fn new(basis: &DenseMatrix) -> Result<Self> {
        let (n, k) = (basis.rows(), basis.cols());
        let columns: Vec<f64> = basis.transpose().into_data();
        let norms_sq: Vec<f64> = columns
            .chunks_exact(n)
            .map(|c| c.iter().map(|v| v * v).sum())
            .collect();
        let usable = norms_sq.iter().filter(|&&s| s > 0.0).count();
        if usable == 0 {
            return Err(Error::DegenerateBasis);
        }
        let mut gram = vec![0.0; k * k];
        for i in 0..k {
            let ci = &columns[i * n..(i + 1) * n];
            for j in i..k {
                let cj = &columns[j * n..(j + 1) * n];
                let g: f64 = ci.iter().zip(cj).map(|(a, b)| a * b).sum();
                gram[i * k + j] = g;
                gram[j * k + i] = g;
            }
        }
        Ok(ColumnSolver {
            n,
            k,
            columns,
            norms_sq,
            gram,
            usable,
        })
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.k
    }

    /// Picks up to `budget` distinct columns, each fixed to the signed power
    /// of two that lowers the residual norm most given the earlier picks.
    ///
    /// Ties go to the smallest column index. Once no remaining column can
    /// lower the residual, the leftover budget is spent on zero coefficients,
    /// which are not recorded.
    pub fn solve(
        &self,
        target: &[f64],
        budget: usize,
        cfg: &QuantizerConfig,
    ) -> Result<SparseColumn> {
        if target.len() != self.n {
            return Err(mismatch(
                format!("target of length {}", self.n),
                target.len(),
            ));
        }
        if let Some(v) = target.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite target entry {v}")));
        }
        let k = self.k;
        // corr[j] = <residual, l_j>, kept current through the Gram matrix
        let mut corr: Vec<f64> = self
            .columns
            .chunks_exact(self.n)
            .map(|c| c.iter().zip(target).map(|(a, b)| a * b).sum())
            .collect();
        let mut taken = vec![false; k];
        let mut picks = Vec::new();
        for _ in 0..budget.min(self.usable) {
            let mut best: Option<(usize, ScalarPo2, f64)> = None;
            for j in 0..k {
                let nsq = self.norms_sq[j];
                if taken[j] || nsq == 0.0 {
                    continue;
                }
                // the unquantized projection bounds any quantized reduction
                if let Some((_, _, b)) = best {
                    if corr[j] * corr[j] / nsq <= b {
                        continue;
                    }
                }
                let Some(c) = nearest_in_alphabet(corr[j] / nsq, cfg)? else {
                    continue;
                };
                let cv = c.value();
                // ‖r‖² − ‖r − c l_j‖²
                let reduction = cv * (2.0 * corr[j] - cv * nsq);
                if reduction > 0.0 && best.is_none_or(|(_, _, b)| reduction > b) {
                    best = Some((j, c, reduction));
                }
            }
            let Some((j, c, _)) = best else { break };
            taken[j] = true;
            picks.push((j, c));
            let cv = c.value();
            let g = &self.gram[j * k..(j + 1) * k];
            for (r, gj) in corr.iter_mut().zip(g) {
                *r -= cv * gj;
            }
        }
        Ok(SparseColumn { len: k, picks })
    }

    /// `target − L ρ`.
    pub fn residual(&self, target: &[f64], rho: &SparseColumn) -> Vec<f64> {
        let mut r = target.to_vec();
        for &(j, c) in &rho.picks {
            let col = &self.columns[j * self.n..(j + 1) * self.n];
            for (ri, li) in r.iter_mut().zip(col) {
                *ri -= c.apply(*li);
            }
        }
        r
    }
}

/// Greedy power-of-two sparse approximation of a single target vector.
pub fn greedy_sparse_column(
    basis: &DenseMatrix,
    target: &[f64],
    budget: usize,
    cfg: &QuantizerConfig,
) -> Result<SparseColumn> {
    if budget > basis.cols() {
        return Err(Error::InvalidInput(format!(
            "budget {budget} exceeds basis size {}",
            basis.cols()
        )));
    }
    ColumnSolver::new(basis)?.solve(target, budget, cfg)
}
