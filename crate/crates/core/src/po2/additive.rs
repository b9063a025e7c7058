//! Additive baselines: binary bitplanes and sums of power-of-two matrices.

use crate::error::{Error, Result};
use crate::po2::matrix::{DenseMatrix, Po2Matrix};
use crate::po2::quantize_matrix;
use crate::po2::scalar::{floor_log2, pow2, QuantizerConfig};

/// Binary matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMatrix {
    pub rows: usize,
    pub cols: usize,
    pub bits: Vec<bool>,
}

/// Sign-magnitude bitplane expansion
/// `signs ⊙ Σ_q 2^(q0 - q) · B_q`, `q = 1..=Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitplaneDecomposition {
    pub q0: i32,
    pub rows: usize,
    pub cols: usize,
    /// `+1` or `-1` per entry; zero entries carry `+1`.
    pub signs: Vec<i8>,
    pub bitplanes: Vec<BinaryMatrix>,
}

impl BitplaneDecomposition {
    pub fn resolution(&self) -> usize {
        self.bitplanes.len()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for (q, plane) in self.bitplanes.iter().enumerate() {
            let w = pow2(self.q0 - q as i32 - 1);
            for (d, &b) in data.iter_mut().zip(&plane.bits) {
                if b {
                    *d += w;
                }
            }
        }
        for (d, &s) in data.iter_mut().zip(&self.signs) {
            *d *= s as f64;
        }
        DenseMatrix::new(self.rows, self.cols, data).expect("bitplane reconstruction is finite")
    }
}

/// Truncated binary expansion of every magnitude with a shared offset `q0`
/// chosen so that all magnitudes are below `2^q0`.
pub fn standard_additive(m: &DenseMatrix, q: usize) -> Result<BitplaneDecomposition> {
    if q == 0 {
        return Err(Error::InvalidInput(
            "resolution Q must be at least 1".into(),
        ));
    }
    let max = m.max_abs();
    if max == 0.0 {
        return Err(Error::Degenerate(
            "all-zero matrix has no bitplane offset".into(),
        ));
    }
    let q0 = floor_log2(max) + 1;
    let (rows, cols) = (m.rows(), m.cols());
    let mut planes = vec![
        BinaryMatrix {
            rows,
            cols,
            bits: vec![false; rows * cols],
        };
        q
    ];
    let mut signs = Vec::with_capacity(rows * cols);
    for (i, &v) in m.data().iter().enumerate() {
        signs.push(if v < 0.0 { -1 } else { 1 });
        // frac in [0, 1); doubling and subtracting are exact in binary
        let mut frac = v.abs() * pow2(-q0);
        for plane in planes.iter_mut() {
            frac *= 2.0;
            if frac >= 1.0 {
                plane.bits[i] = true;
                frac -= 1.0;
            }
        }
    }
    Ok(BitplaneDecomposition {
        q0,
        rows,
        cols,
        signs,
        bitplanes: planes,
    })
}

/// Greedy sum of `Q` power-of-two matrices, each quantizing the residual
/// left by the previous terms.
pub fn improved_additive(
    m: &DenseMatrix,
    q: usize,
    cfg: &QuantizerConfig,
) -> Result<Vec<Po2Matrix>> {
    if q == 0 {
        return Err(Error::InvalidInput(
            "resolution Q must be at least 1".into(),
        ));
    }
    let mut terms = Vec::with_capacity(q);
    let mut residual = m.clone();
    for _ in 0..q {
        let p = quantize_matrix(&residual, cfg)?;
        residual = residual.sub(&p.to_dense())?;
        terms.push(p);
    }
    Ok(terms)
}

/// Dense sum of additive terms.
pub fn sum_terms(terms: &[Po2Matrix]) -> Result<DenseMatrix> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidInput("no terms to sum".into()))?;
    let mut acc = vec![0.0; first.rows() * first.cols()];
    for t in terms {
        if (t.rows(), t.cols()) != (first.rows(), first.cols()) {
            return Err(crate::error::mismatch(
                format!("{}x{}", first.rows(), first.cols()),
                format!("{}x{}", t.rows(), t.cols()),
            ));
        }
        for e in t.entries() {
            acc[e.row * t.cols() + e.col] += e.value.value();
        }
    }
    DenseMatrix::new(first.rows(), first.cols(), acc)
}
