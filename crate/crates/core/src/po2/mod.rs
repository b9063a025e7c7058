//! Power-of-two scalars and matrices, additive decompositions, and the SNR
//! metric everything else is measured with.

mod additive;
mod matrix;
mod scalar;

pub use additive::{
    improved_additive, standard_additive, sum_terms, BinaryMatrix, BitplaneDecomposition,
};
pub use matrix::{DenseMatrix, Po2Entry, Po2Matrix};
pub use scalar::{pow2, quantize_scalar, scale_pow2, QuantizerConfig, ScalarPo2, Sign};

pub(crate) use scalar::nearest_in_alphabet;

use crate::error::{Error, Result};

/// Entrywise [`quantize_scalar`]; entries that round to zero are dropped.
pub fn quantize_matrix(m: &DenseMatrix, cfg: &QuantizerConfig) -> Result<Po2Matrix> {
    let mut entries = Vec::new();
    for r in 0..m.rows() {
        for (c, &v) in m.row(r).iter().enumerate() {
            if let Some(value) = quantize_scalar(v, cfg)? {
                entries.push(Po2Entry {
                    row: r,
                    col: c,
                    value,
                });
            }
        }
    }
    Po2Matrix::new(m.rows(), m.cols(), entries)
}

/// `10 log10(‖M‖² / ‖M − A‖²)` in dB; `+inf` when `A == M`.
pub fn snr_db(m: &DenseMatrix, a: &DenseMatrix) -> Result<f64> {
    m.check_same_shape(a)?;
    let signal = m.frobenius_sq();
    if signal == 0.0 {
        return Err(Error::Degenerate("SNR of an all-zero matrix".into()));
    }
    let noise: f64 = m
        .data()
        .iter()
        .zip(a.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / noise).log10())
}
