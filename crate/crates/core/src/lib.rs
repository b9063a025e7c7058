//! Sparse power-of-two matrix factorization.
//!
//! A real `N×K` matrix `M` is approximated by a product
//! `F_1 F_2 ⋯ F_Q` of sparse matrices whose nonzero entries are signed
//! powers of two. Multiplying a vector by such a product needs only
//! register shifts and additions, and for wide blocks (`N ≈ log2 K`) the
//! approximation SNR grows by far more than the 6 dB per bit of plain
//! fixed-point rounding.
//!
//! Modules:
//!
//! * [`po2`]: power-of-two rounding, dense and sparse matrices, the
//!   additive baselines and the SNR metric.
//! * [`factorizer`]: the greedy multiplicative factorization, sparsification
//!   and row-block planning.
//! * [`engine`]: shift-and-add evaluation with operation counting and the
//!   PO2F file format.
//! * [`theory`]: analytic predictions (support information, correlation
//!   extremes, the per-nonzero SNR factor, collision bound).
//! * [`bench`]: reproducible Monte Carlo SNR tables.
//!
//! ```
//! use sparse_po2::{bench::gen_gaussian, factorize, snr_db, FactorConfig, Rate};
//!
//! let m = gen_gaussian(4, 16, 1);
//! let fact = factorize(&m, &FactorConfig::new(3, Rate::ONE)).unwrap();
//! let snr = snr_db(&m, &fact.reconstruct()).unwrap();
//! assert!(snr > 25.0);
//! ```

pub mod bench;
pub mod engine;
pub mod error;
pub mod factorizer;
pub mod po2;
pub mod rate;
pub mod reference;
pub mod seed;
pub mod theory;

pub use engine::{apply_factorization, apply_po2, AdditionLedger};
pub use error::{Error, FormatError, Result};
pub use factorizer::{factorize, factorize_blocked, FactorConfig, Factorization};
pub use po2::{quantize_matrix, snr_db, DenseMatrix, Po2Matrix, QuantizerConfig, ScalarPo2};
pub use rate::Rate;

// Book chapters and the README are compiled as doctests so their snippets
// stay current.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/quantization.md")]
    mod quantization {}
    #[doc = include_str!("../../../book/src/factorization.md")]
    mod factorization {}
    #[doc = include_str!("../../../book/src/engine.md")]
    mod engine {}
    #[doc = include_str!("../../../book/src/theory.md")]
    mod theory {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
