//! Multiplierless application of factorizations and the PO2F file format.

mod format;

pub use format::{deserialize, read_file, serialize, write_file, Encoding, FORMAT_VERSION, MAGIC};

use std::ops::{Add, AddAssign};

use crate::error::{mismatch, Result};
use crate::factorizer::Factorization;
use crate::po2::Po2Matrix;

/// Operation counts of a shift-and-add evaluation.
///
/// `matrix_entries` is the size `N·K` of the matrix being approximated and
/// normalizes the addition count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AdditionLedger {
    pub additions: u64,
    pub shifts: u64,
    pub matrix_entries: u64,
}

impl AdditionLedger {
    /// Additions per entry of the approximated matrix.
    pub fn per_entry(&self) -> f64 {
        if self.matrix_entries == 0 {
            0.0
        } else {
            self.additions as f64 / self.matrix_entries as f64
        }
    }
}

impl Add for AdditionLedger {
    type Output = AdditionLedger;

    fn add(self, rhs: AdditionLedger) -> AdditionLedger {
        AdditionLedger {
            additions: self.additions + rhs.additions,
            shifts: self.shifts + rhs.shifts,
            matrix_entries: self.matrix_entries.max(rhs.matrix_entries),
        }
    }
}

impl AddAssign for AdditionLedger {
    fn add_assign(&mut self, rhs: AdditionLedger) {
        *self = *self + rhs;
    }
}

/// Cost of one product with `f`: a shift per stored entry and
/// `max(0, nnz_i − 1)` additions per row.
pub fn po2_ledger(f: &Po2Matrix) -> AdditionLedger {
    let additions = f
        .row_nnz()
        .into_iter()
        .map(|c| c.saturating_sub(1) as u64)
        .sum();
    AdditionLedger {
        additions,
        shifts: f.nnz() as u64,
        matrix_entries: (f.rows() * f.cols()) as u64,
    }
}

/// Cost of one product with the whole factor chain.
pub fn factorization_ledger(fact: &Factorization) -> AdditionLedger {
    let mut ledger = fact
        .factors()
        .iter()
        .map(po2_ledger)
        .fold(AdditionLedger::default(), Add::add);
    ledger.matrix_entries = (fact.rows() * fact.cols()) as u64;
    ledger
}

/// `y = F x` using only exponent shifts, sign flips and additions.
pub fn apply_po2(f: &Po2Matrix, x: &[f64]) -> Result<(Vec<f64>, AdditionLedger)> {
    if x.len() != f.cols() {
        return Err(mismatch(format!("vector of length {}", f.cols()), x.len()));
    }
    let mut y = vec![0.0; f.rows()];
    let mut ledger = AdditionLedger {
        matrix_entries: (f.rows() * f.cols()) as u64,
        ..AdditionLedger::default()
    };
    for (i, yi) in y.iter_mut().enumerate() {
        let mut terms = f.row_entries(i).iter().map(|e| e.value.apply(x[e.col]));
        if let Some(first) = terms.next() {
            ledger.shifts += 1;
            let mut acc = first;
            for t in terms {
                ledger.shifts += 1;
                ledger.additions += 1;
                acc += t;
            }
            *yi = acc;
        }
    }
    Ok((y, ledger))
}

/// `y = F_1 F_2 ⋯ F_Q x`, evaluated right to left.
pub fn apply_factorization(fact: &Factorization, x: &[f64]) -> Result<(Vec<f64>, AdditionLedger)> {
    if x.len() != fact.cols() {
        return Err(mismatch(
            format!("vector of length {}", fact.cols()),
            x.len(),
        ));
    }
    let mut v = x.to_vec();
    let mut total = AdditionLedger::default();
    for f in fact.factors().iter().rev() {
        let (next, ledger) = apply_po2(f, &v)?;
        total += ledger;
        v = next;
    }
    total.matrix_entries = (fact.rows() * fact.cols()) as u64;
    Ok((v, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::po2::{Po2Entry, ScalarPo2, Sign};

    fn entry(row: usize, col: usize, s: Sign, e: i32) -> Po2Entry {
        Po2Entry {
            row,
            col,
            value: ScalarPo2::new(s, e),
        }
    }

    #[test]
    fn diagonal() {
        let f = Po2Matrix::new(
            2,
            2,
            vec![entry(0, 0, Sign::Plus, 1), entry(1, 1, Sign::Minus, -1)],
        )
        .unwrap();
        let (y, l) = apply_po2(&f, &[1.0, 1.0]).unwrap();
        assert_eq!(y, vec![2.0, -0.5]);
        assert_eq!((l.additions, l.shifts), (0, 2));
    }

    #[test]
    fn row_sum() {
        let f = Po2Matrix::new(
            1,
            2,
            vec![entry(0, 0, Sign::Plus, 0), entry(0, 1, Sign::Plus, 1)],
        )
        .unwrap();
        let (y, l) = apply_po2(&f, &[1.0, 1.0]).unwrap();
        assert_eq!(y, vec![3.0]);
        assert_eq!(l.additions, 1);
        assert_eq!(l, po2_ledger(&f));
    }

    #[test]
    fn empty_and_mismatch() {
        let f = Po2Matrix::empty(3, 2);
        let (y, l) = apply_po2(&f, &[1.0, 2.0]).unwrap();
        assert_eq!(y, vec![0.0; 3]);
        assert_eq!(l.additions, 0);
        assert!(apply_po2(&f, &[1.0]).is_err());
    }
}
