//! Plain-text matrices: a first line `N K`, then `N` lines of `K` reals.

use anyhow::{bail, Context, Result};
use sparse_po2::DenseMatrix;

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, dims) = lines.next().context("empty matrix file")?;
    let dims: Vec<&str> = dims.split_whitespace().collect();
    let [n, k] = dims[..] else {
        bail!("first line must be `N K`, found {:?}", dims.join(" "));
    };
    let n: usize = n.parse().with_context(|| format!("bad row count {n:?}"))?;
    let k: usize = k
        .parse()
        .with_context(|| format!("bad column count {k:?}"))?;

    let mut data = Vec::with_capacity(n * k);
    for (idx, line) in lines {
        let row = data.len() / k.max(1);
        if row == n {
            bail!("line {}: more than {n} rows", idx + 1);
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .with_context(|| format!("line {}: bad number {tok:?}", idx + 1))?;
            data.push(v);
        }
        if data.len() - before != k {
            bail!(
                "line {}: expected {k} values, found {}",
                idx + 1,
                data.len() - before
            );
        }
    }
    if data.len() != n * k {
        bail!("expected {n} rows, found {}", data.len() / k.max(1));
    }
    Ok(DenseMatrix::new(n, k, data)?)
}

pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(f64::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Whitespace-separated reals, on any number of lines.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|tok| tok.parse().with_context(|| format!("bad number {tok:?}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let m = DenseMatrix::from_rows(&[vec![1.5, -2.0, 0.1], vec![1e-300, 3.0, -0.0]]).unwrap();
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn blank_lines_are_skipped() {
        let m = parse_matrix("\n1 2\n\n  3 4 \n").unwrap();
        assert_eq!(m.data(), &[3.0, 4.0]);
    }

    #[test]
    fn shape_errors() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("2\n1 2\n").is_err());
        assert!(parse_matrix("2 2\n1 2\n").is_err());
        assert!(parse_matrix("1 2\n1 2 3\n").is_err());
        assert!(parse_matrix("1 2\n1 2\n3 4\n").is_err());
        assert!(parse_matrix("1 2\n1 x\n").is_err());
        assert!(parse_matrix("1 1\nNaN\n").is_err());
    }

    #[test]
    fn vectors() {
        assert_eq!(parse_vector("1 2\n-3.5\n").unwrap(), vec![1.0, 2.0, -3.5]);
        assert!(parse_vector("1 two").is_err());
    }
}
