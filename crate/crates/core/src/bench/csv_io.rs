use std::io::{Read, Write};

use crate::bench::{BenchmarkResult, CellResult};
use crate::error::{Error, Result};
use crate::theory::{info_at_aspect, Fig1Marker};

const HEADER: [&str; 8] = [
    "N",
    "K",
    "Q",
    "R",
    "trials",
    "snr_db",
    "stderr_db",
    "adds_per_entry",
];

pub const FIG1_HEADER: [&str; 3] = ["kind", "aspect_ratio", "bits"];

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

/// Writes one row per cell; `R` is written as an exact rational.
pub fn emit_csv<W: Write>(result: &BenchmarkResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER).map_err(csv_err)?;
    for c in &result.cells {
        w.write_record([
            c.n.to_string(),
            c.k.to_string(),
            c.q.to_string(),
            c.rate.to_string(),
            c.trials.to_string(),
            c.mean_snr_db.to_string(),
            c.stderr_db.to_string(),
            c.adds_per_entry.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidInput(format!("csv: {e}")))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CellResult>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(HEADER) {
        return Err(Error::InvalidInput(format!(
            "unexpected csv header {header:?}"
        )));
    }
    let bad = |field: &str, v: &str| Error::InvalidInput(format!("bad {field} value {v:?}"));
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let f = |i: usize| &rec[i];
            Ok(CellResult {
                n: f(0).parse().map_err(|_| bad("N", f(0)))?,
                k: f(1).parse().map_err(|_| bad("K", f(1)))?,
                q: f(2).parse().map_err(|_| bad("Q", f(2)))?,
                rate: f(3).parse()?,
                trials: f(4).parse().map_err(|_| bad("trials", f(4)))?,
                mean_snr_db: f(5).parse().map_err(|_| bad("snr_db", f(5)))?,
                stderr_db: f(6).parse().map_err(|_| bad("stderr_db", f(6)))?,
                adds_per_entry: f(7).parse().map_err(|_| bad("adds_per_entry", f(7)))?,
            })
        })
        .collect()
}

/// `(aspect ratio, bits)` samples of the support-information curve at
/// eight points per octave from 1 up to 10⁴.
pub fn fig1_curve() -> Vec<(f64, f64)> {
    let mut xs: Vec<f64> = (0..)
        .map(|t| 2f64.powf(t as f64 / 8.0))
        .take_while(|&x| x < 1e4)
        .collect();
    xs.push(1e4);
    xs.into_iter().map(|x| (x, info_at_aspect(x))).collect()
}

/// Writes the analytic curve (`kind = curve`) followed by measured markers
/// (`kind = marker`).
pub fn emit_fig1<W: Write>(markers: &[Fig1Marker], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FIG1_HEADER).map_err(csv_err)?;
    for (x, bits) in fig1_curve() {
        w.write_record(["curve".to_string(), x.to_string(), bits.to_string()])
            .map_err(csv_err)?;
    }
    for m in markers {
        w.write_record([
            "marker".to_string(),
            m.aspect_ratio.to_string(),
            m.bits.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidInput(format!("csv: {e}")))
}
