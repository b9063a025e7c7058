//! PO2F: the on-disk form of a [`Factorization`].
//!
//! Every file starts with a six byte preamble: the magic `PO2F`, a version
//! byte (currently `1`) and an encoding byte, `B` for binary or `T` for text.
//! Both encodings carry the same fields in the same order.
//!
//! Binary body, all integers little-endian:
//!
//! ```text
//! rows u32 | cols u32 | factors u32 | rate_num u32 | rate_den u32
//! column_budget u32 (0 = default) | e_min i32 | e_max i32 | seed u64
//! per factor: rows u32 | cols u32 | nnz u32
//!             nnz × (row u32 | col u32 | sign i8 | exponent i32)
//! ```
//!
//! Text body, a newline right after the preamble and then:
//!
//! ```text
//! header <rows> <cols> <factors> <rate_num> <rate_den> <column_budget> <e_min> <e_max> <seed>
//! factor <rows> <cols> <nnz>
//! <row> <col> <sign> <exponent>      (nnz lines, sign is 1 or -1)
//! ```
//!
//! Entries are stored sorted by `(row, col)`; readers reject anything else.

use std::path::Path;

use crate::error::{Error, FormatError, Result};
use crate::factorizer::{FactorConfig, Factorization};
use crate::po2::{Po2Entry, Po2Matrix, QuantizerConfig, ScalarPo2, Sign};
use crate::rate::Rate;

pub const MAGIC: &[u8; 4] = b"PO2F";
pub const FORMAT_VERSION: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Binary,
    Text,
}

impl Encoding {
    /// Encoding named by a PO2F preamble, or `None` if `bytes` do not start
    /// with one.
    pub fn detect(bytes: &[u8]) -> Option<Encoding> {
        if bytes.len() < 6 || &bytes[..4] != MAGIC {
            return None;
        }
        match bytes[5] {
            b'B' => Some(Encoding::Binary),
            b'T' => Some(Encoding::Text),
            _ => None,
        }
    }

    fn flag(self) -> u8 {
        match self {
            Encoding::Binary => b'B',
            Encoding::Text => b'T',
        }
    }
}

/// Header fields shared by both encodings.
struct Header {
    rows: u32,
    cols: u32,
    factors: u32,
    rate_num: u32,
    rate_den: u32,
    column_budget: u32,
    e_min: i32,
    e_max: i32,
    seed: u64,
}

struct RawEntry {
    row: u32,
    col: u32,
    sign: i8,
    exponent: i32,
}

struct RawFactor {
    rows: u32,
    cols: u32,
    entries: Vec<RawEntry>,
}

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::InvalidInput(format!("{what} {v} does not fit in 32 bits")))
}

fn header_of(fact: &Factorization) -> Result<Header> {
    let cfg = fact.config();
    Ok(Header {
        rows: to_u32(fact.rows(), "row count")?,
        cols: to_u32(fact.cols(), "column count")?,
        factors: to_u32(fact.factors().len(), "factor count")?,
        rate_num: cfg.rate.num(),
        rate_den: cfg.rate.den(),
        column_budget: to_u32(cfg.column_budget.unwrap_or(0), "column budget")?,
        e_min: cfg.quantizer.e_min,
        e_max: cfg.quantizer.e_max,
        seed: cfg.seed,
    })
}

/// Encodes a factorization as PO2F bytes.
pub fn serialize(fact: &Factorization, encoding: Encoding) -> Result<Vec<u8>> {
    let h = header_of(fact)?;
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(FORMAT_VERSION);
    out.push(encoding.flag());
    match encoding {
        Encoding::Binary => {
            for v in [
                h.rows,
                h.cols,
                h.factors,
                h.rate_num,
                h.rate_den,
                h.column_budget,
            ] {
                out.extend_from_slice(&v.to_le_bytes());
            }
            out.extend_from_slice(&h.e_min.to_le_bytes());
            out.extend_from_slice(&h.e_max.to_le_bytes());
            out.extend_from_slice(&h.seed.to_le_bytes());
            for f in fact.factors() {
                for v in [f.rows(), f.cols(), f.nnz()] {
                    out.extend_from_slice(&to_u32(v, "factor size")?.to_le_bytes());
                }
                for e in f.entries() {
                    out.extend_from_slice(&(e.row as u32).to_le_bytes());
                    out.extend_from_slice(&(e.col as u32).to_le_bytes());
                    out.push(e.value.sign.as_i8() as u8);
                    out.extend_from_slice(&e.value.exponent.to_le_bytes());
                }
            }
        }
        Encoding::Text => {
            let mut s = format!(
                "\nheader {} {} {} {} {} {} {} {} {}\n",
                h.rows,
                h.cols,
                h.factors,
                h.rate_num,
                h.rate_den,
                h.column_budget,
                h.e_min,
                h.e_max,
                h.seed
            );
            for f in fact.factors() {
                s.push_str(&format!("factor {} {} {}\n", f.rows(), f.cols(), f.nnz()));
                for e in f.entries() {
                    s.push_str(&format!(
                        "{} {} {} {}\n",
                        e.row,
                        e.col,
                        e.value.sign.as_i8(),
                        e.value.exponent
                    ));
                }
            }
            out.extend_from_slice(s.as_bytes());
        }
    }
    Ok(out)
}

struct BinReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl BinReader<'_> {
    fn take<const W: usize>(&mut self, what: &str) -> Result<[u8; W], FormatError> {
        let end = self.pos + W;
        let slice = self.bytes.get(self.pos..end).ok_or_else(|| {
            FormatError::Truncated(format!("{what} at byte {} needs {W} bytes", self.pos))
        })?;
        self.pos = end;
        Ok(slice.try_into().expect("slice has length W"))
    }

    fn u32(&mut self, what: &str) -> Result<u32, FormatError> {
        self.take::<4>(what).map(u32::from_le_bytes)
    }

    fn i32(&mut self, what: &str) -> Result<i32, FormatError> {
        self.take::<4>(what).map(i32::from_le_bytes)
    }
}

fn parse_binary(body: &[u8]) -> Result<(Header, Vec<RawFactor>), FormatError> {
    let mut r = BinReader {
        bytes: body,
        pos: 0,
    };
    let header = Header {
        rows: r.u32("rows")?,
        cols: r.u32("cols")?,
        factors: r.u32("factor count")?,
        rate_num: r.u32("rate numerator")?,
        rate_den: r.u32("rate denominator")?,
        column_budget: r.u32("column budget")?,
        e_min: r.i32("e_min")?,
        e_max: r.i32("e_max")?,
        seed: u64::from_le_bytes(r.take::<8>("seed")?),
    };
    let mut factors = Vec::new();
    for _ in 0..header.factors {
        let rows = r.u32("factor rows")?;
        let cols = r.u32("factor cols")?;
        let nnz = r.u32("factor nnz")?;
        // 13 bytes per entry; refuse to allocate for counts the input cannot hold
        if (nnz as usize).saturating_mul(13) > body.len() - r.pos {
            return Err(FormatError::Truncated(format!(
                "factor declares {nnz} entries but only {} bytes remain",
                body.len() - r.pos
            )));
        }
        let mut entries = Vec::with_capacity(nnz as usize);
        for _ in 0..nnz {
            entries.push(RawEntry {
                row: r.u32("entry row")?,
                col: r.u32("entry col")?,
                sign: r.take::<1>("entry sign")?[0] as i8,
                exponent: r.i32("entry exponent")?,
            });
        }
        factors.push(RawFactor {
            rows,
            cols,
            entries,
        });
    }
    if r.pos != body.len() {
        return Err(FormatError::Malformed(format!(
            "{} trailing bytes",
            body.len() - r.pos
        )));
    }
    Ok((header, factors))
}

fn parse_text(body: &[u8]) -> Result<(Header, Vec<RawFactor>), FormatError> {
    let text = std::str::from_utf8(body)
        .map_err(|e| FormatError::Malformed(format!("text body is not UTF-8: {e}")))?;
    let text = text
        .strip_prefix('\n')
        .ok_or_else(|| FormatError::Malformed("missing newline after preamble".into()))?;
    let mut lines = text.lines().enumerate();
    let mut next_fields = |what: &str, tag: Option<&str>, count: usize| {
        let (no, line) = lines
            .next()
            .ok_or_else(|| FormatError::Truncated(format!("missing {what} line")))?;
        let mut fields: Vec<&str> = line.split_whitespace().collect();
        if let Some(tag) = tag {
            if fields.first() != Some(&tag) {
                return Err(FormatError::Malformed(format!(
                    "line {}: expected {tag:?} record",
                    no + 2
                )));
            }
            fields.remove(0);
        }
        if fields.len() != count {
            return Err(FormatError::Malformed(format!(
                "line {}: {what} needs {count} fields, found {}",
                no + 2,
                fields.len()
            )));
        }
        Ok((
            no + 2,
            fields.into_iter().map(str::to_owned).collect::<Vec<_>>(),
        ))
    };
    fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, FormatError> {
        s.parse()
            .map_err(|_| FormatError::Malformed(format!("line {line}: bad number {s:?}")))
    }

    let (ln, f) = next_fields("header", Some("header"), 9)?;
    let header = Header {
        rows: num(ln, &f[0])?,
        cols: num(ln, &f[1])?,
        factors: num(ln, &f[2])?,
        rate_num: num(ln, &f[3])?,
        rate_den: num(ln, &f[4])?,
        column_budget: num(ln, &f[5])?,
        e_min: num(ln, &f[6])?,
        e_max: num(ln, &f[7])?,
        seed: num(ln, &f[8])?,
    };
    let mut factors = Vec::new();
    for _ in 0..header.factors {
        let (ln, f) = next_fields("factor", Some("factor"), 3)?;
        let rows = num(ln, &f[0])?;
        let cols = num(ln, &f[1])?;
        let nnz: u32 = num(ln, &f[2])?;
        let mut entries = Vec::new();
        for _ in 0..nnz {
            let (ln, f) = next_fields("entry", None, 4)?;
            entries.push(RawEntry {
                row: num(ln, &f[0])?,
                col: num(ln, &f[1])?,
                sign: num(ln, &f[2])?,
                exponent: num(ln, &f[3])?,
            });
        }
        factors.push(RawFactor {
            rows,
            cols,
            entries,
        });
    }
    if let Some((no, line)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(FormatError::Malformed(format!(
            "line {}: unexpected trailing content {line:?}",
            no + 2
        )));
    }
    Ok((header, factors))
}

fn build(header: Header, raw: Vec<RawFactor>) -> Result<Factorization> {
    let rate = Rate::new(header.rate_num, header.rate_den)?;
    let config = FactorConfig {
        factors: header.factors as usize,
        rate,
        column_budget: (header.column_budget != 0).then_some(header.column_budget as usize),
        quantizer: QuantizerConfig {
            e_min: header.e_min,
            e_max: header.e_max,
        },
        seed: header.seed,
    };
    let mut factors = Vec::with_capacity(raw.len());
    for (q, f) in raw.into_iter().enumerate() {
        let want = if q == 0 {
            (header.rows, header.cols)
        } else {
            (header.cols, header.cols)
        };
        if (f.rows, f.cols) != want {
            return Err(FormatError::Malformed(format!(
                "factor {} is {}x{}, expected {}x{}",
                q + 1,
                f.rows,
                f.cols,
                want.0,
                want.1
            ))
            .into());
        }
        let mut prev: Option<(u32, u32)> = None;
        let mut entries = Vec::with_capacity(f.entries.len());
        for e in f.entries {
            if e.row >= f.rows {
                return Err(FormatError::IndexOutOfRange {
                    what: "row",
                    index: e.row as u64,
                    bound: f.rows as u64,
                }
                .into());
            }
            if e.col >= f.cols {
                return Err(FormatError::IndexOutOfRange {
                    what: "col",
                    index: e.col as u64,
                    bound: f.cols as u64,
                }
                .into());
            }
            if prev.is_some_and(|p| p >= (e.row, e.col)) {
                return Err(FormatError::Malformed(format!(
                    "factor {}: entry ({}, {}) out of order or duplicated",
                    q + 1,
                    e.row,
                    e.col
                ))
                .into());
            }
            prev = Some((e.row, e.col));
            let sign = Sign::from_i8(e.sign)
                .ok_or_else(|| FormatError::Malformed(format!("sign {} is not 1 or -1", e.sign)))?;
            entries.push(Po2Entry {
                row: e.row as usize,
                col: e.col as usize,
                value: ScalarPo2::new(sign, e.exponent),
            });
        }
        factors.push(Po2Matrix::new(f.rows as usize, f.cols as usize, entries)?);
    }
    Factorization::new(header.rows as usize, header.cols as usize, factors, config)
}

/// Decodes PO2F bytes in either encoding.
pub fn deserialize(bytes: &[u8]) -> Result<Factorization> {
    if bytes.len() < MAGIC.len() || &bytes[..4] != MAGIC {
        return Err(FormatError::BadMagic(bytes.iter().take(4).copied().collect()).into());
    }
    let version = *bytes
        .get(4)
        .ok_or_else(|| FormatError::Truncated("missing version byte".into()))?;
    if version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(version).into());
    }
    let flag = *bytes
        .get(5)
        .ok_or_else(|| FormatError::Truncated("missing encoding byte".into()))?;
    let body = &bytes[6..];
    let (header, raw) = match flag {
        b'B' => parse_binary(body)?,
        b'T' => parse_text(body)?,
        other => return Err(FormatError::UnknownEncoding(other).into()),
    };
    build(header, raw)
}

pub fn write_file(path: impl AsRef<Path>, fact: &Factorization, encoding: Encoding) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, serialize(fact, encoding)?)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

pub fn read_file(path: impl AsRef<Path>) -> Result<Factorization> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    deserialize(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Factorization {
        let f1 = Po2Matrix::new(
            1,
            2,
            vec![Po2Entry {
                row: 0,
                col: 1,
                value: ScalarPo2::new(Sign::Minus, -3),
            }],
        )
        .unwrap();
        let f2 = Po2Matrix::identity(2);
        let mut cfg = FactorConfig::new(2, Rate::new(1, 2).unwrap());
        cfg.seed = 0xdead_beef_0bad_cafe;
        Factorization::new(1, 2, vec![f1, f2], cfg).unwrap()
    }

    #[test]
    fn text_layout() {
        let bytes = serialize(&sample(), Encoding::Text).unwrap();
        let text = String::from_utf8(bytes[6..].to_vec()).unwrap();
        assert_eq!(
            text,
            "\nheader 1 2 2 1 2 0 -126 127 16045690981293345534\n\
             factor 1 2 1\n0 1 -1 -3\n\
             factor 2 2 2\n0 0 1 0\n1 1 1 0\n"
        );
    }

    #[test]
    fn detects_encoding() {
        for enc in [Encoding::Binary, Encoding::Text] {
            assert_eq!(
                Encoding::detect(&serialize(&sample(), enc).unwrap()),
                Some(enc)
            );
        }
        assert_eq!(Encoding::detect(b"PO2F\x01X"), None);
        assert_eq!(Encoding::detect(b"PO2"), None);
    }

    #[test]
    fn binary_layout() {
        let bytes = serialize(&sample(), Encoding::Binary).unwrap();
        assert_eq!(&bytes[..6], b"PO2F\x01B");
        // preamble + 40 byte header + 2 factor headers + 3 entries
        assert_eq!(bytes.len(), 6 + 40 + 2 * 12 + 3 * 13);
        assert_eq!(&bytes[6..10], &1u32.to_le_bytes());
    }

    #[test]
    fn both_encodings_roundtrip() {
        for enc in [Encoding::Binary, Encoding::Text] {
            let bytes = serialize(&sample(), enc).unwrap();
            assert_eq!(deserialize(&bytes).unwrap(), sample());
        }
    }

    #[test]
    fn error_kinds() {
        let good = serialize(&sample(), Encoding::Binary).unwrap();

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(
            deserialize(&bad),
            Err(Error::Format(FormatError::BadMagic(_)))
        ));

        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(
            deserialize(&bad),
            Err(Error::Format(FormatError::UnsupportedVersion(2)))
        ));

        let mut bad = good.clone();
        bad[5] = b'Z';
        assert!(matches!(
            deserialize(&bad),
            Err(Error::Format(FormatError::UnknownEncoding(b'Z')))
        ));

        let cut = &good[..good.len() - 3];
        assert!(matches!(
            deserialize(cut),
            Err(Error::Format(FormatError::Truncated(_)))
        ));

        // first entry of factor 1 sits after preamble, header and factor header
        let col_at = 6 + 40 + 12 + 4;
        let mut bad = good.clone();
        bad[col_at..col_at + 4].copy_from_slice(&7u32.to_le_bytes());
        assert!(matches!(
            deserialize(&bad),
            Err(Error::Format(FormatError::IndexOutOfRange {
                what: "col",
                index: 7,
                bound: 2
            }))
        ));

        let mut bad = good.clone();
        bad.push(0);
        assert!(matches!(
            deserialize(&bad),
            Err(Error::Format(FormatError::Malformed(_)))
        ));
    }

    #[test]
    fn text_errors() {
        let text = serialize(&sample(), Encoding::Text).unwrap();
        let s = String::from_utf8(text).unwrap();
        let bad = s.replace("0 1 -1 -3", "0 5 -1 -3");
        assert!(matches!(
            deserialize(bad.as_bytes()),
            Err(Error::Format(FormatError::IndexOutOfRange {
                what: "col",
                ..
            }))
        ));
        let bad = s.replace("0 1 -1 -3", "0 1 2 -3");
        assert!(matches!(
            deserialize(bad.as_bytes()),
            Err(Error::Format(FormatError::Malformed(_)))
        ));
        let cut = &s[..s.len() - 8];
        assert!(matches!(
            deserialize(cut.as_bytes()),
            Err(Error::Format(FormatError::Truncated(_)))
        ));
    }
}
