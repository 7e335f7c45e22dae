//! Matrix file formats.
//!
//! * Text: one row per line, whitespace-separated entries written as `a+bi`
//!   (a bare real `a` or imaginary `bi` is accepted on input). Blank lines and
//!   lines starting with `#` are ignored.
//! * Binary: 8-byte little-endian header (`rows: u32`, `cols: u32`) followed
//!   by `rows * cols` row-major `(re, im)` pairs of little-endian `f64`.
//!
//! [`read_matrix`] picks the binary reader for `.bin` files and the text
//! reader otherwise.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i` (exponents allowed).
pub fn parse_complex(token: &str) -> Option<Complex64> {
    let t = token.trim();
    if t.is_empty() {
        return None;
    }
    if let Some(body) = t.strip_suffix(['i', 'j']) {
        // Split at the last sign that is not a leading sign or part of an exponent.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
        let (re_str, im_str) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("", body),
        };
        let im = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            s => s.parse::<f64>().ok()?,
        };
        let re = if re_str.is_empty() { 0.0 } else { re_str.parse::<f64>().ok()? };
        Some(Complex64::new(re, im))
    } else {
        t.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0))
    }
}

/// Shortest round-trip form, always `a+bi` / `a-bi`.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn read_text<R: Read>(reader: R) -> Result<CMat> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                parse_complex(tok).ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad complex entry {tok:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected {} entries, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let ncols = rows[0].len();
    Ok(CMat::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn write_text<W: Write>(mut writer: W, m: &CMat) -> Result<()> {
    for i in 0..m.nrows() {
        let line: Vec<String> = m.row(i).iter().map(|&z| format_complex(z)).collect();
        writeln!(writer, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut reader: R) -> Result<CMat> {
    let mut header = [0u8; 8];
    reader.read_exact(&mut header)?;
    let rows = u32::from_le_bytes(header[0..4].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let mut payload = Vec::new();
    reader.read_to_end(&mut payload)?;
    let expected = rows * cols * 16;
    if payload.len() != expected {
        return Err(Error::Parse {
            line: 0,
            msg: format!("binary payload has {} bytes, header implies {expected}", payload.len()),
        });
    }
    let value = |k: usize| f64::from_le_bytes(payload[8 * k..8 * k + 8].try_into().unwrap());
    Ok(CMat::from_fn(rows, cols, |i, j| {
        let k = 2 * (i * cols + j);
        Complex64::new(value(k), value(k + 1))
    }))
}

pub fn write_binary<W: Write>(mut writer: W, m: &CMat) -> Result<()> {
    let rows = u32::try_from(m.nrows()).map_err(|_| Error::InvalidArgument("too many rows".into()))?;
    let cols = u32::try_from(m.ncols()).map_err(|_| Error::InvalidArgument("too many columns".into()))?;
    writer.write_all(&rows.to_le_bytes())?;
    writer.write_all(&cols.to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            writer.write_all(&z.re.to_le_bytes())?;
            writer.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn is_binary_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("bin"))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<CMat> {
    let path = path.as_ref();
    let file = File::open(path)?;
    if is_binary_path(path) {
        read_binary(BufReader::new(file))
    } else {
        read_text(file)
    }
}

pub fn write_matrix(path: impl AsRef<Path>, m: &CMat) -> Result<()> {
    let path = path.as_ref();
    let mut w = BufWriter::new(File::create(path)?);
    if is_binary_path(path) {
        write_binary(&mut w, m)?;
    } else {
        write_text(&mut w, m)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a vector stored as a single row or a single column.
pub fn read_vector(path: impl AsRef<Path>) -> Result<CVec> {
    let m = read_matrix(path)?;
    if m.ncols() == 1 {
        Ok(m.column(0).into_owned())
    } else if m.nrows() == 1 {
        Ok(m.row(0).transpose())
    } else {
        Err(Error::DimensionMismatch(format!("expected a vector, found {}x{} matrix", m.nrows(), m.ncols())))
    }
}

/// Writes a vector as a single column.
pub fn write_vector(path: impl AsRef<Path>, v: &CVec) -> Result<()> {
    write_matrix(path, &CMat::from_column_slice(v.len(), 1, v.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parses_complex_forms() {
        assert_eq!(parse_complex("1.5+2i"), Some(c(1.5, 2.0)));
        assert_eq!(parse_complex("1.5-2i"), Some(c(1.5, -2.0)));
        assert_eq!(parse_complex("-1e-3+2.5e+2i"), Some(c(-1e-3, 250.0)));
        assert_eq!(parse_complex("3"), Some(c(3.0, 0.0)));
        assert_eq!(parse_complex("-3i"), Some(c(0.0, -3.0)));
        assert_eq!(parse_complex("i"), Some(c(0.0, 1.0)));
        assert_eq!(parse_complex("-i"), Some(c(0.0, -1.0)));
        assert_eq!(parse_complex("2-i"), Some(c(2.0, -1.0)));
        assert_eq!(parse_complex("1e5"), Some(c(1e5, 0.0)));
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex("1+2"), None);
    }

    #[test]
    fn text_rejects_ragged_rows() {
        let src = "1 2\n3\n";
        assert!(matches!(read_text(src.as_bytes()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn binary_header_layout() {
        let m = CMat::from_row_slice(1, 2, &[c(1.0, -2.0), c(0.5, 0.0)]);
        let mut buf = Vec::new();
        write_binary(&mut buf, &m).unwrap();
        assert_eq!(buf.len(), 8 + 2 * 16);
        assert_eq!(&buf[0..4], &1u32.to_le_bytes());
        assert_eq!(&buf[4..8], &2u32.to_le_bytes());
        assert_eq!(&buf[8..16], &1.0f64.to_le_bytes());
        assert_eq!(&buf[16..24], &(-2.0f64).to_le_bytes());
        assert!(read_binary(&buf[..buf.len() - 1]).is_err());
    }

    fn matrix_strategy() -> impl Strategy<Value = CMat> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, k)| {
            prop::collection::vec((any::<f64>(), any::<f64>()), r * k).prop_map(move |v| {
                let clean = |x: f64| if x.is_finite() { x } else { 0.0 };
                CMat::from_fn(r, k, |i, j| {
                    let (a, b) = v[i * k + j];
                    c(clean(a), clean(b))
                })
            })
        })
    }

    proptest! {
        #[test]
        fn text_and_binary_round_trip(m in matrix_strategy()) {
            let mut text = Vec::new();
            write_text(&mut text, &m).unwrap();
            prop_assert_eq!(read_text(text.as_slice()).unwrap(), m.clone());
            let mut bin = Vec::new();
            write_binary(&mut bin, &m).unwrap();
            prop_assert_eq!(read_binary(bin.as_slice()).unwrap(), m);
        }
    }
}
