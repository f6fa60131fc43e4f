//! Complex matrix files.
//!
//! Binary layout (all little-endian): the 8-byte magic `CMATF64\0`, `u64`
//! rows, `u64` columns, then `rows * cols` pairs of `f64` (re, im) in
//! row-major order.
//!
//! Text layout: a header line `rows cols`, then one line per row holding
//! `re im` pairs separated by whitespace. Lines starting with `#` are
//! ignored.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::num::CMatrix;
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"CMATF64\0";

pub fn write_matrix_binary(path: impl AsRef<Path>, m: &CMatrix) -> Result<()> {
    let (rows, cols) = m.shape();
    let mut buf = Vec::with_capacity(24 + 16 * rows * cols);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(rows as u64).to_le_bytes());
    buf.extend_from_slice(&(cols as u64).to_le_bytes());
    for i in 0..rows {
        for j in 0..cols {
            buf.extend_from_slice(&m[(i, j)].re.to_le_bytes());
            buf.extend_from_slice(&m[(i, j)].im.to_le_bytes());
        }
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_matrix_binary(path: impl AsRef<Path>) -> Result<CMatrix> {
    let bytes = fs::read(path)?;
    if bytes.len() < 24 || &bytes[..8] != MAGIC {
        return Err(Error::InvalidParameter("not a complex matrix file".into()));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let rows = word(8) as usize;
    let cols = word(16) as usize;
    if rows == 0 || cols == 0 || bytes.len() != 24 + 16 * rows * cols {
        return Err(Error::InvalidParameter(format!(
            "matrix file size does not match header {rows}x{cols}"
        )));
    }
    let f = |at: usize| f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        let at = 24 + 16 * (i * cols + j);
        Complex64::new(f(at), f(at + 8))
    }))
}

pub fn write_matrix_text(path: impl AsRef<Path>, m: &CMatrix) -> Result<()> {
    let (rows, cols) = m.shape();
    let mut out = fs::File::create(path)?;
    writeln!(out, "{rows} {cols}")?;
    for i in 0..rows {
        let line: Vec<String> = (0..cols)
            .map(|j| format!("{:e} {:e}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_matrix_text(path: impl AsRef<Path>) -> Result<CMatrix> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let bad = |msg: &str| Error::InvalidParameter(format!("matrix text file: {msg}"));
    let header = lines.next().ok_or_else(|| bad("missing header"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad("header is not two integers")))
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(bad("header is not two integers"));
    };
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        let line = lines.next().ok_or_else(|| bad("too few rows"))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("unparsable number")))
            .collect::<Result<_>>()?;
        if vals.len() != 2 * cols {
            return Err(bad("row has the wrong number of entries"));
        }
        for j in 0..cols {
            m[(i, j)] = Complex64::new(vals[2 * j], vals[2 * j + 1]);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{complex_normal, Purpose, SeededRng};

    #[test]
    fn roundtrip_both_formats() {
        let mut r = SeededRng::new(1).stream(0, 0, Purpose::Channel);
        let m = CMatrix::from_fn(3, 5, |_, _| complex_normal(&mut r, 1.0));
        let dir = tempfile::tempdir().unwrap();
        let b = dir.path().join("h.bin");
        write_matrix_binary(&b, &m).unwrap();
        assert_eq!(read_matrix_binary(&b).unwrap(), m);
        assert_eq!(std::fs::metadata(&b).unwrap().len(), 24 + 16 * 15);
        let t = dir.path().join("h.txt");
        write_matrix_text(&t, &m).unwrap();
        assert_eq!(read_matrix_text(&t).unwrap(), m);
    }

    #[test]
    fn rejects_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.bin");
        std::fs::write(&p, b"CMATF64\0\x02\0\0\0\0\0\0\0\x02\0\0\0\0\0\0\0").unwrap();
        assert!(read_matrix_binary(&p).is_err());
    }
}
