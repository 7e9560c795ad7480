use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) const MATRIX_MAGIC: &[u8; 4] = b"SWDM";
const FLAG_SYMMETRIC: u32 = 1;
const CSV_LIMIT: usize = 2000;

/// Dense row-major `f32` distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    rows: usize,
    cols: usize,
    symmetric: bool,
    values: Vec<f32>,
}

impl DistanceMatrix {
    /// Allocates a zeroed matrix, reporting the byte count when the
    /// allocation cannot be satisfied.
    pub fn try_zeros(rows: usize, cols: usize, symmetric: bool) -> Result<Self> {
        let capacity = || Error::Capacity {
            rows,
            cols,
            bytes: rows as u128 * cols as u128 * 4,
        };
        if symmetric && rows != cols {
            return Err(Error::Argument(format!("symmetric matrix must be square, got {rows}x{cols}")));
        }
        if u32::try_from(rows).is_err() || u32::try_from(cols).is_err() {
            return Err(capacity());
        }
        let len = rows.checked_mul(cols).ok_or_else(capacity)?;
        len.checked_mul(4).filter(|&b| b <= isize::MAX as usize).ok_or_else(capacity)?;
        let mut values = Vec::new();
        values.try_reserve_exact(len).map_err(|_| capacity())?;
        values.resize(len, 0.0);
        Ok(DistanceMatrix {
            rows,
            cols,
            symmetric,
            values,
        })
    }

    /// Wraps row-major values, checking shape, range and (when requested)
    /// symmetry with a zero diagonal.
    pub fn from_values(rows: usize, cols: usize, symmetric: bool, values: Vec<f32>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                actual: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Format(format!("distance {v} outside [0, 1]")));
        }
        let m = DistanceMatrix {
            rows,
            cols,
            symmetric,
            values,
        };
        if symmetric {
            m.check_symmetric()?;
        }
        Ok(m)
    }

    pub fn check_symmetric(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::Argument(format!("matrix is {}x{}, not square", self.rows, self.cols)));
        }
        for i in 0..self.rows {
            if self.get(i, i) != 0.0 {
                return Err(Error::Argument(format!("nonzero diagonal at {i}")));
            }
            for j in 0..i {
                if self.get(i, j) != self.get(j, i) {
                    return Err(Error::Argument(format!("asymmetric entry at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f32 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f32> {
        self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f32] {
        &mut self.values
    }

    /// Little-endian bytes of the values, for byte-level comparisons.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }
}

pub(crate) fn write_block<W: Write>(mut w: W, rows: usize, cols: usize, flags: u32, values: &[f32]) -> Result<()> {
    let to_u32 = |n: usize| u32::try_from(n).map_err(|_| Error::Format(format!("dimension {n} exceeds u32")));
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&to_u32(rows)?.to_le_bytes())?;
    w.write_all(&to_u32(cols)?.to_le_bytes())?;
    w.write_all(&flags.to_le_bytes())?;
    let mut buf = Vec::with_capacity(cols * 4);
    for row in values.chunks(cols.max(1)) {
        buf.clear();
        for v in row {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn read_block<R: Read>(mut r: R) -> Result<(usize, usize, u32, Vec<f32>)> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)
        .map_err(|_| Error::Format("truncated matrix header".into()))?;
    if &header[..4] != MATRIX_MAGIC {
        return Err(Error::Format("bad matrix magic".into()));
    }
    let word = |k: usize| u32::from_le_bytes(header[4 * k..4 * k + 4].try_into().unwrap());
    let (rows, cols, flags) = (word(1) as usize, word(2) as usize, word(3));
    let len = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Format("matrix dimensions overflow".into()))?;
    let mut bytes = Vec::new();
    r.take(len as u64 * 4).read_to_end(&mut bytes)?;
    if bytes.len() != len * 4 {
        return Err(Error::Format(format!(
            "matrix body truncated: expected {} bytes, found {}",
            len * 4,
            bytes.len()
        )));
    }
    let values = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((rows, cols, flags, values))
}

/// Writes the `SWDM` binary layout: magic, `u32` rows, cols and flags
/// (bit 0 = symmetric), then row-major little-endian `f32` values.
pub fn write_matrix<W: Write>(w: W, m: &DistanceMatrix) -> Result<()> {
    let flags = if m.symmetric { FLAG_SYMMETRIC } else { 0 };
    write_block(w, m.rows, m.cols, flags, &m.values)
}

pub fn read_matrix<R: Read>(r: R) -> Result<DistanceMatrix> {
    let (rows, cols, flags, values) = read_block(r)?;
    DistanceMatrix::from_values(rows, cols, flags & FLAG_SYMMETRIC != 0, values)
}

pub fn write_matrix_file(path: &Path, m: &DistanceMatrix) -> Result<()> {
    write_matrix(BufWriter::new(File::create(path)?), m)
}

pub fn read_matrix_file(path: &Path) -> Result<DistanceMatrix> {
    read_matrix(BufReader::new(File::open(path)?))
}

/// Plain comma-separated export, limited to 2000x2000.
pub fn write_matrix_csv<W: Write>(mut w: W, m: &DistanceMatrix) -> Result<()> {
    if m.rows > CSV_LIMIT || m.cols > CSV_LIMIT {
        return Err(Error::Argument(format!(
            "CSV export is limited to {CSV_LIMIT}x{CSV_LIMIT}, matrix is {}x{}",
            m.rows, m.cols
        )));
    }
    for i in 0..m.rows {
        let line: Vec<String> = m.row(i).iter().map(f32::to_string).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let m = DistanceMatrix::from_values(1, 2, false, vec![0.5, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        assert_eq!(&buf[..4], b"SWDM");
        assert_eq!(&buf[4..16], &[1, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(&buf[16..20], &0.5f32.to_le_bytes());
        assert_eq!(buf.len(), 24);
    }

    #[test]
    fn truncated_body_is_format_error() {
        let m = DistanceMatrix::from_values(2, 2, true, vec![0.0, 0.3, 0.3, 0.0]).unwrap();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        assert!(matches!(read_matrix(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        assert!(matches!(read_matrix(&buf[..10]), Err(Error::Format(_))));
        assert_eq!(read_matrix(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn rejects_asymmetric_or_out_of_range() {
        assert!(DistanceMatrix::from_values(2, 2, true, vec![0.0, 0.3, 0.2, 0.0]).is_err());
        assert!(DistanceMatrix::from_values(2, 2, true, vec![0.1, 0.3, 0.3, 0.0]).is_err());
        assert!(DistanceMatrix::from_values(1, 1, false, vec![1.5]).is_err());
    }

    #[test]
    fn oversized_allocation_reports_bytes() {
        match DistanceMatrix::try_zeros(u32::MAX as usize, u32::MAX as usize, true) {
            Err(Error::Capacity { bytes, .. }) => assert_eq!(bytes, (u32::MAX as u128).pow(2) * 4),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn csv_export() {
        let m = DistanceMatrix::from_values(2, 2, true, vec![0.0, 0.25, 0.25, 0.0]).unwrap();
        let mut out = Vec::new();
        write_matrix_csv(&mut out, &m).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0,0.25\n0.25,0\n");
        let big = DistanceMatrix::try_zeros(1, 2001, false).unwrap();
        assert!(write_matrix_csv(Vec::new(), &big).is_err());
    }

    proptest! {
        #[test]
        fn binary_roundtrip(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
            let values: Vec<f32> = (0..rows * cols)
                .map(|k| ((seed.wrapping_mul(k as u64 + 1) % 1000) as f32) / 1000.0)
                .collect();
            let m = DistanceMatrix::from_values(rows, cols, false, values).unwrap();
            let mut buf = Vec::new();
            write_matrix(&mut buf, &m).unwrap();
            prop_assert_eq!(read_matrix(buf.as_slice()).unwrap(), m);
        }
    }
}
