use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// `N x d` low-dimensional coordinates, one row per id.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    ids: Vec<String>,
    dim: usize,
    coords: Vec<f64>,
}

impl Embedding {
    pub fn new(ids: Vec<String>, dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("embedding dimension must be >= 1".into()));
        }
        if coords.len() != ids.len() * dim {
            return Err(Error::Dimension {
                expected: ids.len() * dim,
                actual: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Argument("embedding coordinates must be finite".into()));
        }
        Ok(Embedding { ids, dim, coords })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    pub fn select(&self, indices: &[usize]) -> Embedding {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Embedding {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            dim: self.dim,
            coords,
        }
    }
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

#[inline]
pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// TSV with an `id x1 .. xd` header. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_embedding_tsv<W: Write>(mut w: W, emb: &Embedding) -> Result<()> {
    let mut header = vec!["id".to_string()];
    header.extend((1..=emb.dim).map(|k| format!("x{k}")));
    writeln!(w, "{}", header.join("\t"))?;
    for (id, p) in emb.ids.iter().zip(emb.points()) {
        write!(w, "{id}")?;
        for v in p {
            write!(w, "\t{v:?}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_embedding_tsv<R: BufRead>(r: R) -> Result<Embedding> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty embedding file".into()))??;
    let cols: Vec<&str> = header.split('\t').collect();
    if cols.first() != Some(&"id") || cols.len() < 2 {
        return Err(Error::Format("embedding header must be id, x1..xd".into()));
    }
    let dim = cols.len() - 1;
    let mut ids = Vec::new();
    let mut coords = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        ids.push(fields.next().unwrap_or_default().to_string());
        let before = coords.len();
        for f in fields {
            coords.push(f.parse::<f64>().map_err(|_| Error::Parse {
                line: n + 2,
                message: format!("bad coordinate {f:?}"),
            })?);
        }
        if coords.len() - before != dim {
            return Err(Error::Parse {
                line: n + 2,
                message: format!("expected {dim} coordinates"),
            });
        }
    }
    Embedding::new(ids, dim, coords)
}

pub fn write_embedding_file(path: &Path, emb: &Embedding) -> Result<()> {
    write_embedding_tsv(BufWriter::new(File::create(path)?), emb)
}

pub fn read_embedding_file(path: &Path) -> Result<Embedding> {
    read_embedding_tsv(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tsv_layout() {
        let e = Embedding::new(vec!["a".into(), "b".into()], 2, vec![0.5, -1.0, 3.0, 1e-300]).unwrap();
        let mut out = Vec::new();
        write_embedding_tsv(&mut out, &e).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "id\tx1\tx2\na\t0.5\t-1.0\nb\t3.0\t1e-300\n");
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Embedding::new(vec!["a".into()], 1, vec![f64::NAN]).is_err());
        assert!(Embedding::new(vec!["a".into()], 2, vec![1.0]).is_err());
    }

    proptest! {
        #[test]
        fn tsv_roundtrip_is_exact(coords in proptest::collection::vec(-1e6f64..1e6, 3..30)) {
            let n = coords.len() / 3;
            let coords = coords[..n * 3].to_vec();
            let ids = (0..n).map(|i| format!("p{i}")).collect();
            let e = Embedding::new(ids, 3, coords).unwrap();
            let mut buf = Vec::new();
            write_embedding_tsv(&mut buf, &e).unwrap();
            prop_assert_eq!(read_embedding_tsv(buf.as_slice()).unwrap(), e);
        }
    }
}
