use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::alignment::{Normalization, ScoringScheme};
use crate::alignment::{read_block, write_block};
use crate::error::{Error, Result};

/// Parameters that fully determine how a dataset was encoded.
#[derive(Debug, Clone, PartialEq)]
pub enum EncodingMeta {
    OneHot {
        alphabet: String,
        /// Symbol occupying each slot of a block, slot 0 first.
        slots: String,
        target_len: usize,
    },
    Ordinal {
        /// `(symbol, value)` in alphabet order.
        values: Vec<(char, f32)>,
        target_len: usize,
    },
    Reference {
        ref_ids: Vec<String>,
        rng_seed: u64,
        scheme: ScoringScheme,
    },
}

impl EncodingMeta {
    pub fn kind(&self) -> &'static str {
        match self {
            EncodingMeta::OneHot { .. } => "onehot",
            EncodingMeta::Ordinal { .. } => "ordinal",
            EncodingMeta::Reference { .. } => "reference",
        }
    }

    /// Feature width implied by the parameters.
    pub fn width(&self) -> usize {
        match self {
            EncodingMeta::OneHot { slots, target_len, .. } => slots.chars().count() * target_len,
            EncodingMeta::Ordinal { target_len, .. } => *target_len,
            EncodingMeta::Reference { ref_ids, .. } => ref_ids.len(),
        }
    }

    fn header_params(&self) -> Vec<String> {
        match self {
            EncodingMeta::OneHot {
                alphabet,
                slots,
                target_len,
            } => vec![
                format!("alphabet={alphabet}"),
                format!("slots={slots}"),
                format!("target_len={target_len}"),
            ],
            EncodingMeta::Ordinal { values, target_len } => {
                let map: Vec<String> = values.iter().map(|(c, v)| format!("{c}:{v}")).collect();
                vec![format!("values={}", map.join(",")), format!("target_len={target_len}")]
            }
            EncodingMeta::Reference {
                ref_ids,
                rng_seed,
                scheme,
            } => vec![
                format!("seed={rng_seed}"),
                format!("match={}", scheme.match_score),
                format!("mismatch={}", scheme.mismatch),
                format!("gap={}", scheme.gap),
                format!("normalization={}", normalization_name(scheme.normalization)),
                format!("refs={}", ref_ids.join(",")),
            ],
        }
    }

    fn from_header(kind: &str, params: &[(String, String)]) -> Result<Self> {
        let get = |key: &str| {
            params
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Format(format!("encoding header lacks {key}")))
        };
        let num = |key: &str| -> Result<i64> {
            get(key)?
                .parse()
                .map_err(|_| Error::Format(format!("bad value for {key}")))
        };
        match kind {
            "onehot" => Ok(EncodingMeta::OneHot {
                alphabet: get("alphabet")?.to_string(),
                slots: get("slots")?.to_string(),
                target_len: num("target_len")? as usize,
            }),
            "ordinal" => {
                let values = get("values")?
                    .split(',')
                    .map(|kv| {
                        let (c, v) = kv
                            .split_once(':')
                            .ok_or_else(|| Error::Format(format!("bad ordinal entry {kv:?}")))?;
                        let mut chars = c.chars();
                        let (Some(c), None) = (chars.next(), chars.next()) else {
                            return Err(Error::Format(format!("bad ordinal symbol {c:?}")));
                        };
                        let v = v.parse().map_err(|_| Error::Format(format!("bad ordinal value {v:?}")))?;
                        Ok((c, v))
                    })
                    .collect::<Result<_>>()?;
                Ok(EncodingMeta::Ordinal {
                    values,
                    target_len: num("target_len")? as usize,
                })
            }
            "reference" => {
                let normalization = match get("normalization")? {
                    "mean-self" => Normalization::MeanSelf,
                    "min-self" => Normalization::MinSelf,
                    other => return Err(Error::Format(format!("unknown normalization {other:?}"))),
                };
                let scheme = ScoringScheme::new(num("match")? as i32, num("mismatch")? as i32, num("gap")? as i32)
                    .map_err(|e| Error::Format(e.to_string()))?
                    .with_normalization(normalization);
                Ok(EncodingMeta::Reference {
                    ref_ids: get("refs")?.split(',').map(String::from).collect(),
                    rng_seed: get("seed")?
                        .parse()
                        .map_err(|_| Error::Format("bad seed".into()))?,
                    scheme,
                })
            }
            other => Err(Error::Format(format!("unknown encoding kind {other:?}"))),
        }
    }
}

pub(crate) fn normalization_name(n: Normalization) -> &'static str {
    match n {
        Normalization::MeanSelf => "mean-self",
        Normalization::MinSelf => "min-self",
    }
}

/// `N x D` feature matrix with one id per row.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDataset {
    ids: Vec<String>,
    width: usize,
    features: Vec<f32>,
    meta: EncodingMeta,
}

impl EncodedDataset {
    pub fn new(ids: Vec<String>, features: Vec<f32>, meta: EncodingMeta) -> Result<Self> {
        let width = meta.width();
        if features.len() != ids.len() * width {
            return Err(Error::Dimension {
                expected: ids.len() * width,
                actual: features.len(),
            });
        }
        if let Some(v) = features.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Format(format!("feature value {v} outside [0, 1]")));
        }
        Ok(EncodedDataset {
            ids,
            width,
            features,
            meta,
        })
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

    /// Feature width `D`.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn meta(&self) -> &EncodingMeta {
        &self.meta
    }

    pub fn features(&self) -> &[f32] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.features[i * self.width..(i + 1) * self.width]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f32> {
        self.features.chunks_exact(self.width.max(1))
    }

    /// Rows at the given positions, in that order.
    pub fn select(&self, indices: &[usize]) -> EncodedDataset {
        let mut features = Vec::with_capacity(indices.len() * self.width);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        EncodedDataset {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            width: self.width,
            features,
            meta: self.meta.clone(),
        }
    }
}

/// Writes a `#ENC` header line, one id per line, then the matrix in the
/// binary distance-matrix layout with flags `0`.
pub fn write_encoded<W: Write>(mut w: W, data: &EncodedDataset) -> Result<()> {
    for id in &data.ids {
        if id.is_empty() || id.contains(char::is_whitespace) {
            return Err(Error::Format(format!("id {id:?} cannot be stored")));
        }
    }
    if let EncodingMeta::Reference { ref_ids, .. } = &data.meta {
        if let Some(bad) = ref_ids.iter().find(|id| id.contains(',') || id.contains(char::is_whitespace)) {
            return Err(Error::Format(format!("reference id {bad:?} cannot be stored in a header")));
        }
    }
    let mut header = vec![
        "#ENC".to_string(),
        format!("kind={}", data.meta.kind()),
        format!("d={}", data.width),
        format!("n={}", data.len()),
    ];
    header.extend(data.meta.header_params());
    writeln!(w, "{}", header.join(" "))?;
    for id in &data.ids {
        writeln!(w, "{id}")?;
    }
    write_block(w, data.len(), data.width, 0, &data.features)
}

pub fn read_encoded<R: BufRead>(mut r: R) -> Result<EncodedDataset> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let mut fields = line.split_whitespace();
    if fields.next() != Some("#ENC") {
        return Err(Error::Format("missing #ENC header".into()));
    }
    let params: Vec<(String, String)> = fields
        .map(|f| {
            f.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::Format(format!("bad header field {f:?}")))
        })
        .collect::<Result<_>>()?;
    let field = |key: &str| {
        params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::Format(format!("encoding header lacks {key}")))
    };
    let count = |key: &str| -> Result<usize> {
        field(key)?
            .parse()
            .map_err(|_| Error::Format(format!("bad {key}")))
    };
    let (n, d) = (count("n")?, count("d")?);
    let meta = EncodingMeta::from_header(&field("kind")?, &params)?;
    if meta.width() != d {
        return Err(Error::Format(format!("header d={d} disagrees with parameters ({})", meta.width())));
    }

    let mut ids = Vec::with_capacity(n);
    for _ in 0..n {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            return Err(Error::Format("truncated id list".into()));
        }
        ids.push(line.trim_end_matches(['\n', '\r']).to_string());
    }
    let (rows, cols, _, features) = read_block(r)?;
    if rows != n || cols != d {
        return Err(Error::Format(format!("matrix is {rows}x{cols}, header says {n}x{d}")));
    }
    EncodedDataset::new(ids, features, meta)
}

pub fn write_encoded_file(path: &Path, data: &EncodedDataset) -> Result<()> {
    write_encoded(BufWriter::new(File::create(path)?), data)
}

pub fn read_encoded_file(path: &Path) -> Result<EncodedDataset> {
    read_encoded(BufReader::new(File::open(path)?))
}
