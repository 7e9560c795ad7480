use super::{resolve_target_len, EncodedDataset, EncodingMeta};
use crate::error::{Error, Result};
use crate::sequences::{Alphabet, SequenceSet};

/// Scalar value per alphabet symbol. Padding is always `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrdinalMap {
    alphabet: Alphabet,
    values: Vec<f32>,
}

impl OrdinalMap {
    /// Every alphabet symbol needs a value in `(0, 1]`; `0` is reserved for
    /// padding.
    pub fn new(alphabet: Alphabet, pairs: &[(u8, f32)]) -> Result<Self> {
        let mut values = vec![f32::NAN; alphabet.len()];
        for &(sym, v) in pairs {
            let i = alphabet
                .index(sym.to_ascii_uppercase())
                .ok_or_else(|| Error::Config(format!("ordinal symbol {:?} not in alphabet", sym as char)))?;
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(format!("ordinal value {v} for {:?} outside (0, 1]", sym as char)));
            }
            values[i] = v;
        }
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::Config(format!(
                "no ordinal value for symbol {:?}",
                alphabet.symbols()[i] as char
            )));
        }
        Ok(OrdinalMap { alphabet, values })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn value(&self, symbol: u8) -> Option<f32> {
        self.alphabet.index(symbol).map(|i| self.values[i])
    }

    pub fn encode(&self, set: &SequenceSet, target_len: Option<usize>) -> Result<EncodedDataset> {
        let target = resolve_target_len(set, target_len)?;
        let mut features = vec![0f32; set.len() * target];
        for (row, s) in features.chunks_exact_mut(target.max(1)).zip(set.iter()) {
            for (out, &r) in row.iter_mut().zip(&s.residues) {
                *out = self.value(r).ok_or_else(|| Error::InvalidResidue {
                    id: s.id.clone(),
                    ch: r as char,
                    alphabet: self.alphabet.as_str().to_string(),
                })?;
            }
        }
        EncodedDataset::new(
            set.ids(),
            features,
            EncodingMeta::Ordinal {
                values: self
                    .alphabet
                    .symbols()
                    .iter()
                    .zip(&self.values)
                    .map(|(&c, &v)| (c as char, v))
                    .collect(),
                target_len: target,
            },
        )
    }
}

impl Default for OrdinalMap {
    /// `A = 0.25, T = 0.5, G = 0.75, C = 1.0`.
    fn default() -> Self {
        OrdinalMap::new(Alphabet::dna(), &[(b'A', 0.25), (b'T', 0.5), (b'G', 0.75), (b'C', 1.0)])
            .expect("static map")
    }
}

pub fn ordinal_encode(set: &SequenceSet, map: &OrdinalMap, target_len: Option<usize>) -> Result<EncodedDataset> {
    map.encode(set, target_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::Sequence;

    fn gg() -> SequenceSet {
        SequenceSet::new(vec![Sequence::new("g", "GGTAC")], &Alphabet::dna()).unwrap()
    }

    #[test]
    fn ggtac_values() {
        let e = ordinal_encode(&gg(), &OrdinalMap::default(), Some(5)).unwrap();
        assert_eq!(e.row(0), &[0.75, 0.75, 0.5, 0.25, 1.0]);
    }

    #[test]
    fn padding_is_zero() {
        let e = ordinal_encode(&gg(), &OrdinalMap::default(), Some(7)).unwrap();
        assert_eq!(e.row(0), &[0.75, 0.75, 0.5, 0.25, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn missing_symbol_is_config_error() {
        let r = OrdinalMap::new(Alphabet::dna(), &[(b'A', 0.25), (b'G', 0.75), (b'C', 1.0)]);
        match r {
            Err(Error::Config(msg)) => assert!(msg.contains("'T'"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(OrdinalMap::new(Alphabet::dna(), &[(b'A', 0.0)]).is_err());
    }

    #[test]
    fn short_target_rejected() {
        assert!(matches!(
            ordinal_encode(&gg(), &OrdinalMap::default(), Some(4)),
            Err(Error::Length { .. })
        ));
    }
}
