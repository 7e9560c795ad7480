use super::{resolve_target_len, EncodedDataset, EncodingMeta};
use crate::error::{Error, Result};
use crate::sequences::{Alphabet, SequenceSet};

/// One-hot block layout over an alphabet.
///
/// The default layout fills blocks from the last slot backwards, so with
/// the `ATGC` alphabet `A -> [0,0,0,1]`, `T -> [0,0,1,0]`, `G -> [0,1,0,0]`
/// and `C -> [1,0,0,0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneHotEncoder {
    alphabet: Alphabet,
    /// Slot index for each alphabet position.
    slot_of: Vec<usize>,
}

impl OneHotEncoder {
    pub fn new(alphabet: Alphabet) -> Self {
        let c = alphabet.len();
        OneHotEncoder {
            slot_of: (0..c).map(|i| c - 1 - i).collect(),
            alphabet,
        }
    }

    /// Custom layout: `slots[k]` is the symbol occupying slot `k`.
    pub fn with_slots(alphabet: Alphabet, slots: &[u8]) -> Result<Self> {
        let mut slot_of = vec![usize::MAX; alphabet.len()];
        if slots.len() != alphabet.len() {
            return Err(Error::Config(format!(
                "slot layout {:?} must list each of the {} alphabet symbols once",
                String::from_utf8_lossy(slots),
                alphabet.len()
            )));
        }
        for (k, &s) in slots.iter().enumerate() {
            let i = alphabet
                .index(s.to_ascii_uppercase())
                .ok_or_else(|| Error::Config(format!("slot symbol {:?} not in alphabet", s as char)))?;
            if slot_of[i] != usize::MAX {
                return Err(Error::Config(format!("slot symbol {:?} repeated", s as char)));
            }
            slot_of[i] = k;
        }
        Ok(OneHotEncoder { alphabet, slot_of })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Symbols in slot order.
    pub fn slots(&self) -> Vec<u8> {
        let mut slots = vec![0u8; self.alphabet.len()];
        for (i, &k) in self.slot_of.iter().enumerate() {
            slots[k] = self.alphabet.symbols()[i];
        }
        slots
    }

    /// Encodes every sequence, zero-padding to `target_len` (default: the
    /// longest sequence). Width is `target_len * alphabet size`.
    pub fn encode(&self, set: &SequenceSet, target_len: Option<usize>) -> Result<EncodedDataset> {
        let target = resolve_target_len(set, target_len)?;
        let c = self.alphabet.len();
        let width = target * c;
        let mut features = vec![0f32; set.len() * width];
        for (row, s) in features.chunks_exact_mut(width.max(1)).zip(set.iter()) {
            for (p, &r) in s.residues.iter().enumerate() {
                let i = self.alphabet.index(r).ok_or_else(|| Error::InvalidResidue {
                    id: s.id.clone(),
                    ch: r as char,
                    alphabet: self.alphabet.as_str().to_string(),
                })?;
                row[p * c + self.slot_of[i]] = 1.0;
            }
        }
        EncodedDataset::new(
            set.ids(),
            features,
            EncodingMeta::OneHot {
                alphabet: self.alphabet.as_str().to_string(),
                slots: String::from_utf8(self.slots()).expect("ascii"),
                target_len: target,
            },
        )
    }

    /// Inverse of [`encode`](Self::encode) for one row: reads blocks until
    /// the first all-zero (padding) block.
    pub fn decode_row(&self, row: &[f32]) -> Result<Vec<u8>> {
        let c = self.alphabet.len();
        if !row.len().is_multiple_of(c) {
            return Err(Error::Dimension {
                expected: row.len().next_multiple_of(c),
                actual: row.len(),
            });
        }
        let slots = self.slots();
        let mut out = Vec::new();
        for block in row.chunks_exact(c) {
            match block.iter().position(|&v| v == 1.0) {
                Some(k) => out.push(slots[k]),
                None => break,
            }
        }
        Ok(out)
    }
}

/// One-hot encoding with the default block layout.
pub fn one_hot_encode(set: &SequenceSet, alphabet: &Alphabet, target_len: Option<usize>) -> Result<EncodedDataset> {
    OneHotEncoder::new(alphabet.clone()).encode(set, target_len)
}
