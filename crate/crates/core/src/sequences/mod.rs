//! Gene sequence datasets: alphabets, validated sequence sets, FASTA I/O,
//! deduplication and a synthetic clustered-sequence generator.

mod dedup;
mod fasta;
mod synth;

use std::collections::HashSet;
use std::fmt;

pub use dedup::{dedup, write_multiplicity_tsv, Dedup};
pub use fasta::{parse_fasta, read_fasta_file, write_fasta, write_fasta_file};
pub use synth::{synth_dataset, SynthConfig, SyntheticSet};

use crate::error::{Error, Result};

/// An ordered residue alphabet with constant-time symbol lookup.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    index: [u8; 256],
}

const NO_SYMBOL: u8 = u8::MAX;

impl Alphabet {
    pub fn new(symbols: &[u8]) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Config("alphabet must not be empty".into()));
        }
        if symbols.len() >= NO_SYMBOL as usize {
            return Err(Error::Config("alphabet too large".into()));
        }
        let mut index = [NO_SYMBOL; 256];
        for (i, &s) in symbols.iter().enumerate() {
            let s = s.to_ascii_uppercase();
            if !s.is_ascii_graphic() || s == b'>' {
                return Err(Error::Config(format!("invalid alphabet symbol {:?}", s as char)));
            }
            if index[s as usize] != NO_SYMBOL {
                return Err(Error::Config(format!("duplicate alphabet symbol {:?}", s as char)));
            }
            index[s as usize] = i as u8;
        }
        Ok(Alphabet {
            symbols: symbols.iter().map(u8::to_ascii_uppercase).collect(),
            index,
        })
    }

    /// The nucleotide alphabet `A, T, G, C`, in that order.
    pub fn dna() -> Self {
        Alphabet::new(b"ATGC").expect("static alphabet")
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index(&self, symbol: u8) -> Option<usize> {
        match self.index[symbol as usize] {
            NO_SYMBOL => None,
            i => Some(i as usize),
        }
    }

    pub fn contains(&self, symbol: u8) -> bool {
        self.index(symbol).is_some()
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.symbols).expect("alphabet is ascii")
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::dna()
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({})", self.as_str())
    }
}

/// A named residue string. Residues are stored uppercased.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequence {
    pub id: String,
    pub residues: Vec<u8>,
}

impl Sequence {
    pub fn new(id: impl Into<String>, residues: impl AsRef<[u8]>) -> Self {
        Sequence {
            id: id.into(),
            residues: residues.as_ref().to_ascii_uppercase(),
        }
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn validate(&self, alphabet: &Alphabet) -> Result<()> {
        if self.residues.is_empty() {
            return Err(Error::InvalidSet(format!("sequence {:?} is empty", self.id)));
        }
        if let Some(&bad) = self.residues.iter().find(|&&c| !alphabet.contains(c)) {
            return Err(Error::InvalidResidue {
                id: self.id.clone(),
                ch: bad as char,
                alphabet: alphabet.as_str().to_string(),
            });
        }
        Ok(())
    }
}

/// An ordered collection of sequences with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSet {
    sequences: Vec<Sequence>,
    max_len: usize,
}

impl SequenceSet {
    /// Builds a set, checking id uniqueness and that every sequence is
    /// nonempty and drawn from `alphabet`.
    pub fn new(sequences: Vec<Sequence>, alphabet: &Alphabet) -> Result<Self> {
        let mut seen = HashSet::with_capacity(sequences.len());
        for s in &sequences {
            s.validate(alphabet)?;
            if !seen.insert(s.id.as_str()) {
                return Err(Error::InvalidSet(format!("duplicate id {:?}", s.id)));
            }
        }
        let max_len = sequences.iter().map(Sequence::len).max().unwrap_or(0);
        Ok(SequenceSet { sequences, max_len })
    }

    pub fn empty() -> Self {
        SequenceSet {
            sequences: Vec::new(),
            max_len: 0,
        }
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.sequences
    }

    pub fn into_sequences(self) -> Vec<Sequence> {
        self.sequences
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Length of the longest sequence.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn get(&self, i: usize) -> Option<&Sequence> {
        self.sequences.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sequence> {
        self.sequences.iter()
    }

    pub fn ids(&self) -> Vec<String> {
        self.sequences.iter().map(|s| s.id.clone()).collect()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.sequences.iter().position(|s| s.id == id)
    }

    /// Members at the given positions, in that order. Members were
    /// validated on construction so no re-check is needed.
    pub fn select(&self, indices: &[usize]) -> SequenceSet {
        let sequences: Vec<Sequence> = indices.iter().map(|&i| self.sequences[i].clone()).collect();
        let max_len = sequences.iter().map(Sequence::len).max().unwrap_or(0);
        SequenceSet { sequences, max_len }
    }

    /// Looks up each id, failing on the first one not in the set.
    pub fn select_ids<S: AsRef<str>>(&self, ids: &[S]) -> Result<SequenceSet> {
        let lookup: std::collections::HashMap<&str, usize> = self
            .sequences
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.as_str(), i))
            .collect();
        let indices = ids
            .iter()
            .map(|id| {
                lookup
                    .get(id.as_ref())
                    .copied()
                    .ok_or_else(|| Error::Lookup(id.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.select(&indices))
    }
}

impl<'a> IntoIterator for &'a SequenceSet {
    type Item = &'a Sequence;
    type IntoIter = std::slice::Iter<'a, Sequence>;

    fn into_iter(self) -> Self::IntoIter {
        self.sequences.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_index_roundtrip() {
        let a = Alphabet::dna();
        for (i, &s) in a.symbols().iter().enumerate() {
            assert_eq!(a.index(s), Some(i));
        }
        assert_eq!(a.index(b'N'), None);
        assert!(Alphabet::new(b"").is_err());
        assert!(Alphabet::new(b"AA").is_err());
        assert!(Alphabet::new(b"Aa").is_err());
    }

    #[test]
    fn set_rejects_duplicate_ids_and_empty_sequences() {
        let a = Alphabet::dna();
        let dup = vec![Sequence::new("x", "A"), Sequence::new("x", "T")];
        assert!(matches!(SequenceSet::new(dup, &a), Err(Error::InvalidSet(_))));
        let empty = vec![Sequence::new("x", "")];
        assert!(SequenceSet::new(empty, &a).is_err());
    }

    #[test]
    fn max_len_tracks_longest() {
        let a = Alphabet::dna();
        let set = SequenceSet::new(vec![Sequence::new("a", "AT"), Sequence::new("b", "ATGCA")], &a).unwrap();
        assert_eq!(set.max_len(), 5);
        assert_eq!(set.select(&[0]).max_len(), 2);
    }

    #[test]
    fn select_ids_reports_missing_id() {
        let a = Alphabet::dna();
        let set = SequenceSet::new(vec![Sequence::new("a", "AT")], &a).unwrap();
        match set.select_ids(&["a", "zz"]) {
            Err(Error::Lookup(id)) => assert_eq!(id, "zz"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
