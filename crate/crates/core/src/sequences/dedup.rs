use std::collections::HashMap;
use std::io::Write;

use super::SequenceSet;
use crate::error::Result;

/// Result of collapsing identical residue strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dedup {
    /// First occurrence of each distinct residue string, in input order.
    pub unique: SequenceSet,
    /// `(id, count)` for every member of `unique`, same order.
    pub multiplicity: Vec<(String, usize)>,
    /// Members of `unique` that occur more than once.
    pub recurrent: SequenceSet,
}

impl Dedup {
    pub fn count(&self, id: &str) -> Option<usize> {
        self.multiplicity.iter().find(|(i, _)| i == id).map(|&(_, c)| c)
    }
}

pub fn dedup(set: &SequenceSet) -> Dedup {
    let mut first: HashMap<&[u8], usize> = HashMap::with_capacity(set.len());
    let mut keep: Vec<usize> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();

    for (i, s) in set.iter().enumerate() {
        match first.get(s.residues.as_slice()) {
            Some(&slot) => counts[slot] += 1,
            None => {
                first.insert(&s.residues, keep.len());
                keep.push(i);
                counts.push(1);
            }
        }
    }

    let unique = set.select(&keep);
    let recurrent_idx: Vec<usize> = (0..keep.len()).filter(|&k| counts[k] > 1).collect();
    let recurrent = unique.select(&recurrent_idx);
    let multiplicity = unique.iter().map(|s| s.id.clone()).zip(counts).collect();

    Dedup {
        unique,
        multiplicity,
        recurrent,
    }
}

/// Two-column `id\tcount` table with a header row.
pub fn write_multiplicity_tsv<W: Write>(mut writer: W, multiplicity: &[(String, usize)]) -> Result<()> {
    writeln!(writer, "id\tcount")?;
    for (id, count) in multiplicity {
        writeln!(writer, "{id}\t{count}")?;
    }
    writer.flush()?;
    Ok(())
}
