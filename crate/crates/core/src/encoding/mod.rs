//! Fixed-width numeric encodings of sequences.
//!
//! Three encoders produce an [`EncodedDataset`]:
//!
//! * one-hot: each residue becomes an alphabet-wide indicator block, blocks
//!   are concatenated and zero-padded to a target length;
//! * ordinal: each residue becomes a single scalar, zero-padded;
//! * reference panel: each sequence becomes its vector of Smith-Waterman
//!   distances to `K` sampled reference sequences.

mod dataset;
mod onehot;
mod ordinal;
mod panel;

pub use dataset::{read_encoded, read_encoded_file, write_encoded, write_encoded_file, EncodedDataset, EncodingMeta};
pub use onehot::{one_hot_encode, OneHotEncoder};
pub use ordinal::{ordinal_encode, OrdinalMap};
pub use panel::{
    read_panel, read_panel_file, reference_encode, sample_references, write_panel, write_panel_file, ReferencePanel,
};

use crate::error::{Error, Result};
use crate::sequences::SequenceSet;

/// Resolves the padding target, defaulting to the longest sequence.
pub(crate) fn resolve_target_len(set: &SequenceSet, target_len: Option<usize>) -> Result<usize> {
    let target = target_len.unwrap_or(set.max_len());
    if let Some(s) = set.iter().find(|s| s.len() > target) {
        return Err(Error::Length {
            id: s.id.clone(),
            len: s.len(),
            target_len: target,
        });
    }
    Ok(target)
}
