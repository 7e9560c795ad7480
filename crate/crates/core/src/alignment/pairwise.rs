use std::ops::Add;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sw_score, DistanceMatrix, ScoringScheme};
use crate::error::{Error, Result};
use crate::parallel::with_threads;
use crate::sequences::SequenceSet;

/// Work counters for a matrix computation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentStats {
    /// Alignments between two distinct sequences.
    pub pair_alignments: u64,
    /// Self alignments used for normalization.
    pub self_alignments: u64,
    /// DP cells filled over all alignments.
    pub cells: u64,
}

impl Add for AlignmentStats {
    type Output = AlignmentStats;

    fn add(self, o: AlignmentStats) -> AlignmentStats {
        AlignmentStats {
            pair_alignments: self.pair_alignments + o.pair_alignments,
            self_alignments: self.self_alignments + o.self_alignments,
            cells: self.cells + o.cells,
        }
    }
}

/// Self score of every member, in set order.
pub fn self_scores(set: &SequenceSet, scheme: &ScoringScheme) -> (Vec<i32>, AlignmentStats) {
    let scores = set
        .sequences()
        .par_iter()
        .map(|s| sw_score(&s.residues, &s.residues, scheme))
        .collect();
    let stats = AlignmentStats {
        pair_alignments: 0,
        self_alignments: set.len() as u64,
        cells: set.iter().map(|s| (s.len() as u64).pow(2)).sum(),
    };
    (scores, stats)
}

/// Symmetric `N x N` matrix of normalized distances.
///
/// Each worker fills the upper-triangle part of a contiguous block of rows;
/// the lower triangle is mirrored afterwards. Every entry is computed by the
/// same scalar code regardless of which worker owns it, so the output does
/// not depend on `threads`.
pub fn pairwise_matrix(
    set: &SequenceSet,
    scheme: &ScoringScheme,
    threads: usize,
) -> Result<(DistanceMatrix, AlignmentStats)> {
    scheme.validate()?;
    if set.is_empty() {
        return Err(Error::Argument("cannot build a distance matrix of an empty set".into()));
    }
    let n = set.len();
    let mut matrix = DistanceMatrix::try_zeros(n, n, true)?;
    let seqs = set.sequences();

    let stats = with_threads(threads, || {
        let (selfs, self_stats) = self_scores(set, scheme);
        let pair_stats = matrix
            .values_mut()
            .par_chunks_mut(n)
            .enumerate()
            .map(|(i, row)| {
                let a = &seqs[i].residues;
                let mut local = AlignmentStats::default();
                for j in i + 1..n {
                    let b = &seqs[j].residues;
                    row[j] = scheme.normalize(sw_score(a, b, scheme), selfs[i], selfs[j]) as f32;
                    local.pair_alignments += 1;
                    local.cells += (a.len() * b.len()) as u64;
                }
                local
            })
            .reduce(AlignmentStats::default, Add::add);
        self_stats + pair_stats
    })?;

    let values = matrix.values_mut();
    for i in 0..n {
        for j in 0..i {
            values[i * n + j] = values[j * n + i];
        }
    }
    Ok((matrix, stats))
}

/// `N x K` matrix with entry `(i, k) = d(set[i], refs[k])`.
pub fn rect_matrix(
    set: &SequenceSet,
    refs: &SequenceSet,
    scheme: &ScoringScheme,
    threads: usize,
) -> Result<(DistanceMatrix, AlignmentStats)> {
    scheme.validate()?;
    if set.is_empty() || refs.is_empty() {
        return Err(Error::Argument("cannot build a distance matrix of an empty set".into()));
    }
    let (n, k) = (set.len(), refs.len());
    let mut matrix = DistanceMatrix::try_zeros(n, k, false)?;
    let (seqs, ref_seqs) = (set.sequences(), refs.sequences());

    let stats = with_threads(threads, || {
        let (self_set, stats_set) = self_scores(set, scheme);
        let (self_refs, stats_refs) = self_scores(refs, scheme);
        let pair_stats = matrix
            .values_mut()
            .par_chunks_mut(k)
            .enumerate()
            .map(|(i, row)| {
                let a = &seqs[i].residues;
                let mut local = AlignmentStats::default();
                for (j, out) in row.iter_mut().enumerate() {
                    let b = &ref_seqs[j].residues;
                    *out = scheme.normalize(sw_score(a, b, scheme), self_set[i], self_refs[j]) as f32;
                    local.pair_alignments += 1;
                    local.cells += (a.len() * b.len()) as u64;
                }
                local
            })
            .reduce(AlignmentStats::default, Add::add);
        stats_set + stats_refs + pair_stats
    })?;
    Ok((matrix, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::sw_distance;
    use crate::sequences::{Alphabet, Sequence};

    fn set(rs: &[&str]) -> SequenceSet {
        let seqs = rs
            .iter()
            .enumerate()
            .map(|(i, r)| Sequence::new(format!("s{i}"), r))
            .collect();
        SequenceSet::new(seqs, &Alphabet::dna()).unwrap()
    }

    #[test]
    fn single_sequence() {
        let (m, stats) = pairwise_matrix(&set(&["ATGC"]), &ScoringScheme::default(), 1).unwrap();
        assert_eq!(m.values(), &[0.0]);
        assert_eq!(stats.pair_alignments, 0);
    }

    #[test]
    fn composes_individual_distances() {
        let rs = ["ATGCAT", "ATGGAT", "CCCTAG"];
        let s = ScoringScheme::default();
        let (m, stats) = pairwise_matrix(&set(&rs), &s, 2).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = sw_distance(rs[i].as_bytes(), rs[j].as_bytes(), &s) as f32;
                assert_eq!(m.get(i, j), expected, "({i},{j})");
            }
        }
        assert_eq!(stats.pair_alignments, 3);
        assert_eq!(stats.self_alignments, 3);
        assert_eq!(stats.cells, 3 * 36 + 3 * 36);
    }

    #[test]
    fn rect_against_self_equals_pairwise() {
        let s = set(&["ATGCAT", "ATGGAT", "CCCTAG", "AAAA"]);
        let scheme = ScoringScheme::default();
        let (full, _) = pairwise_matrix(&s, &scheme, 1).unwrap();
        let (rect, stats) = rect_matrix(&s, &s, &scheme, 3).unwrap();
        assert_eq!(rect.values(), full.values());
        assert!(!rect.is_symmetric());
        assert_eq!(stats.pair_alignments, 16);
    }

    #[test]
    fn identical_reference_gives_zero_column() {
        let s = set(&["ATGC", "ATGC", "ATGC"]);
        let refs = set(&["ATGC"]);
        let (m, _) = rect_matrix(&s, &refs, &ScoringScheme::default(), 1).unwrap();
        assert_eq!(m.values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn empty_set_rejected() {
        assert!(pairwise_matrix(&SequenceSet::empty(), &ScoringScheme::default(), 1).is_err());
    }
}
