//! Smith-Waterman local alignment scores and the normalized distances built
//! from them.
//!
//! Only the optimal score is ever needed, so the kernel keeps a single DP row
//! and never records a traceback. With `S(a, b)` the best local alignment
//! score, the default distance is
//!
//! ```text
//! d(a, b) = 1 - 2 S(a, b) / (S(a, a) + S(b, b))
//! ```
//!
//! which is symmetric, zero on the diagonal and one for pairs without any
//! positively scoring local alignment. It is not a metric.

mod matrix;
mod pairwise;

pub use matrix::{read_matrix, read_matrix_file, write_matrix, write_matrix_csv, write_matrix_file, DistanceMatrix};
pub use pairwise::{pairwise_matrix, rect_matrix, self_scores, AlignmentStats};
pub(crate) use matrix::{read_block, write_block};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a raw score is turned into a distance in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `1 - 2 S(a,b) / (S(a,a) + S(b,b))`
    #[default]
    MeanSelf,
    /// `1 - S(a,b) / min(S(a,a), S(b,b))`
    MinSelf,
}

/// Linear-gap scoring parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoringScheme {
    #[serde(rename = "match")]
    pub match_score: i32,
    pub mismatch: i32,
    /// Penalty per gap position.
    pub gap: i32,
    #[serde(default)]
    pub normalization: Normalization,
}

impl ScoringScheme {
    pub fn new(match_score: i32, mismatch: i32, gap: i32) -> Result<Self> {
        let scheme = ScoringScheme {
            match_score,
            mismatch,
            gap,
            normalization: Normalization::MeanSelf,
        };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.match_score <= 0 || self.mismatch > 0 || self.gap > 0 {
            return Err(Error::Config(format!(
                "scoring scheme needs match > 0, mismatch <= 0, gap <= 0 (got {}, {}, {})",
                self.match_score, self.mismatch, self.gap
            )));
        }
        Ok(())
    }

    /// Combines a cross score with the two self scores.
    #[inline]
    pub fn normalize(&self, cross: i32, self_a: i32, self_b: i32) -> f64 {
        let d = match self.normalization {
            Normalization::MeanSelf => 1.0 - 2.0 * f64::from(cross) / (f64::from(self_a) + f64::from(self_b)),
            Normalization::MinSelf => 1.0 - f64::from(cross) / f64::from(self_a.min(self_b)),
        };
        d.clamp(0.0, 1.0)
    }
}

impl Default for ScoringScheme {
    fn default() -> Self {
        ScoringScheme {
            match_score: 2,
            mismatch: -1,
            gap: -2,
            normalization: Normalization::MeanSelf,
        }
    }
}

/// Best local alignment score of `a` against `b`.
///
/// Memory is one row over the shorter input.
pub fn sw_score(a: &[u8], b: &[u8], scheme: &ScoringScheme) -> i32 {
    let (outer, inner) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut row = vec![0i32; inner.len() + 1];
    let mut best = 0;
    for &x in outer {
        // row[j] holds H(i-1, j) until overwritten; `diag` is H(i-1, j-1).
        let mut diag = 0;
        let mut left = 0;
        for (j, &y) in inner.iter().enumerate() {
            let up = row[j + 1];
            let s = if x == y { scheme.match_score } else { scheme.mismatch };
            let h = (diag + s).max(up + scheme.gap).max(left + scheme.gap).max(0);
            diag = up;
            row[j + 1] = h;
            left = h;
            best = best.max(h);
        }
    }
    best
}

/// Normalized Smith-Waterman distance in `[0, 1]`.
pub fn sw_distance(a: &[u8], b: &[u8], scheme: &ScoringScheme) -> f64 {
    if a == b {
        return 0.0;
    }
    let cross = sw_score(a, b, scheme);
    let self_a = sw_score(a, a, scheme);
    let self_b = sw_score(b, b, scheme);
    scheme.normalize(cross, self_a, self_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Full (n+1)x(m+1) table, written directly from the recurrence.
    fn oracle(a: &[u8], b: &[u8], s: &ScoringScheme) -> i32 {
        let (n, m) = (a.len(), b.len());
        let mut h = vec![vec![0i32; m + 1]; n + 1];
        let mut best = 0;
        for i in 1..=n {
            for j in 1..=m {
                let sub = if a[i - 1] == b[j - 1] { s.match_score } else { s.mismatch };
                h[i][j] = *[0, h[i - 1][j - 1] + sub, h[i - 1][j] + s.gap, h[i][j - 1] + s.gap]
                    .iter()
                    .max()
                    .unwrap();
                best = best.max(h[i][j]);
            }
        }
        best
    }

    #[test]
    fn perfect_self_match() {
        assert_eq!(sw_score(b"ATGC", b"ATGC", &ScoringScheme::default()), 8);
    }

    #[test]
    fn no_positive_alignment() {
        assert_eq!(sw_score(b"AAAA", b"GGGG", &ScoringScheme::default()), 0);
        assert_eq!(sw_distance(b"AAAA", b"GGGG", &ScoringScheme::default()), 1.0);
    }

    #[test]
    fn gapped_example_matches_oracle() {
        let s = ScoringScheme::default();
        let expected = oracle(b"GGTAC", b"ATGC", &s);
        assert_eq!(expected, 3);
        assert_eq!(sw_score(b"GGTAC", b"ATGC", &s), expected);
    }

    #[test]
    fn distance_example() {
        let s = ScoringScheme::default();
        let cross = oracle(b"ATGC", b"ATGG", &s);
        assert_eq!(cross, 6);
        let expected = 1.0 - 2.0 * cross as f64 / (8.0 + 8.0);
        assert_eq!(sw_distance(b"ATGC", b"ATGG", &s), expected);
        assert_eq!(expected, 0.25);
    }

    #[test]
    fn min_self_normalization() {
        let s = ScoringScheme::default().with_normalization(Normalization::MinSelf);
        // "ATGC" vs "ATGCATGC": S = 8, self scores 8 and 16.
        assert_eq!(sw_distance(b"ATGC", b"ATGCATGC", &s), 0.0);
        let mean = ScoringScheme::default();
        assert_eq!(sw_distance(b"ATGC", b"ATGCATGC", &mean), 1.0 - 16.0 / 24.0);
    }

    #[test]
    fn scheme_validation() {
        assert!(ScoringScheme::new(0, -1, -1).is_err());
        assert!(ScoringScheme::new(1, 1, -1).is_err());
        assert!(ScoringScheme::new(1, -1, 1).is_err());
        assert!(ScoringScheme::new(5, -4, -10).is_ok());
    }

    proptest! {
        #[test]
        fn kernel_matches_oracle(
            a in "[ATGC]{1,50}",
            b in "[ATGC]{1,50}",
            m in 1i32..5, mm in -4i32..=0, g in -4i32..=0,
        ) {
            let s = ScoringScheme::new(m, mm, g).unwrap();
            prop_assert_eq!(sw_score(a.as_bytes(), b.as_bytes(), &s), oracle(a.as_bytes(), b.as_bytes(), &s));
        }

        #[test]
        fn score_symmetric_and_bounded(a in "[ATGC]{1,40}", b in "[ATGC]{1,40}") {
            let s = ScoringScheme::default();
            let (a, b) = (a.as_bytes(), b.as_bytes());
            let ab = sw_score(a, b, &s);
            prop_assert_eq!(ab, sw_score(b, a, &s));
            prop_assert!(ab <= sw_score(a, a, &s).min(sw_score(b, b, &s)));
            let d = sw_distance(a, b, &s);
            prop_assert!((0.0..=1.0).contains(&d));
            prop_assert_eq!(d, sw_distance(b, a, &s));
            prop_assert_eq!(sw_distance(a, a, &s), 0.0);
        }
    }
}
