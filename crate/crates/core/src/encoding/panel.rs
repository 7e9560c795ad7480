use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::normalization_name;
use super::{EncodedDataset, EncodingMeta};
use crate::alignment::{rect_matrix, AlignmentStats, Normalization, ScoringScheme};
use crate::error::{Error, Result};
use crate::sequences::{Alphabet, Sequence, SequenceSet};

/// Randomly chosen reference sequences, identified by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferencePanel {
    pub ref_ids: Vec<String>,
    pub rng_seed: u64,
    pub scheme: ScoringScheme,
}

impl ReferencePanel {
    pub fn len(&self) -> usize {
        self.ref_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ref_ids.is_empty()
    }

    /// The panel's sequences, looked up in `source`.
    pub fn resolve(&self, source: &SequenceSet) -> Result<SequenceSet> {
        source.select_ids(&self.ref_ids)
    }
}

/// Draws `k` distinct members of `set` uniformly at random.
pub fn sample_references(set: &SequenceSet, k: usize, rng_seed: u64, scheme: ScoringScheme) -> Result<ReferencePanel> {
    if k == 0 || k > set.len() {
        return Err(Error::Argument(format!(
            "panel size {k} must be between 1 and the set size {}",
            set.len()
        )));
    }
    scheme.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let picks = rand::seq::index::sample(&mut rng, set.len(), k);
    Ok(ReferencePanel {
        ref_ids: picks.iter().map(|i| set.sequences()[i].id.clone()).collect(),
        rng_seed,
        scheme,
    })
}

/// Row `i` is the vector of distances from `set[i]` to each panel member.
///
/// Panel ids are looked up in `refs` when given, otherwise in `set` itself.
pub fn reference_encode(
    set: &SequenceSet,
    panel: &ReferencePanel,
    refs: Option<&SequenceSet>,
    threads: usize,
) -> Result<(EncodedDataset, AlignmentStats)> {
    if panel.is_empty() {
        return Err(Error::Argument("reference panel is empty".into()));
    }
    let panel_set = panel.resolve(refs.unwrap_or(set))?;
    let (matrix, stats) = rect_matrix(set, &panel_set, &panel.scheme, threads)?;
    let data = EncodedDataset::new(
        set.ids(),
        matrix.into_values(),
        EncodingMeta::Reference {
            ref_ids: panel.ref_ids.clone(),
            rng_seed: panel.rng_seed,
            scheme: panel.scheme,
        },
    )?;
    Ok((data, stats))
}

/// TSV: a `#panel` line with seed and scoring parameters, an `id\tresidues`
/// header, then one line per reference. The residues make the file enough
/// to encode new sequences without the original dataset.
pub fn write_panel<W: Write>(mut w: W, panel: &ReferencePanel, refs: &SequenceSet) -> Result<()> {
    let resolved = panel.resolve(refs)?;
    let s = &panel.scheme;
    writeln!(
        w,
        "#panel\tseed={}\tmatch={}\tmismatch={}\tgap={}\tnormalization={}",
        panel.rng_seed,
        s.match_score,
        s.mismatch,
        s.gap,
        normalization_name(s.normalization)
    )?;
    writeln!(w, "id\tresidues")?;
    for seq in resolved.iter() {
        writeln!(w, "{}\t{}", seq.id, String::from_utf8_lossy(&seq.residues))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_panel<R: BufRead>(r: R, alphabet: &Alphabet) -> Result<(ReferencePanel, SequenceSet)> {
    let mut lines = r.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| Error::Format("empty panel file".into()))?;
    let first = first?;
    let mut fields = first.split('\t');
    if fields.next() != Some("#panel") {
        return Err(Error::Format("panel file must start with #panel".into()));
    }
    let mut seed = None;
    let mut scheme = ScoringScheme::default();
    for f in fields {
        let (k, v) = f
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad panel field {f:?}")))?;
        let int = || v.parse::<i32>().map_err(|_| Error::Format(format!("bad value for {k}")));
        match k {
            "seed" => seed = Some(v.parse::<u64>().map_err(|_| Error::Format("bad seed".into()))?),
            "match" => scheme.match_score = int()?,
            "mismatch" => scheme.mismatch = int()?,
            "gap" => scheme.gap = int()?,
            "normalization" => {
                scheme.normalization = match v {
                    "mean-self" => Normalization::MeanSelf,
                    "min-self" => Normalization::MinSelf,
                    _ => return Err(Error::Format(format!("unknown normalization {v:?}"))),
                }
            }
            _ => return Err(Error::Format(format!("unknown panel field {k:?}"))),
        }
    }
    scheme.validate().map_err(|e| Error::Format(e.to_string()))?;
    let seed = seed.ok_or_else(|| Error::Format("panel file lacks seed".into()))?;

    let mut sequences = Vec::new();
    for (n, line) in lines {
        let line = line?;
        if line.is_empty() || (n == 1 && line == "id\tresidues") {
            continue;
        }
        let (id, residues) = line.split_once('\t').ok_or_else(|| Error::Parse {
            line: n + 1,
            message: "expected id<TAB>residues".into(),
        })?;
        sequences.push(Sequence::new(id, residues));
    }
    let refs = SequenceSet::new(sequences, alphabet)?;
    let panel = ReferencePanel {
        ref_ids: refs.ids(),
        rng_seed: seed,
        scheme,
    };
    if panel.is_empty() {
        return Err(Error::Format("panel file lists no references".into()));
    }
    Ok((panel, refs))
}

pub fn write_panel_file(path: &Path, panel: &ReferencePanel, refs: &SequenceSet) -> Result<()> {
    write_panel(BufWriter::new(File::create(path)?), panel, refs)
}

pub fn read_panel_file(path: &Path, alphabet: &Alphabet) -> Result<(ReferencePanel, SequenceSet)> {
    read_panel(BufReader::new(File::open(path)?), alphabet)
}
