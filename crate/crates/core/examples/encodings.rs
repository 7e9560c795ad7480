//! The three ways of turning a sequence into a vector.

use seqembed::alignment::ScoringScheme;
use seqembed::encoding::{one_hot_encode, ordinal_encode, reference_encode, sample_references, OrdinalMap};
use seqembed::sequences::{Alphabet, Sequence, SequenceSet};

fn main() -> seqembed::Result<()> {
    let dna = Alphabet::dna();
    let one = SequenceSet::new(vec![Sequence::new("s", "ATGC")], &dna)?;
    println!("one-hot ATGC: {:?}", one_hot_encode(&one, &dna, None)?.row(0));

    let two = SequenceSet::new(vec![Sequence::new("s", "GGTAC")], &dna)?;
    println!("ordinal GGTAC: {:?}", ordinal_encode(&two, &OrdinalMap::default(), None)?.row(0));

    let set = SequenceSet::new(
        vec![
            Sequence::new("a", "ATGCATGCAA"),
            Sequence::new("b", "ATGCATGCTA"),
            Sequence::new("c", "GGGCCCTTTA"),
            Sequence::new("d", "GGGCCCTTAA"),
        ],
        &dna,
    )?;
    let panel = sample_references(&set, 2, 1, ScoringScheme::default())?;
    let (enc, stats) = reference_encode(&set, &panel, None, 1)?;
    println!("panel {:?}, {} alignments", panel.ref_ids, stats.pair_alignments);
    for (id, row) in enc.ids().iter().zip(enc.rows()) {
        println!("  {id}: {row:?}");
    }
    Ok(())
}
