//! Generate a clustered synthetic set, add a few exact copies, and collapse them.

use seqembed::sequences::{dedup, synth_dataset, write_fasta, Alphabet, Sequence, SequenceSet, SynthConfig};

fn main() -> seqembed::Result<()> {
    let syn = synth_dataset(&SynthConfig {
        n_clusters: 3,
        per_cluster: 4,
        seed_len: 40,
        ..SynthConfig::default()
    })?;

    let mut seqs = syn.set.clone().into_sequences();
    for i in 0..3 {
        let copy = seqs[i].residues.clone();
        seqs.push(Sequence::new(format!("dup{i}"), copy));
    }
    let with_dups = SequenceSet::new(seqs, &Alphabet::dna())?;

    let d = dedup(&with_dups);
    println!("{} sequences, {} unique, {} occur more than once", with_dups.len(), d.unique.len(), d.recurrent.len());
    for (id, n) in d.multiplicity.iter().filter(|(_, n)| *n > 1) {
        println!("  {id} x{n}");
    }

    let mut out = Vec::new();
    write_fasta(&mut out, d.unique.iter().take(2))?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}
