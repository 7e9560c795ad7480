use seqembed::alignment::{pairwise_matrix, rect_matrix, sw_distance, sw_score, write_matrix_csv, ScoringScheme};
use seqembed::sequences::{synth_dataset, SynthConfig};

fn main() -> seqembed::Result<()> {
    let scheme = ScoringScheme::default();
    println!("score(GGTAC, ATGC) = {}", sw_score(b"GGTAC", b"ATGC", &scheme));
    println!("distance(ATGC, ATGG) = {}", sw_distance(b"ATGC", b"ATGG", &scheme));

    let set = synth_dataset(&SynthConfig {
        n_clusters: 2,
        per_cluster: 3,
        seed_len: 50,
        ..SynthConfig::default()
    })?
    .set;

    // Full matrix: N(N-1)/2 alignments. Against a panel: N*K.
    let (m, stats) = pairwise_matrix(&set, &scheme, 0)?;
    println!("{} sequences -> {} pair alignments, {} DP cells", set.len(), stats.pair_alignments, stats.cells);
    let panel = set.select(&[0, 3]);
    let (r, rstats) = rect_matrix(&set, &panel, &scheme, 0)?;
    println!("{}x{} panel matrix -> {} pair alignments", r.rows(), r.cols(), rstats.pair_alignments);

    let mut csv = Vec::new();
    write_matrix_csv(&mut csv, &m)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}
