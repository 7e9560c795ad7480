//! Reference-panel encoding, autoencoder training, and embedding quality.

use seqembed::alignment::ScoringScheme;
use seqembed::autoencoder::{embed, save_model, train, NetworkSpec, TrainConfig};
use seqembed::encoding::{reference_encode, sample_references};
use seqembed::evaluation::{distance_heatmap, silhouette, ClusterLabels, InputDistances, PairSampling};
use seqembed::sequences::{synth_dataset, SynthConfig};

fn main() -> seqembed::Result<()> {
    let syn = synth_dataset(&SynthConfig {
        per_cluster: 40,
        seed_len: 120,
        ..SynthConfig::default()
    })?;
    let scheme = ScoringScheme::default();
    let panel = sample_references(&syn.set, 30, 7, scheme)?;
    let (data, _) = reference_encode(&syn.set, &panel, None, 0)?;

    let spec = NetworkSpec::new(data.width(), vec![128, 3])?;
    let cfg = TrainConfig {
        epochs: 100,
        batch_size: 16,
        ..TrainConfig::default()
    };
    let fit = train(&data, &spec, &cfg)?;
    println!(
        "{} parameters, loss {:.5} -> {:.5} over {} updates",
        spec.parameter_count(),
        fit.history[0],
        fit.history.last().unwrap(),
        fit.updates
    );
    println!("model file is {} bytes", save_model(&fit.weights)?.len());

    let emb = embed(&fit.weights, &data)?;
    let truth = ClusterLabels::from_labels(syn.set.ids(), syn.labels.clone())?;
    println!("silhouette vs true clusters: {:.3}", silhouette(&emb, &truth)?.mean);

    let grid = distance_heatmap(
        &InputDistances::Sequences(&syn.set, scheme),
        &emb,
        PairSampling::Random { pairs: 2000, seed: 1 },
        10,
    )?;
    println!("pearson(SW distance, embedded distance) = {:.3}", grid.pearson);
    Ok(())
}
