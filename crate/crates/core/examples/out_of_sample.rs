use seqembed::alignment::ScoringScheme;
use seqembed::autoencoder::{NetworkSpec, TrainConfig};
use seqembed::encoding::sample_references;
use seqembed::evaluation::{oos_protocol, OosOptions};
use seqembed::sequences::{synth_dataset, SynthConfig};

fn main() -> seqembed::Result<()> {
    let syn = synth_dataset(&SynthConfig {
        per_cluster: 40,
        seed_len: 100,
        ..SynthConfig::default()
    })?;
    let panel = sample_references(&syn.set, 25, 3, ScoringScheme::default())?;
    let spec = NetworkSpec::new(panel.len(), vec![64, 3])?;
    let cfg = TrainConfig {
        epochs: 40,
        batch_size: 16,
        ..TrainConfig::default()
    };

    let report = oos_protocol(&syn.set, &panel, &spec, &cfg, &OosOptions::new(5, 0.1, 9))?;
    println!(
        "{} held out, {} changed cluster: {}",
        report.result.total, report.result.mismatches, report.percent
    );
    println!("agreement on training points: {:.4}", report.in_sample_accuracy);
    Ok(())
}
