//! Recover a 3D layout from its distance matrix with SMACOF.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqembed::alignment::DistanceMatrix;
use seqembed::mds::{smacof, MdsConfig};

fn main() -> seqembed::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 40;
    let pts: Vec<[f64; 3]> = (0..n).map(|_| [0.0; 3].map(|_: f64| rng.gen_range(0.0..0.5))).collect();
    let mut d = vec![0f32; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum::<f64>().sqrt() as f32;
        }
    }
    let m = DistanceMatrix::from_values(n, n, true, d)?;
    let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();

    let r = smacof(&m, &ids, &MdsConfig { eps: 1e-12, max_iter: 5000, ..MdsConfig::default() })?;
    let h = &r.stress_history;
    println!("stress {:.3e} -> {:.3e} in {} iterations", h[0], h[h.len() - 1], r.iterations);
    Ok(())
}
