//! Stress-majorization MDS (SMACOF) with uniform weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::DistanceMatrix;
use crate::embedding::{euclidean, Embedding};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MdsConfig {
    pub target_dim: usize,
    pub max_iter: usize,
    /// Stop once the relative stress decrease of an iteration drops below this.
    pub eps: f64,
    pub rng_seed: u64,
}

impl Default for MdsConfig {
    fn default() -> Self {
        MdsConfig {
            target_dim: 3,
            max_iter: 1000,
            eps: 1e-8,
            rng_seed: 0,
        }
    }
}

impl MdsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_dim == 0 {
            return Err(Error::Config("MDS target dimension must be >= 1".into()));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Config(format!("MDS eps {} must be > 0", self.eps)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdsResult {
    pub embedding: Embedding,
    /// Stress of the initial layout followed by the stress after each iteration.
    pub stress_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Raw stress `sum_{i<j} (delta_ij - ||x_i - x_j||)^2`.
pub fn stress(emb: &Embedding, d_in: &DistanceMatrix) -> Result<f64> {
    check_shape(d_in, emb.len())?;
    Ok(raw_stress(emb.coords(), emb.dim(), d_in))
}

fn check_shape(d_in: &DistanceMatrix, n: usize) -> Result<()> {
    if d_in.rows() != n || d_in.cols() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: d_in.rows().max(d_in.cols()),
        });
    }
    Ok(())
}

fn raw_stress(x: &[f64], dim: usize, d_in: &DistanceMatrix) -> f64 {
    let n = d_in.rows();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = &x[i * dim..(i + 1) * dim];
            (i + 1..n)
                .map(|j| {
                    let r = f64::from(d_in.get(i, j)) - euclidean(xi, &x[j * dim..(j + 1) * dim]);
                    r * r
                })
                .sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

/// One Guttman transform `X <- (1/N) B(X) X`.
fn guttman(x: &[f64], dim: usize, d_in: &DistanceMatrix) -> Vec<f64> {
    let n = d_in.rows();
    let mut next = vec![0.0; x.len()];
    next.par_chunks_mut(dim).enumerate().for_each(|(i, out)| {
        let xi = &x[i * dim..(i + 1) * dim];
        for j in 0..n {
            if j == i {
                continue;
            }
            let xj = &x[j * dim..(j + 1) * dim];
            let d = euclidean(xi, xj);
            if d == 0.0 {
                continue;
            }
            let w = f64::from(d_in.get(i, j)) / d;
            for k in 0..dim {
                out[k] += w * (xi[k] - xj[k]);
            }
        }
        for v in out.iter_mut() {
            *v /= n as f64;
        }
    });
    next
}

/// Layout `ids` in `cfg.target_dim` dimensions so Euclidean distances
/// approximate `d_in`. Starts from coordinates uniform in `[-0.5, 0.5]`.
pub fn smacof(d_in: &DistanceMatrix, ids: &[String], cfg: &MdsConfig) -> Result<MdsResult> {
    cfg.validate()?;
    check_shape(d_in, ids.len())?;
    d_in.check_symmetric()?;
    let n = ids.len();
    let dim = cfg.target_dim;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut x: Vec<f64> = (0..n * dim).map(|_| rng.gen_range(-0.5..=0.5)).collect();
    let mut sigma = raw_stress(&x, dim, d_in);
    let mut stress_history = vec![sigma];
    let mut iterations = 0;
    let mut converged = sigma == 0.0;

    while !converged && iterations < cfg.max_iter {
        let next = guttman(&x, dim, d_in);
        let next_sigma = raw_stress(&next, dim, d_in);
        iterations += 1;
        if next_sigma > sigma {
            // Rounding noise at the optimum; keep the better layout.
            converged = true;
            break;
        }
        let decrease = (sigma - next_sigma) / sigma;
        x = next;
        sigma = next_sigma;
        stress_history.push(sigma);
        converged = sigma == 0.0 || decrease < cfg.eps;
    }

    Ok(MdsResult {
        embedding: Embedding::new(ids.to_vec(), dim, x)?,
        stress_history,
        iterations,
        converged,
    })
}
