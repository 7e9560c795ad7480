use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::{init_weights, Matrix, ModelWeights};
use super::spec::NetworkSpec;
use crate::encoding::EncodedDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Optimizer {
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
    Sgd { momentum: f64 },
}

impl Default for Optimizer {
    fn default() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    #[serde(default)]
    pub optimizer: Optimizer,
    pub shuffle_seed: u64,
    pub init_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            batch_size: 256,
            learning_rate: 1e-3,
            optimizer: Optimizer::default(),
            shuffle_seed: 0,
            init_seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        self.validate_step()
    }

    fn validate_step(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be >= 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!("learning rate {} must be > 0", self.learning_rate)));
        }
        match self.optimizer {
            Optimizer::Adam { beta1, beta2, epsilon } => {
                if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) || epsilon <= 0.0 {
                    return Err(Error::Config("adam needs beta1, beta2 in [0, 1) and epsilon > 0".into()));
                }
            }
            Optimizer::Sgd { momentum } => {
                if !(0.0..1.0).contains(&momentum) {
                    return Err(Error::Config("sgd momentum must be in [0, 1)".into()));
                }
            }
        }
        Ok(())
    }
}

/// Output of [`train`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub weights: ModelWeights,
    /// Mean per-sample loss of each epoch.
    pub history: Vec<f64>,
    /// Optimizer steps taken.
    pub updates: usize,
}

/// Mini-batch optimizer loop over a fixed set of weights.
///
/// The shuffle stream and optimizer moments persist across calls to
/// [`run_epoch`](Self::run_epoch), so `n` single-epoch calls equal one
/// `n`-epoch [`train`] run.
pub struct Trainer {
    weights: ModelWeights,
    cfg: TrainConfig,
    rng: ChaCha8Rng,
    first: Vec<f64>,
    second: Vec<f64>,
    updates: usize,
    epochs_done: usize,
}

impl Trainer {
    pub fn new(weights: ModelWeights, cfg: TrainConfig) -> Result<Self> {
        cfg.validate_step()?;
        weights.validate()?;
        let n = weights.parameters().count();
        Ok(Trainer {
            rng: ChaCha8Rng::seed_from_u64(cfg.shuffle_seed),
            first: vec![0.0; n],
            second: vec![0.0; n],
            weights,
            cfg,
            updates: 0,
            epochs_done: 0,
        })
    }

    pub fn weights(&self) -> &ModelWeights {
        &self.weights
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn into_weights(self) -> ModelWeights {
        self.weights
    }

    /// One pass over `data` in shuffled mini-batches. Returns the mean
    /// per-sample loss seen during the pass.
    pub fn run_epoch(&mut self, data: &EncodedDataset) -> Result<f64> {
        if data.width() != self.weights.spec.input_dim {
            return Err(Error::Dimension {
                expected: self.weights.spec.input_dim,
                actual: data.width(),
            });
        }
        if data.is_empty() {
            return Err(Error::Argument("cannot train on an empty dataset".into()));
        }
        let epoch = self.epochs_done;
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(&mut self.rng);

        let mut total = 0.0;
        for batch in order.chunks(self.cfg.batch_size) {
            let x = Matrix::from_dataset_rows(data, batch);
            let (loss, grads) = self.weights.loss_and_grads(&x).map_err(|e| match e {
                Error::Numeric { .. } => Error::Diverged { epoch, loss: f64::NAN },
                other => other,
            })?;
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch, loss });
            }
            total += loss * batch.len() as f64;
            let flat: Vec<f64> = grads.iter().flat_map(|g| g.weights.iter().chain(&g.bias).copied()).collect();
            self.step(&flat);
        }
        self.epochs_done += 1;
        let mean = total / data.len() as f64;
        if !mean.is_finite() {
            return Err(Error::Diverged { epoch, loss: mean });
        }
        Ok(mean)
    }

    fn step(&mut self, grads: &[f64]) {
        self.updates += 1;
        let lr = self.cfg.learning_rate;
        match self.cfg.optimizer {
            Optimizer::Adam { beta1, beta2, epsilon } => {
                let t = self.updates as i32;
                let c1 = 1.0 - beta1.powi(t);
                let c2 = 1.0 - beta2.powi(t);
                for (((p, &g), m), v) in self
                    .weights
                    .parameters_mut()
                    .zip(grads)
                    .zip(self.first.iter_mut())
                    .zip(self.second.iter_mut())
                {
                    *m = beta1 * *m + (1.0 - beta1) * g;
                    *v = beta2 * *v + (1.0 - beta2) * g * g;
                    let m_hat = *m / c1;
                    let v_hat = *v / c2;
                    *p -= lr * m_hat / (v_hat.sqrt() + epsilon);
                }
            }
            Optimizer::Sgd { momentum } => {
                for ((p, &g), vel) in self.weights.parameters_mut().zip(grads).zip(self.first.iter_mut()) {
                    *vel = momentum * *vel - lr * g;
                    *p += *vel;
                }
            }
        }
    }
}

/// Initializes weights from `cfg.init_seed` and trains for `cfg.epochs`.
pub fn train(data: &EncodedDataset, spec: &NetworkSpec, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if data.width() != spec.input_dim {
        return Err(Error::Dimension {
            expected: spec.input_dim,
            actual: data.width(),
        });
    }
    let mut trainer = Trainer::new(init_weights(spec, cfg.init_seed)?, cfg.clone())?;
    let mut history = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        history.push(trainer.run_epoch(data)?);
    }
    Ok(TrainOutcome {
        updates: trainer.updates(),
        weights: trainer.into_weights(),
        history,
    })
}
