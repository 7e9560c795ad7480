//! Fully-connected autoencoder with hand-written backpropagation.
//!
//! The encoder maps a `D`-wide input through rectifier hidden layers to a
//! narrow bottleneck with a leaky rectifier; the decoder mirrors it back to
//! `D` with a linear output. Training minimizes mean squared reconstruction
//! error. After training only the encoder is used: [`embed`] maps any
//! encoded sequence, seen during training or not, to bottleneck coordinates.

mod model_io;
mod network;
mod spec;
mod train;

pub use model_io::{load_model, load_model_file, save_model, save_model_file};
pub use network::{embed, forward, init_weights, loss_and_grads, Forward, Gradients, Layer, Matrix, ModelWeights};
pub use spec::{Activation, LayerShape, NetworkSpec};
pub use train::{train, Optimizer, TrainConfig, TrainOutcome, Trainer};
