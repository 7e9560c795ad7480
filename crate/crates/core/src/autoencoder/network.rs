use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::spec::{LayerShape, NetworkSpec};
use crate::embedding::Embedding;
use crate::encoding::EncodedDataset;
use crate::error::{Error, Result};

/// Dense row-major `f64` matrix used for batches.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension {
                expected: cols,
                actual: r.len(),
            });
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    /// Upcasts the selected dataset rows.
    pub fn from_dataset_rows(data: &EncodedDataset, indices: &[usize]) -> Self {
        let cols = data.width();
        let mut out = Vec::with_capacity(indices.len() * cols);
        for &i in indices {
            out.extend(data.row(i).iter().map(|&v| f64::from(v)));
        }
        Matrix {
            rows: indices.len(),
            cols,
            data: out,
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Weights (`outputs x inputs`, row-major) and biases of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    fn zeros(shape: &LayerShape) -> Self {
        Layer {
            weights: vec![0.0; shape.inputs * shape.outputs],
            bias: vec![0.0; shape.outputs],
        }
    }
}

/// Trained or freshly initialized parameters for a [`NetworkSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelWeights {
    pub spec: NetworkSpec,
    pub seed: u64,
    pub layers: Vec<Layer>,
}

/// Per-layer gradients, shaped like [`ModelWeights::layers`].
pub type Gradients = Vec<Layer>;

pub struct Forward {
    pub reconstruction: Matrix,
    pub bottleneck: Matrix,
}

/// Uniform weights in `±sqrt(6 / fan_in)` and zero biases.
pub fn init_weights(spec: &NetworkSpec, seed: u64) -> Result<ModelWeights> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = spec
        .layers()
        .iter()
        .map(|shape| {
            let bound = (6.0 / shape.inputs as f64).sqrt();
            let dist = Uniform::new_inclusive(-bound, bound);
            let mut layer = Layer::zeros(shape);
            for w in layer.weights.iter_mut() {
                *w = dist.sample(&mut rng);
            }
            layer
        })
        .collect();
    Ok(ModelWeights {
        spec: spec.clone(),
        seed,
        layers,
    })
}

impl ModelWeights {
    /// Zeroed parameters, mainly for tests and gradient buffers.
    pub fn zeros(spec: &NetworkSpec) -> Result<Self> {
        spec.validate()?;
        Ok(ModelWeights {
            spec: spec.clone(),
            seed: 0,
            layers: spec.layers().iter().map(Layer::zeros).collect(),
        })
    }

    pub fn zero_gradients(&self) -> Gradients {
        self.spec.layers().iter().map(Layer::zeros).collect()
    }

    /// Checks layer shapes against the spec and that every value is finite.
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let shapes = self.spec.layers();
        if shapes.len() != self.layers.len() {
            return Err(Error::Format(format!(
                "spec has {} layers, weights have {}",
                shapes.len(),
                self.layers.len()
            )));
        }
        for (l, (shape, layer)) in shapes.iter().zip(&self.layers).enumerate() {
            if layer.weights.len() != shape.inputs * shape.outputs || layer.bias.len() != shape.outputs {
                return Err(Error::Format(format!("layer {l} does not match its shape")));
            }
            if layer.weights.iter().chain(&layer.bias).any(|v| !v.is_finite()) {
                return Err(Error::Numeric { layer: l });
            }
        }
        Ok(())
    }

    fn check_input(&self, x: &Matrix) -> Result<()> {
        if x.cols != self.spec.input_dim {
            return Err(Error::Dimension {
                expected: self.spec.input_dim,
                actual: x.cols,
            });
        }
        Ok(())
    }

    /// Runs layers `[0, upto)` keeping every pre-activation and activation.
    fn propagate(&self, x: &Matrix, upto: usize) -> Result<Vec<(Matrix, Matrix)>> {
        let shapes = self.spec.layers();
        let alpha = self.spec.alpha;
        let mut trace: Vec<(Matrix, Matrix)> = Vec::with_capacity(upto);
        for (l, (layer, shape)) in self.layers.iter().zip(&shapes).take(upto).enumerate() {
            let input = trace.last().map_or(x, |(_, h)| h);
            let z = affine(layer, shape, input);
            let act = shape.activation;
            let h = Matrix {
                rows: z.rows,
                cols: z.cols,
                data: z.data.iter().map(|&v| act.apply(v, alpha)).collect(),
            };
            if h.data.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numeric { layer: l });
            }
            trace.push((z, h));
        }
        Ok(trace)
    }

    pub fn forward(&self, x: &Matrix) -> Result<Forward> {
        self.check_input(x)?;
        let trace = self.propagate(x, self.layers.len())?;
        let bottleneck = trace[self.spec.encoder_depth() - 1].1.clone();
        let reconstruction = trace.into_iter().last().expect("at least two layers").1;
        Ok(Forward {
            reconstruction,
            bottleneck,
        })
    }

    /// Encoder half only.
    pub fn encode(&self, x: &Matrix) -> Result<Matrix> {
        self.check_input(x)?;
        let trace = self.propagate(x, self.spec.encoder_depth())?;
        Ok(trace.into_iter().last().expect("encoder has a layer").1)
    }

    /// Mean squared reconstruction error over the batch and every output
    /// dimension, with exact gradients for every weight and bias.
    pub fn loss_and_grads(&self, x: &Matrix) -> Result<(f64, Gradients)> {
        self.check_input(x)?;
        if x.rows == 0 {
            return Err(Error::Argument("empty batch".into()));
        }
        let shapes = self.spec.layers();
        let alpha = self.spec.alpha;
        let trace = self.propagate(x, self.layers.len())?;

        let output = &trace.last().expect("nonempty").1;
        let scale = 1.0 / (x.data.len() as f64);
        let mut loss = 0.0;
        // dL/dh for the output layer
        let mut delta = Matrix::zeros(x.rows, x.cols);
        for ((d, &y), &t) in delta.data.iter_mut().zip(&output.data).zip(&x.data) {
            let r = y - t;
            loss += r * r;
            *d = 2.0 * r * scale;
        }
        loss *= scale;

        let mut grads = self.zero_gradients();
        for l in (0..self.layers.len()).rev() {
            let (z, h) = &trace[l];
            let act = shapes[l].activation;
            // dL/dz
            for ((d, &zv), &hv) in delta.data.iter_mut().zip(&z.data).zip(&h.data) {
                *d *= act.derivative(zv, hv, alpha);
            }
            let input = if l == 0 { x } else { &trace[l - 1].1 };
            let g = &mut grads[l];
            let n_in = shapes[l].inputs;
            for b in 0..delta.rows {
                let xin = input.row(b);
                for (o, &d) in delta.row(b).iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    g.bias[o] += d;
                    let gw = &mut g.weights[o * n_in..(o + 1) * n_in];
                    for (w, &xi) in gw.iter_mut().zip(xin) {
                        *w += d * xi;
                    }
                }
            }
            if l > 0 {
                let mut next = Matrix::zeros(delta.rows, n_in);
                let weights = &self.layers[l].weights;
                for b in 0..delta.rows {
                    let out = &mut next.data[b * n_in..(b + 1) * n_in];
                    for (o, &d) in delta.row(b).iter().enumerate() {
                        if d == 0.0 {
                            continue;
                        }
                        for (v, &w) in out.iter_mut().zip(&weights[o * n_in..(o + 1) * n_in]) {
                            *v += d * w;
                        }
                    }
                }
                delta = next;
            }
        }
        Ok((loss, grads))
    }

    /// Flat view of every parameter, layer by layer, weights before biases.
    pub fn parameters(&self) -> impl Iterator<Item = &f64> {
        self.layers.iter().flat_map(|l| l.weights.iter().chain(&l.bias))
    }

    pub fn parameters_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers.iter_mut().flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }
}

/// `x W^T + b`
fn affine(layer: &Layer, shape: &LayerShape, x: &Matrix) -> Matrix {
    let mut z = Matrix::zeros(x.rows, shape.outputs);
    for b in 0..x.rows {
        let xin = x.row(b);
        let out = &mut z.data[b * shape.outputs..(b + 1) * shape.outputs];
        for (o, v) in out.iter_mut().enumerate() {
            let w = &layer.weights[o * shape.inputs..(o + 1) * shape.inputs];
            *v = layer.bias[o] + dot(w, xin);
        }
    }
    z
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators let the compiler vectorize; order is fixed so
    // results stay reproducible
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        for (lane, slot) in acc.iter_mut().enumerate() {
            *slot += a[4 * k + lane] * b[4 * k + lane];
        }
    }
    let mut tail = 0.0;
    for k in chunks * 4..a.len() {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn forward(w: &ModelWeights, x: &Matrix) -> Result<Forward> {
    w.forward(x)
}

pub fn loss_and_grads(w: &ModelWeights, x: &Matrix) -> Result<(f64, Gradients)> {
    w.loss_and_grads(x)
}

/// Encoder-only pass over every row. Used unchanged for points that were
/// not part of training.
pub fn embed(w: &ModelWeights, data: &EncodedDataset) -> Result<Embedding> {
    if data.width() != w.spec.input_dim {
        return Err(Error::Dimension {
            expected: w.spec.input_dim,
            actual: data.width(),
        });
    }
    const CHUNK: usize = 1024;
    let d = w.spec.bottleneck();
    let mut coords = Vec::with_capacity(data.len() * d);
    let all: Vec<usize> = (0..data.len()).collect();
    for chunk in all.chunks(CHUNK) {
        let x = Matrix::from_dataset_rows(data, chunk);
        coords.extend(w.encode(&x)?.data);
    }
    Embedding::new(data.ids().to_vec(), d, coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_net(input: usize, widths: Vec<usize>, seed: u64) -> ModelWeights {
        let spec = NetworkSpec::new(input, widths).unwrap();
        let mut w = init_weights(&spec, seed).unwrap();
        // nonzero biases so every code path is exercised
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb1a5);
        let dist = Uniform::new(-0.3, 0.3);
        for l in w.layers.iter_mut() {
            for b in l.bias.iter_mut() {
                *b = dist.sample(&mut rng);
            }
        }
        w
    }

    fn random_batch(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Uniform::new(0.0, 1.0);
        Matrix {
            rows,
            cols,
            data: (0..rows * cols).map(|_| dist.sample(&mut rng)).collect(),
        }
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let spec = NetworkSpec::new(1, vec![1]).unwrap();
        let a = init_weights(&spec, 5).unwrap();
        assert_eq!(a, init_weights(&spec, 5).unwrap());
        assert_ne!(a, init_weights(&spec, 6).unwrap());
        let bound = 6f64.sqrt();
        assert!(a.parameters().all(|w| w.abs() <= bound));
        assert!(a.layers.iter().all(|l| l.bias.iter().all(|&b| b == 0.0)));
    }

    #[test]
    fn init_variance_matches_fan_in() {
        let spec = NetworkSpec::new(1000, vec![1000]).unwrap();
        let w = init_weights(&spec, 1).unwrap();
        let ws = &w.layers[0].weights;
        let mean = ws.iter().sum::<f64>() / ws.len() as f64;
        let var = ws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / ws.len() as f64;
        let expected = 2.0 / 1000.0;
        assert!((var - expected).abs() / expected < 0.1, "variance {var}");
    }

    #[test]
    fn zero_weights_reconstruct_zero() {
        let spec = NetworkSpec::new(4, vec![3, 2]).unwrap();
        let w = ModelWeights::zeros(&spec).unwrap();
        let f = w.forward(&random_batch(5, 4, 1)).unwrap();
        assert!(f.reconstruction.data.iter().all(|&v| v == 0.0));
        assert_eq!(f.bottleneck.cols, 2);
    }

    #[test]
    fn unit_chain_passes_positive_input() {
        let spec = NetworkSpec::new(1, vec![1]).unwrap();
        let mut w = ModelWeights::zeros(&spec).unwrap();
        w.layers[0].weights[0] = 1.0;
        w.layers[1].weights[0] = 1.0;
        let x = Matrix::from_rows(&[vec![0.7]]).unwrap();
        assert_eq!(w.forward(&x).unwrap().reconstruction.data, vec![0.7]);
    }

    #[test]
    fn leaky_bottleneck_and_relu_hidden_by_hand() {
        // 3 -> 2 (relu) -> 1 (leaky) -> 2 (relu) -> 3 (linear), 2 samples.
        let spec = NetworkSpec::new(3, vec![2, 1]).unwrap();
        let mut w = ModelWeights::zeros(&spec).unwrap();
        w.layers[0].weights = vec![1.0, -1.0, 0.5, 0.0, 2.0, -1.0];
        w.layers[0].bias = vec![0.1, -0.2];
        w.layers[1].weights = vec![-1.0, 0.5];
        w.layers[1].bias = vec![0.0];
        w.layers[2].weights = vec![2.0, -3.0];
        w.layers[2].bias = vec![0.5, 0.25];
        w.layers[3].weights = vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        w.layers[3].bias = vec![0.0, 0.0, -1.0];
        let x = Matrix::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 1.0, 0.0]]).unwrap();

        // Sample 0: z1 = [1+1+0.1, 0-2-0.2] = [2.1, -2.2] -> h1 = [2.1, 0]
        //   z2 = -2.1 -> leaky 0.01 * -2.1 = -0.021
        //   z3 = [2*-0.021+0.5, -3*-0.021+0.25] = [0.458, 0.313] -> relu same
        //   out = [0.458, 0.313, 0.458+0.313-1] = [0.458, 0.313, -0.229]
        // Sample 1: z1 = [-1+0.1, 2-0.2] = [-0.9, 1.8] -> h1 = [0, 1.8]
        //   z2 = 0.9 -> 0.9
        //   z3 = [1.8+0.5, -2.7+0.25] = [2.3, -2.45] -> h3 = [2.3, 0]
        //   out = [2.3, 0, 1.3]
        let f = w.forward(&x).unwrap();
        let expected_b = [-0.021, 0.9];
        let expected_r = [0.458, 0.313, -0.229, 2.3, 0.0, 1.3];
        for (a, e) in f.bottleneck.data.iter().zip(expected_b) {
            assert!((a - e).abs() < 1e-12, "{a} vs {e}");
        }
        for (a, e) in f.reconstruction.data.iter().zip(expected_r) {
            assert!((a - e).abs() < 1e-12, "{a} vs {e}");
        }
    }

    #[test]
    fn shape_mismatch() {
        let w = random_net(4, vec![2], 0);
        assert!(matches!(
            w.forward(&random_batch(1, 5, 0)),
            Err(Error::Dimension { expected: 4, actual: 5 })
        ));
    }

    #[test]
    fn perfect_reconstruction_has_zero_loss_and_gradient() {
        // 1 -> 1 -> 1 with unit weights reproduces positive inputs exactly.
        let spec = NetworkSpec::new(1, vec![1]).unwrap();
        let mut w = ModelWeights::zeros(&spec).unwrap();
        w.layers[0].weights[0] = 1.0;
        w.layers[1].weights[0] = 1.0;
        let x = Matrix::from_rows(&[vec![0.3], vec![0.9]]).unwrap();
        let (loss, grads) = w.loss_and_grads(&x).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grads.iter().all(|g| g.weights.iter().chain(&g.bias).all(|&v| v == 0.0)));
    }

    #[test]
    fn scalar_output_weight_gradient_closed_form() {
        // With first weight 1 and output weight v, reconstruction is v*x for
        // x > 0, so dL/dv = 2 * mean((v x - x) * x).
        let spec = NetworkSpec::new(1, vec![1]).unwrap();
        let mut w = ModelWeights::zeros(&spec).unwrap();
        w.layers[0].weights[0] = 1.0;
        w.layers[1].weights[0] = 0.5;
        let xs = [0.2, 0.6, 1.0];
        let x = Matrix::from_rows(&xs.iter().map(|&v| vec![v]).collect::<Vec<_>>()).unwrap();
        let (loss, grads) = w.loss_and_grads(&x).unwrap();
        let expected_loss = xs.iter().map(|x| (0.5 * x - x) * (0.5 * x - x)).sum::<f64>() / 3.0;
        let expected_grad = 2.0 * xs.iter().map(|x| (0.5 * x - x) * x).sum::<f64>() / 3.0;
        assert!((loss - expected_loss).abs() < 1e-15);
        assert!((grads[1].weights[0] - expected_grad).abs() < 1e-15);
    }

    #[test]
    fn gradients_match_central_differences() {
        let w = random_net(10, vec![6, 3], 17);
        let x = random_batch(8, 10, 23);
        let (_, grads) = w.loss_and_grads(&x).unwrap();
        let analytic: Vec<f64> = grads.iter().flat_map(|g| g.weights.iter().chain(&g.bias).copied()).collect();
        let h = 1e-5;
        let count = w.parameters().count();
        for (p, &a) in analytic.iter().enumerate().take(count) {
            let mut plus = w.clone();
            *plus.parameters_mut().nth(p).unwrap() += h;
            let mut minus = w.clone();
            *minus.parameters_mut().nth(p).unwrap() -= h;
            let numeric = (plus.loss_and_grads(&x).unwrap().0 - minus.loss_and_grads(&x).unwrap().0) / (2.0 * h);
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
            assert!(rel < 1e-4, "param {p}: analytic {a}, numeric {numeric}");
        }
    }

    #[test]
    fn embed_is_rowwise() {
        let w = random_net(6, vec![4, 3], 2);
        let ids: Vec<String> = (0..5).map(|i| format!("r{i}")).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dist = Uniform::new(0.0f32, 1.0);
        let feats: Vec<f32> = (0..30).map(|_| dist.sample(&mut rng)).collect();
        let data = EncodedDataset::new(
            ids,
            feats,
            crate::encoding::EncodingMeta::Ordinal {
                values: vec![('A', 1.0)],
                target_len: 6,
            },
        )
        .unwrap();
        let full = embed(&w, &data).unwrap();
        assert_eq!(full.dim(), 3);
        let sub = embed(&w, &data.select(&[3, 1])).unwrap();
        assert_eq!(sub.point(0), full.point(3));
        assert_eq!(sub.point(1), full.point(1));
        assert_eq!(sub.ids(), &["r3".to_string(), "r1".to_string()]);
    }

    #[test]
    fn decoder_weights_do_not_affect_embedding() {
        let w = random_net(6, vec![4, 2], 9);
        let x = random_batch(4, 6, 1);
        let before = w.encode(&x).unwrap();
        let mut perturbed = w.clone();
        for l in perturbed.layers[w.spec.encoder_depth()..].iter_mut() {
            l.weights.iter_mut().for_each(|v| *v += 1.0);
        }
        assert_eq!(perturbed.encode(&x).unwrap(), before);
    }
}
