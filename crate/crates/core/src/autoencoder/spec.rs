use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    Identity,
    Relu,
    LeakyRelu,
    Sigmoid,
}

impl Activation {
    pub(crate) fn tag(self) -> u8 {
        match self {
            Activation::Identity => 0,
            Activation::Relu => 1,
            Activation::LeakyRelu => 2,
            Activation::Sigmoid => 3,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        Some(match tag {
            0 => Activation::Identity,
            1 => Activation::Relu,
            2 => Activation::LeakyRelu,
            3 => Activation::Sigmoid,
            _ => return None,
        })
    }

    #[inline]
    pub(crate) fn apply(self, z: f64, alpha: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Relu => z.max(0.0),
            Activation::LeakyRelu => {
                if z > 0.0 {
                    z
                } else {
                    alpha * z
                }
            }
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        }
    }

    /// Derivative given the pre-activation `z` and the activation `h`.
    #[inline]
    pub(crate) fn derivative(self, z: f64, h: f64, alpha: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu => {
                if z > 0.0 {
                    1.0
                } else {
                    alpha
                }
            }
            Activation::Sigmoid => h * (1.0 - h),
        }
    }
}

/// Layer structure of a symmetric autoencoder.
///
/// `encoder_hidden` lists encoder widths ending with the bottleneck, e.g.
/// `[128, 3]`. The decoder mirrors the non-bottleneck widths and ends at
/// `input_dim`: `D -> 128 -> 3 -> 128 -> D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub encoder_hidden: Vec<usize>,
    /// Negative slope of the bottleneck's leaky rectifier.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_hidden")]
    pub hidden_activation: Activation,
    #[serde(default = "default_bottleneck")]
    pub bottleneck_activation: Activation,
    #[serde(default = "default_output")]
    pub output_activation: Activation,
}

fn default_alpha() -> f64 {
    0.01
}
fn default_hidden() -> Activation {
    Activation::Relu
}
fn default_bottleneck() -> Activation {
    Activation::LeakyRelu
}
fn default_output() -> Activation {
    Activation::Identity
}

/// One fully-connected layer's shape and activation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerShape {
    pub inputs: usize,
    pub outputs: usize,
    pub activation: Activation,
}

impl NetworkSpec {
    /// Rectifier hidden layers, leaky bottleneck with slope 0.01, linear output.
    pub fn new(input_dim: usize, encoder_hidden: Vec<usize>) -> Result<Self> {
        let spec = NetworkSpec {
            input_dim,
            encoder_hidden,
            alpha: default_alpha(),
            hidden_activation: default_hidden(),
            bottleneck_activation: default_bottleneck(),
            output_activation: default_output(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Parses a width list such as `128x3` or `512x128x32x3`.
    pub fn parse_widths(s: &str) -> Result<Vec<usize>> {
        s.split(['x', ',', '-'])
            .map(|w| {
                w.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad layer width {w:?} in {s:?}")))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::Config("input dimension must be >= 1".into()));
        }
        if self.encoder_hidden.is_empty() || self.encoder_hidden.contains(&0) {
            return Err(Error::Config(format!(
                "encoder widths {:?} must be nonempty and all >= 1",
                self.encoder_hidden
            )));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::Config(format!("leaky slope {} must be finite and >= 0", self.alpha)));
        }
        Ok(())
    }

    pub fn bottleneck(&self) -> usize {
        *self.encoder_hidden.last().expect("validated spec")
    }

    /// Number of layers in the encoder half.
    pub fn encoder_depth(&self) -> usize {
        self.encoder_hidden.len()
    }

    /// Every layer, encoder first, in evaluation order.
    pub fn layers(&self) -> Vec<LayerShape> {
        let hidden = &self.encoder_hidden[..self.encoder_hidden.len() - 1];
        let mut widths = vec![self.input_dim];
        widths.extend_from_slice(&self.encoder_hidden);
        widths.extend(hidden.iter().rev());
        widths.push(self.input_dim);

        let bottleneck_layer = self.encoder_hidden.len() - 1;
        let last = widths.len() - 2;
        (0..widths.len() - 1)
            .map(|l| LayerShape {
                inputs: widths[l],
                outputs: widths[l + 1],
                activation: if l == bottleneck_layer {
                    self.bottleneck_activation
                } else if l == last {
                    self.output_activation
                } else {
                    self.hidden_activation
                },
            })
            .collect()
    }

    /// Total weight and bias count.
    pub fn parameter_count(&self) -> usize {
        self.layers().iter().map(|l| l.inputs * l.outputs + l.outputs).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirrored_layers() {
        let spec = NetworkSpec::new(10, vec![6, 3]).unwrap();
        let shapes: Vec<(usize, usize, Activation)> =
            spec.layers().iter().map(|l| (l.inputs, l.outputs, l.activation)).collect();
        assert_eq!(
            shapes,
            vec![
                (10, 6, Activation::Relu),
                (6, 3, Activation::LeakyRelu),
                (3, 6, Activation::Relu),
                (6, 10, Activation::Identity),
            ]
        );
    }

    #[test]
    fn single_layer_encoder() {
        let spec = NetworkSpec::new(4, vec![2]).unwrap();
        let layers = spec.layers();
        assert_eq!(layers.len(), 2);
        assert_eq!(layers[0].activation, Activation::LeakyRelu);
        assert_eq!(layers[1].activation, Activation::Identity);
    }

    #[test]
    fn decoder_mirrors_encoder_parameter_count() {
        for widths in [vec![128, 3], vec![256, 32, 3], vec![1024, 256, 64, 16, 3]] {
            let spec = NetworkSpec::new(1500, widths).unwrap();
            let layers = spec.layers();
            let half = spec.encoder_depth();
            let weights = |ls: &[LayerShape]| ls.iter().map(|l| l.inputs * l.outputs).sum::<usize>();
            assert_eq!(weights(&layers[..half]), weights(&layers[half..]));
        }
    }

    #[test]
    fn width_parsing() {
        assert_eq!(NetworkSpec::parse_widths("512x128x32x3").unwrap(), vec![512, 128, 32, 3]);
        assert!(NetworkSpec::parse_widths("12xq").is_err());
        assert!(NetworkSpec::new(4, vec![]).is_err());
        assert!(NetworkSpec::new(4, vec![3, 0]).is_err());
        assert!(NetworkSpec::new(0, vec![3]).is_err());
    }
}
