//! Binary model file.
//!
//! ```text
//! "AEMD"  magic
//! u32     version (1)
//! u32     input_dim
//! u32     encoder layer count n
//! u32 x n encoder widths, bottleneck last
//! f64     leaky slope
//! u8 x 3  hidden, bottleneck and output activation tags
//! u8      value width in bits (64)
//! u64     initialization seed
//! f64...  per layer: weights (outputs x inputs, row-major) then biases
//! u32     CRC-32 of every preceding byte
//! ```
//!
//! All integers and floats are little-endian.

use std::fs;
use std::path::Path;

use super::network::{Layer, ModelWeights};
use super::spec::{Activation, NetworkSpec};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"AEMD";
const VERSION: u32 = 1;
const VALUE_BITS: u8 = 64;

pub fn save_model(w: &ModelWeights) -> Result<Vec<u8>> {
    w.validate()?;
    let spec = &w.spec;
    let to_u32 = |n: usize| u32::try_from(n).map_err(|_| Error::Format(format!("{n} exceeds u32")));
    let mut out = Vec::with_capacity(64 + 8 * spec.parameter_count());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&to_u32(spec.input_dim)?.to_le_bytes());
    out.extend_from_slice(&to_u32(spec.encoder_hidden.len())?.to_le_bytes());
    for &width in &spec.encoder_hidden {
        out.extend_from_slice(&to_u32(width)?.to_le_bytes());
    }
    out.extend_from_slice(&spec.alpha.to_le_bytes());
    out.push(spec.hidden_activation.tag());
    out.push(spec.bottleneck_activation.tag());
    out.push(spec.output_activation.tag());
    out.push(VALUE_BITS);
    out.extend_from_slice(&w.seed.to_le_bytes());
    for layer in &w.layers {
        for v in layer.weights.iter().chain(&layer.bias) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("model file truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn load_model(bytes: &[u8]) -> Result<ModelWeights> {
    if bytes.len() < MAGIC.len() + 8 {
        return Err(Error::Format("model file truncated".into()));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Format("not a model file (bad magic)".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());

    let mut c = Cursor { bytes: body, pos: 4 };
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported model version {version}")));
    }
    if crc32fast::hash(body) != stored {
        return Err(Error::Format("model checksum mismatch".into()));
    }
    let input_dim = c.u32()? as usize;
    let depth = c.u32()? as usize;
    if depth == 0 || depth > body.len() / 4 {
        return Err(Error::Format(format!("implausible encoder depth {depth}")));
    }
    let encoder_hidden = (0..depth).map(|_| c.u32().map(|w| w as usize)).collect::<Result<Vec<_>>>()?;
    let alpha = c.f64()?;
    let mut activation = || {
        let tag = c.u8()?;
        Activation::from_tag(tag).ok_or_else(|| Error::Format(format!("unknown activation tag {tag}")))
    };
    let (hidden_activation, bottleneck_activation, output_activation) = (activation()?, activation()?, activation()?);
    let bits = c.u8()?;
    if bits != VALUE_BITS {
        return Err(Error::Format(format!("unsupported value width {bits}")));
    }
    let seed = c.u64()?;
    let spec = NetworkSpec {
        input_dim,
        encoder_hidden,
        alpha,
        hidden_activation,
        bottleneck_activation,
        output_activation,
    };
    spec.validate().map_err(|e| Error::Format(e.to_string()))?;

    let mut layers = Vec::new();
    for shape in spec.layers() {
        let mut read = |n: usize| (0..n).map(|_| c.f64()).collect::<Result<Vec<f64>>>();
        let weights = read(shape.inputs * shape.outputs)?;
        let bias = read(shape.outputs)?;
        layers.push(Layer { weights, bias });
    }
    if c.pos != body.len() {
        return Err(Error::Format("trailing bytes in model file".into()));
    }
    let w = ModelWeights { spec, seed, layers };
    w.validate().map_err(|e| Error::Format(e.to_string()))?;
    Ok(w)
}

pub fn save_model_file(path: &Path, w: &ModelWeights) -> Result<()> {
    fs::write(path, save_model(w)?)?;
    Ok(())
}

pub fn load_model_file(path: &Path) -> Result<ModelWeights> {
    load_model(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autoencoder::{init_weights, Trainer, TrainConfig};

    fn model() -> ModelWeights {
        let mut spec = NetworkSpec::new(7, vec![5, 2]).unwrap();
        spec.alpha = 0.2;
        init_weights(&spec, 99).unwrap()
    }

    #[test]
    fn roundtrip_is_exact() {
        let w = model();
        assert_eq!(load_model(&save_model(&w).unwrap()).unwrap(), w);
    }

    #[test]
    fn every_truncation_is_a_format_error() {
        let bytes = save_model(&model()).unwrap();
        for len in 0..bytes.len() {
            assert!(matches!(load_model(&bytes[..len]), Err(Error::Format(_))), "len {len}");
        }
    }

    #[test]
    fn corruption_fails_checksum() {
        let mut bytes = save_model(&model()).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x40;
        assert!(matches!(load_model(&bytes), Err(Error::Format(m)) if m.contains("checksum")));
    }

    #[test]
    fn wrong_version() {
        let mut bytes = save_model(&model()).unwrap();
        bytes[4] = 2;
        assert!(matches!(load_model(&bytes), Err(Error::Format(m)) if m.contains("version")));
    }

    #[test]
    fn zero_epochs_leave_bytes_unchanged() {
        let w = model();
        let before = save_model(&w).unwrap();
        let trainer = Trainer::new(w, TrainConfig::default()).unwrap();
        assert_eq!(save_model(&trainer.into_weights()).unwrap(), before);
    }
}
