//! Model files: magic `ONN1`, version, a layer table (tag byte plus u32
//! extents), the parameter tensors as little-endian f32 in layer order, and
//! a CRC-32 trailer.

use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::network::{LayerSpec, NetworkSpec};
use crate::params::{LayerParams, Parameters};
use crate::tensor::Tensor;
use crate::Error;

const MAGIC: [u8; 4] = *b"ONN1";
const VERSION: u16 = 1;

struct Crc32 {
    table: [u32; 256],
    state: u32,
}

impl Crc32 {
    fn new() -> Crc32 {
        let mut table = [0u32; 256];
        for (i, entry) in table.iter_mut().enumerate() {
            let mut crc = i as u32;
            for _ in 0..8 {
                crc = if crc & 1 != 0 { (crc >> 1) ^ 0xedb8_8320 } else { crc >> 1 };
            }
            *entry = crc;
        }
        Crc32 { table, state: 0xffff_ffff }
    }

    fn update(&mut self, bytes: &[u8]) {
        for &b in bytes {
            let idx = ((self.state ^ b as u32) & 0xff) as usize;
            self.state = (self.state >> 8) ^ self.table[idx];
        }
    }

    fn finish(&self) -> u32 {
        !self.state
    }
}

fn layer_entry(layer: &LayerSpec) -> (u8, Vec<u32>) {
    match *layer {
        LayerSpec::Conv2d { in_channels, maps } => (0, vec![in_channels as u32, maps as u32]),
        LayerSpec::Relu => (1, vec![]),
        LayerSpec::BatchNorm { maps } => (2, vec![maps as u32]),
        LayerSpec::Dropout { rate } => (3, vec![(rate as f32).to_bits()]),
        LayerSpec::Flatten => (4, vec![]),
        LayerSpec::FullyConnected { inputs, outputs } => (5, vec![inputs as u32, outputs as u32]),
        LayerSpec::Softmax => (6, vec![]),
    }
}

fn entry_layer(tag: u8, extents: &[u32]) -> Result<LayerSpec, Error> {
    let spec = match (tag, extents) {
        (0, [cin, maps]) => LayerSpec::Conv2d { in_channels: *cin as usize, maps: *maps as usize },
        (1, []) => LayerSpec::Relu,
        (2, [maps]) => LayerSpec::BatchNorm { maps: *maps as usize },
        (3, [bits]) => LayerSpec::Dropout { rate: f32::from_bits(*bits) as f64 },
        (4, []) => LayerSpec::Flatten,
        (5, [inputs, outputs]) => {
            LayerSpec::FullyConnected { inputs: *inputs as usize, outputs: *outputs as usize }
        }
        (6, []) => LayerSpec::Softmax,
        _ => return Err(Error::BadLayerTag(tag)),
    };
    Ok(spec)
}

fn extent_count(tag: u8) -> Result<usize, Error> {
    match tag {
        0 | 5 => Ok(2),
        2 | 3 => Ok(1),
        1 | 4 | 6 => Ok(0),
        other => Err(Error::BadLayerTag(other)),
    }
}

fn tensors_of(params: &LayerParams<f32>) -> Vec<&Tensor<f32>> {
    match params {
        LayerParams::None => vec![],
        LayerParams::Affine { weight, bias } => vec![weight, bias],
        LayerParams::BatchNorm { gamma, beta, running_mean, running_var } => {
            vec![gamma, beta, running_mean, running_var]
        }
    }
}

pub fn save_model(spec: &NetworkSpec, params: &Parameters<f32>, path: &Path) -> Result<(), Error> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut crc = Crc32::new();
    let mut emit = |out: &mut BufWriter<std::fs::File>, bytes: &[u8]| -> Result<(), Error> {
        crc.update(bytes);
        out.write_all(bytes).map_err(|e| Error::io(path, e))
    };

    emit(&mut out, &MAGIC)?;
    emit(&mut out, &VERSION.to_le_bytes())?;
    emit(&mut out, &(spec.layers.len() as u32).to_le_bytes())?;
    for layer in &spec.layers {
        let (tag, extents) = layer_entry(layer);
        emit(&mut out, &[tag])?;
        for e in extents {
            emit(&mut out, &e.to_le_bytes())?;
        }
    }
    for p in &params.layers {
        for t in tensors_of(p) {
            for &v in t.data() {
                emit(&mut out, &v.to_le_bytes())?;
            }
        }
    }
    let digest = crc.finish();
    out.write_all(&digest.to_le_bytes()).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<(NetworkSpec, Parameters<f32>), Error> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    if bytes.len() < 4 || bytes[0..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < 14 {
        return Err(Error::Truncated);
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != VERSION {
        return Err(Error::VersionMismatch { found: version });
    }
    let mut crc = Crc32::new();
    crc.update(&bytes[..bytes.len() - 4]);
    let stored = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().unwrap());
    if crc.finish() != stored {
        return Err(Error::ChecksumMismatch);
    }

    let layer_count = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let mut cursor = 10usize;
    let mut layers = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let tag = *bytes.get(cursor).ok_or(Error::Truncated)?;
        cursor += 1;
        let count = extent_count(tag)?;
        let mut extents = Vec::with_capacity(count);
        for _ in 0..count {
            let end = cursor + 4;
            let chunk = bytes.get(cursor..end).ok_or(Error::Truncated)?;
            extents.push(u32::from_le_bytes(chunk.try_into().unwrap()));
            cursor = end;
        }
        layers.push(entry_layer(tag, &extents)?);
    }
    let spec = NetworkSpec { layers };

    // Tensor shapes are implied by the spec; read them in order.
    let template: Parameters<f32> = crate::params::he_init(&spec, 0);
    let mut params_layers = Vec::with_capacity(template.layers.len());
    let mut read_tensor = |shape: &[usize], cursor: &mut usize| -> Result<Tensor<f32>, Error> {
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            let end = *cursor + 4;
            let chunk = bytes.get(*cursor..end).ok_or(Error::Truncated)?;
            data.push(f32::from_le_bytes(chunk.try_into().unwrap()));
            *cursor = end;
        }
        Ok(Tensor::from_vec(shape, data))
    };
    for p in &template.layers {
        let block = match p {
            LayerParams::None => LayerParams::None,
            LayerParams::Affine { weight, bias } => LayerParams::Affine {
                weight: read_tensor(weight.shape(), &mut cursor)?,
                bias: read_tensor(bias.shape(), &mut cursor)?,
            },
            LayerParams::BatchNorm { gamma, beta, running_mean, running_var } => {
                LayerParams::BatchNorm {
                    gamma: read_tensor(gamma.shape(), &mut cursor)?,
                    beta: read_tensor(beta.shape(), &mut cursor)?,
                    running_mean: read_tensor(running_mean.shape(), &mut cursor)?,
                    running_var: read_tensor(running_var.shape(), &mut cursor)?,
                }
            }
        };
        params_layers.push(block);
    }
    if cursor != bytes.len() - 4 {
        return Err(Error::Truncated);
    }
    Ok((spec, Parameters { layers: params_layers }))
}

/// Loads a checkpoint that must describe exactly `expected`.
pub fn load_model_expecting(
    path: &Path,
    expected: &NetworkSpec,
) -> Result<Parameters<f32>, Error> {
    let (spec, params) = load_model(path)?;
    if &spec != expected {
        return Err(Error::ShapeMismatch);
    }
    Ok(params)
}
