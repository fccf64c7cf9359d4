//! Layer pipeline descriptions and the named architectures.

use crate::Error;

/// Convolutions are always 3x3, stride 1, zero-padded by one cell, so every
/// feature map stays 8x8.
pub const KERNEL: usize = 3;
/// Batch-normalization epsilon.
pub const BN_EPSILON: f64 = 1e-5;
/// Momentum of the running mean/variance estimates.
pub const BN_RUNNING_MOMENTUM: f64 = 0.99;

/// One pipeline stage.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum LayerSpec {
    Conv2d { in_channels: usize, maps: usize },
    Relu,
    BatchNorm { maps: usize },
    Dropout { rate: f64 },
    Flatten,
    FullyConnected { inputs: usize, outputs: usize },
    Softmax,
}

/// What flows between layers: spatial maps or a flat vector.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Signal {
    Maps(usize),
    Flat(usize),
}

/// An ordered layer pipeline ending in a softmax.
#[derive(Clone, PartialEq, Debug)]
pub struct NetworkSpec {
    pub layers: Vec<LayerSpec>,
}

/// The three convolutional depths studied.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Arch {
    Conv4,
    Conv6,
    Conv8,
}

impl Arch {
    pub fn conv_maps(self) -> &'static [usize] {
        match self {
            Arch::Conv4 => &[64, 64, 128, 128],
            Arch::Conv6 => &[64, 64, 128, 128, 256, 256],
            Arch::Conv8 => &[64, 64, 128, 128, 256, 256, 256, 256],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Arch::Conv4 => "conv4",
            Arch::Conv6 => "conv6",
            Arch::Conv8 => "conv8",
        }
    }

    pub fn from_name(name: &str) -> Option<Arch> {
        match name {
            "conv4" => Some(Arch::Conv4),
            "conv6" => Some(Arch::Conv6),
            "conv8" => Some(Arch::Conv8),
            _ => None,
        }
    }
}

impl NetworkSpec {
    /// General builder: a stack of 3x3 convolutions (optionally batch
    /// normalized before each ReLU), then fc `hidden` -> fc `classes`.
    /// Dropout, when enabled, acts on the hidden fc activations only.
    pub fn conv_stack(
        input_channels: usize,
        conv_maps: &[usize],
        hidden: usize,
        classes: usize,
        batch_norm: bool,
        dropout: bool,
    ) -> NetworkSpec {
        let mut layers = Vec::new();
        let mut channels = input_channels;
        for &maps in conv_maps {
            layers.push(LayerSpec::Conv2d { in_channels: channels, maps });
            if batch_norm {
                layers.push(LayerSpec::BatchNorm { maps });
            }
            layers.push(LayerSpec::Relu);
            channels = maps;
        }
        layers.push(LayerSpec::Flatten);
        layers.push(LayerSpec::FullyConnected { inputs: channels * 64, outputs: hidden });
        layers.push(LayerSpec::Relu);
        if dropout {
            layers.push(LayerSpec::Dropout { rate: 0.5 });
        }
        layers.push(LayerSpec::FullyConnected { inputs: hidden, outputs: classes });
        layers.push(LayerSpec::Softmax);
        NetworkSpec { layers }
    }

    /// One of the named architectures over 60 move outputs.
    pub fn preset(arch: Arch, input_channels: usize, batch_norm: bool, dropout: bool) -> NetworkSpec {
        NetworkSpec::conv_stack(input_channels, arch.conv_maps(), 128, 60, batch_norm, dropout)
    }

    /// A single softmax layer on the raw planes; the weakest sensible
    /// baseline against the convolutional stacks.
    pub fn linear(input_channels: usize, classes: usize) -> NetworkSpec {
        NetworkSpec {
            layers: vec![
                LayerSpec::Flatten,
                LayerSpec::FullyConnected { inputs: input_channels * 64, outputs: classes },
                LayerSpec::Softmax,
            ],
        }
    }

    /// Checks layer compatibility for the given input channel count and
    /// returns the number of output classes.
    pub fn validate(&self, input_channels: usize) -> Result<usize, Error> {
        let mut signal = Signal::Maps(input_channels);
        let mut softmax_seen = false;
        for (i, layer) in self.layers.iter().enumerate() {
            if softmax_seen {
                return Err(Error::BadSpec(format!("layer {i} after softmax")));
            }
            signal = match (*layer, signal) {
                (LayerSpec::Conv2d { in_channels, maps }, Signal::Maps(ch)) if ch == in_channels => {
                    Signal::Maps(maps)
                }
                (LayerSpec::BatchNorm { maps }, Signal::Maps(ch)) if ch == maps => Signal::Maps(ch),
                (LayerSpec::Relu, s) => s,
                (LayerSpec::Dropout { rate }, s) if (0.0..1.0).contains(&rate) => s,
                (LayerSpec::Flatten, Signal::Maps(ch)) => Signal::Flat(ch * 64),
                (LayerSpec::FullyConnected { inputs, outputs }, Signal::Flat(n)) if n == inputs => {
                    Signal::Flat(outputs)
                }
                (LayerSpec::Softmax, Signal::Flat(n)) => {
                    softmax_seen = true;
                    Signal::Flat(n)
                }
                (l, s) => {
                    return Err(Error::BadSpec(format!("layer {i} ({l:?}) cannot follow {s:?}")))
                }
            };
        }
        match (softmax_seen, signal) {
            (true, Signal::Flat(n)) => Ok(n),
            _ => Err(Error::BadSpec("pipeline must end in a softmax".into())),
        }
    }

    /// Total trainable parameter count.
    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.parameter_count()).sum()
    }
}

impl LayerSpec {
    /// Trainable parameters in this layer. A convolution over `b` input
    /// channels costs 9b+1 per feature map thanks to weight sharing.
    pub fn parameter_count(&self) -> usize {
        match *self {
            LayerSpec::Conv2d { in_channels, maps } => maps * (KERNEL * KERNEL * in_channels + 1),
            LayerSpec::FullyConnected { inputs, outputs } => outputs * (inputs + 1),
            LayerSpec::BatchNorm { maps } => 2 * maps,
            _ => 0,
        }
    }
}
