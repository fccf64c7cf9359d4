//! From-scratch convolutional network engine.
//!
//! Fixed layer set (3x3 zero-padded convolutions, ReLU, batch
//! normalization, dropout, fully-connected, softmax), exact backprop,
//! classical-momentum SGD with a halving learning-rate schedule, and binary
//! checkpoints. Training is bit-deterministic given a seed, for any thread
//! count: parallel loops only ever split disjoint output regions and reduce
//! in a fixed order.

mod checkpoint;
mod eval;
pub mod gradcheck;
mod layers;
mod network;
mod optim;
mod params;
mod tensor;
mod train;

pub use checkpoint::{load_model, load_model_expecting, save_model};
pub use eval::evaluate_topk;
pub use layers::{backward, forward, loss, update_running_stats, ForwardPass, Mode};
pub use network::{Arch, LayerSpec, NetworkSpec, BN_EPSILON, BN_RUNNING_MOMENTUM, KERNEL};
pub use optim::{lr_at, sgd_step, OptimizerState, TrainConfig};
pub use params::{he_init, Gradients, LayerGrads, LayerParams, Parameters};
pub use tensor::{Scalar, Tensor};
pub use train::{train, EpochLog, Examples, TrainLog};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum Error {
    #[error("invalid network spec: {0}")]
    BadSpec(String),
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("not a model file (bad magic)")]
    BadMagic,
    #[error("unsupported model version {found}")]
    VersionMismatch { found: u16 },
    #[error("model file is corrupt (checksum mismatch)")]
    ChecksumMismatch,
    #[error("model file is truncated")]
    Truncated,
    #[error("unknown layer tag {0}")]
    BadLayerTag(u8),
    #[error("checkpoint does not match the expected architecture")]
    ShapeMismatch,
    #[error("io error on {path}: {message}")]
    Io { path: std::path::PathBuf, message: String },
}

impl Error {
    fn io(path: &std::path::Path, e: std::io::Error) -> Error {
        Error::Io { path: path.to_path_buf(), message: e.to_string() }
    }
}
