//! Network-backed move predictors.

use std::path::Path;

use othello_core::{Board, Move};
use othello_dataset::{encode_into, EncodingScheme};
use othello_nn::{forward, load_model, Mode, NetworkSpec, Parameters, Tensor};

use crate::{choose_from_confidences, Error, Policy, OUTPUTS};

const BATCH: usize = 256;

/// A trained network plus its board encoding: a 0-ply player.
pub struct PredictorPolicy {
    spec: NetworkSpec,
    params: Parameters<f32>,
    scheme: EncodingScheme,
    label: String,
}

impl PredictorPolicy {
    pub fn new(
        spec: NetworkSpec,
        params: Parameters<f32>,
        scheme: EncodingScheme,
    ) -> Result<PredictorPolicy, Error> {
        let classes = spec.validate(scheme.channels()).map_err(|e| match e {
            othello_nn::Error::BadSpec(_) => Error::MismatchedChannels {
                encoding: scheme.channels(),
                network: 0,
            },
            other => Error::Network(other),
        })?;
        if classes != OUTPUTS {
            return Err(Error::Network(othello_nn::Error::BadSpec(format!(
                "move predictors need {OUTPUTS} outputs, found {classes}"
            ))));
        }
        let label = format!("net[{} layers, {}]", spec.layers.len(), scheme.name());
        Ok(PredictorPolicy { spec, params, scheme, label })
    }

    /// Loads a checkpoint saved by the trainer.
    pub fn from_checkpoint(path: &Path, scheme: EncodingScheme) -> Result<PredictorPolicy, Error> {
        let (spec, params) = load_model(path)?;
        let mut p = PredictorPolicy::new(spec, params, scheme)?;
        p.label = format!("net[{}]", path.display());
        Ok(p)
    }

    pub fn scheme(&self) -> EncodingScheme {
        self.scheme
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    /// Softmax distribution over the 60 outputs for one board.
    pub fn predict_distribution(&self, board: &Board) -> [f32; OUTPUTS] {
        self.predict_batch(std::slice::from_ref(board)).pop().unwrap()
    }

    /// Batched inference: canonicalize, encode, forward in infer mode.
    pub fn predict_batch(&self, boards: &[Board]) -> Vec<[f32; OUTPUTS]> {
        let stride = self.scheme.channels() * 64;
        let mut out = Vec::with_capacity(boards.len());
        for chunk in boards.chunks(BATCH) {
            let mut planes = vec![0.0f32; chunk.len() * stride];
            for (slot, board) in planes.chunks_mut(stride).zip(chunk) {
                encode_into(&board.canonical(), self.scheme, slot);
            }
            let input =
                Tensor::from_vec(&[chunk.len(), self.scheme.channels(), 8, 8], planes);
            let pass = forward(&self.spec, &self.params, &input, Mode::Infer, None);
            for row in pass.output.data().chunks(OUTPUTS) {
                out.push(row.try_into().unwrap());
            }
        }
        out
    }
}

impl Policy for PredictorPolicy {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn choose(&self, board: &Board) -> Move {
        choose_from_confidences(board, &self.predict_distribution(board))
    }

    fn confidences(&self, board: &Board) -> Option<[f32; OUTPUTS]> {
        Some(self.predict_distribution(board))
    }

    fn confidences_batch(&self, boards: &[Board]) -> Option<Vec<[f32; OUTPUTS]>> {
        Some(self.predict_batch(boards))
    }
}
