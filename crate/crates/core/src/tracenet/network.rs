use ndarray::{Array1, ArrayView2, ArrayViewMut2};
use serde::{Deserialize, Serialize};

use super::relation::{relation_backward, relation_forward, LinkPrediction, RelationCache, RelationParameters};
use crate::corpus::Artifact;
use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::params::Tensors;
use crate::rng::{seeded, streams};
use crate::rnn::{backprop_sequence, encode_with_state, CellKind, EncoderConfig, EncoderParams, SequenceState};

/// One point of the configuration search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkConfig {
    /// Tag naming the word-embedding source.
    pub embedding: String,
    pub cell: CellKind,
    pub bidirectional: bool,
    pub layers: usize,
    /// Recurrent hidden width.
    pub hidden: usize,
    /// Integration (relation) layer width.
    pub integration: usize,
    pub lr: f64,
    pub gc: f64,
    pub lambda: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            embedding: "default".into(),
            cell: CellKind::Gru,
            bidirectional: false,
            layers: 1,
            hidden: 30,
            integration: 10,
            lr: 1e-2,
            gc: 10.0,
            lambda: 1e-4,
            batch_size: 1,
            epochs: 60,
        }
    }
}

impl NetworkConfig {
    pub fn encoder(&self) -> EncoderConfig {
        EncoderConfig::new(self.cell, self.bidirectional, self.layers, self.hidden)
    }

    /// Integration width paired with a hidden width (30→10, 60→20).
    pub fn paired_integration(hidden: usize) -> usize {
        (hidden / 3).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        self.encoder().validate()?;
        if self.integration == 0 || self.batch_size == 0 {
            return Err(Error::InvalidArgument("integration and batch_size must be >= 1".into()));
        }
        if !(self.lr > 0.0) || !(self.gc > 0.0) || self.lambda < 0.0 {
            return Err(Error::InvalidArgument("lr and gc must be > 0, lambda >= 0".into()));
        }
        Ok(())
    }
}

/// Every trainable tensor: one encoder shared by source and target, plus
/// the relation head. Word embeddings are not included.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub encoder: EncoderParams,
    pub relation: RelationParameters,
}

impl NetworkParams {
    pub fn zeros(config: &NetworkConfig, input_dim: usize) -> Self {
        let enc = config.encoder();
        NetworkParams {
            encoder: EncoderParams::zeros(&enc, input_dim),
            relation: RelationParameters::zeros(enc.output_dim(input_dim), config.integration),
        }
    }

    pub fn init(config: &NetworkConfig, input_dim: usize, seed: u64) -> Self {
        let enc = config.encoder();
        let mut rng = seeded(seed, streams::INIT);
        let encoder = EncoderParams::random(&enc, input_dim, &mut rng);
        let relation = RelationParameters::random(enc.output_dim(input_dim), config.integration, &mut rng);
        NetworkParams { encoder, relation }
    }

    pub fn zeros_like(&self) -> Self {
        NetworkParams {
            encoder: self.encoder.zeros_like(),
            relation: RelationParameters::zeros(self.relation.width(), self.relation.integration()),
        }
    }
}

impl Tensors for NetworkParams {
    fn tensors(&self) -> Vec<(String, ArrayView2<'_, f64>)> {
        let mut t = self.encoder.tensors();
        t.extend(self.relation.tensors());
        t
    }

    fn tensors_mut(&mut self) -> Vec<ArrayViewMut2<'_, f64>> {
        let mut t = self.encoder.tensors_mut();
        t.extend(self.relation.tensors_mut());
        t
    }
}

/// Caches of one scored pair.
#[derive(Debug, Clone)]
pub struct PairCache {
    pub source: SequenceState,
    pub target: SequenceState,
    pub relation: RelationCache,
}

pub fn forward_embedded(
    config: &NetworkConfig,
    params: &NetworkParams,
    source: &[Array1<f64>],
    target: &[Array1<f64>],
) -> Result<(LinkPrediction, PairCache)> {
    let enc = config.encoder();
    let source = encode_with_state(&enc, &params.encoder, source)?;
    let target = encode_with_state(&enc, &params.encoder, target)?;
    let relation = relation_forward(&params.relation, source.output(), target.output())?;
    Ok((relation.prediction(), PairCache { source, target, relation }))
}

/// Embeds both artifacts (UNK fallback, empty → single UNK), encodes them
/// with the shared encoder and scores the pair.
pub fn forward(
    config: &NetworkConfig,
    params: &NetworkParams,
    source: &Artifact,
    target: &Artifact,
    embeddings: &EmbeddingTable,
) -> Result<(LinkPrediction, PairCache)> {
    forward_embedded(config, params, &embeddings.embed(&source.tokens), &embeddings.embed(&target.tokens))
}

/// Gradient of `scale · -ln P(label)` w.r.t. all trainable parameters.
pub fn backward(config: &NetworkConfig, params: &NetworkParams, cache: &PairCache, label: bool, scale: f64) -> Result<NetworkParams> {
    let mut grads = params.zeros_like();
    let (dvs, dvt) = relation_backward(&params.relation, &mut grads.relation, &cache.relation, label, scale);
    let enc = config.encoder();
    let gs = backprop_sequence(&enc, &params.encoder, &cache.source, &dvs)?;
    let gt = backprop_sequence(&enc, &params.encoder, &cache.target, &dvt)?;
    grads.encoder.add_scaled(1.0, &gs.params);
    grads.encoder.add_scaled(1.0, &gt.params);
    Ok(grads)
}

/// Smallest probability fed to the logarithm.
pub const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossValue {
    pub value: f64,
    /// Some probability fell below [`LOG_FLOOR`] and was clamped.
    pub clamped: bool,
}

/// Regularized negative log-likelihood:
/// `-(1/N) Σ ln P(y_i) + (λ/2)‖θ‖²`.
pub fn loss<T: Tensors>(batch: &[(LinkPrediction, bool)], params: &T, lambda: f64) -> Result<LossValue> {
    if batch.is_empty() {
        return Err(Error::InvalidArgument("loss over an empty batch".into()));
    }
    let mut clamped = false;
    let mut nll = 0.0;
    for (pred, label) in batch {
        let p = pred.prob(*label);
        if p < LOG_FLOOR {
            clamped = true;
        }
        nll -= p.max(LOG_FLOOR).ln();
    }
    Ok(LossValue {
        value: nll / batch.len() as f64 + 0.5 * lambda * params.squared_norm(),
        clamped,
    })
}

/// A configuration bundled with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceNetwork {
    pub config: NetworkConfig,
    pub params: NetworkParams,
    /// Word-vector width the encoder consumes.
    pub input_dim: usize,
}

impl TraceNetwork {
    pub fn new(config: NetworkConfig, input_dim: usize, seed: u64) -> Result<Self> {
        config.validate()?;
        let params = NetworkParams::init(&config, input_dim, seed);
        Ok(TraceNetwork { config, params, input_dim })
    }

    pub fn predict(&self, source: &Artifact, target: &Artifact, embeddings: &EmbeddingTable) -> Result<LinkPrediction> {
        forward(&self.config, &self.params, source, target, embeddings).map(|(p, _)| p)
    }

    /// Semantic vector of one embedded artifact.
    pub fn encode(&self, words: &[Array1<f64>]) -> Result<Array1<f64>> {
        crate::rnn::encode_sequence(&self.config.encoder(), &self.params.encoder, words)
    }

    /// Scores two already-encoded semantic vectors.
    pub fn score_vectors(&self, vs: &Array1<f64>, vt: &Array1<f64>) -> Result<LinkPrediction> {
        super::relation_head(&self.params.relation, vs, vt)
    }
}
