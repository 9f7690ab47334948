use std::io::Write;
use std::path::Path;

use ndarray::Array1;

use super::{balanced_epoch_sampler, clip_tensors, LrSchedule, Rmsprop};
use crate::datasets::{Pair, Splits, TraceDataset};
use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::params::Tensors;
use crate::tracenet::{backward, forward_embedded, loss, LinkPrediction, NetworkConfig, TraceNetwork};

/// Outcome of one training run. `best` holds the parameters with the
/// lowest dev loss (the initialization when no epoch ran).
#[derive(Debug, Clone)]
pub struct TrainRun {
    pub config: NetworkConfig,
    pub seed: u64,
    pub train_loss: Vec<f64>,
    pub dev_loss: Vec<f64>,
    pub learning_rates: Vec<f64>,
    /// Epoch index of the best checkpoint, if any epoch ran.
    pub best_epoch: Option<usize>,
    pub best: TraceNetwork,
    /// Parameters after the final epoch.
    pub last: TraceNetwork,
}

impl TrainRun {
    pub fn epochs(&self) -> usize {
        self.train_loss.len()
    }

    pub fn best_dev_loss(&self) -> Option<f64> {
        self.best_epoch.map(|e| self.dev_loss[e])
    }
}

/// Semantic vectors of every source and target under one network.
#[derive(Debug, Clone)]
pub struct EncodedArtifacts {
    pub sources: Vec<Array1<f64>>,
    pub targets: Vec<Array1<f64>>,
}

pub fn encode_artifacts(network: &TraceNetwork, dataset: &TraceDataset, embeddings: &EmbeddingTable) -> Result<EncodedArtifacts> {
    let enc = |a: &crate::corpus::Artifact| network.encode(&embeddings.embed(&a.tokens));
    Ok(EncodedArtifacts {
        sources: dataset.sources.iter().map(enc).collect::<Result<_>>()?,
        targets: dataset.targets.iter().map(enc).collect::<Result<_>>()?,
    })
}

fn predictions(network: &TraceNetwork, enc: &EncodedArtifacts, pairs: &[Pair]) -> Result<Vec<LinkPrediction>> {
    pairs.iter().map(|&(s, t)| network.score_vectors(&enc.sources[s], &enc.targets[t])).collect()
}

/// Link probability of every pair, in order.
pub fn score_pairs(network: &TraceNetwork, dataset: &TraceDataset, pairs: &[Pair], embeddings: &EmbeddingTable) -> Result<Vec<f64>> {
    let enc = encode_artifacts(network, dataset, embeddings)?;
    Ok(predictions(network, &enc, pairs)?.into_iter().map(|p| p.p_link).collect())
}

/// Regularized loss over all of `pairs` (no balancing).
pub fn dev_loss(network: &TraceNetwork, dataset: &TraceDataset, pairs: &[Pair], embeddings: &EmbeddingTable) -> Result<f64> {
    let enc = encode_artifacts(network, dataset, embeddings)?;
    let batch: Vec<_> = predictions(network, &enc, pairs)?
        .into_iter()
        .zip(pairs)
        .map(|(p, &q)| (p, dataset.is_link(q)))
        .collect();
    Ok(loss(&batch, &network.params, network.config.lambda)?.value)
}

/// Fraction of `pairs` whose argmax prediction matches the gold label.
pub fn link_accuracy(network: &TraceNetwork, dataset: &TraceDataset, pairs: &[Pair], embeddings: &EmbeddingTable) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("accuracy over no pairs".into()));
    }
    let enc = encode_artifacts(network, dataset, embeddings)?;
    let preds = predictions(network, &enc, pairs)?;
    let hits = preds.iter().zip(pairs).filter(|(p, &q)| p.is_link() == dataset.is_link(q)).count();
    Ok(hits as f64 / pairs.len() as f64)
}

/// Statistics of one finished epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochReport {
    pub epoch: usize,
    pub train_loss: f64,
    pub dev_loss: f64,
    pub learning_rate: f64,
}

/// Trains on balanced epochs drawn from the train split, evaluating the
/// dev split after each epoch and keeping the best parameters.
pub fn train(config: &NetworkConfig, dataset: &TraceDataset, splits: &Splits, embeddings: &EmbeddingTable, seed: u64) -> Result<TrainRun> {
    train_observed(config, dataset, splits, embeddings, seed, |_, _| {})
}

/// [`train`], calling `observe` with the report and current parameters
/// after every epoch.
pub fn train_observed(
    config: &NetworkConfig,
    dataset: &TraceDataset,
    splits: &Splits,
    embeddings: &EmbeddingTable,
    seed: u64,
    mut observe: impl FnMut(&EpochReport, &TraceNetwork),
) -> Result<TrainRun> {
    config.validate()?;
    if config.epochs > 0 && splits.dev.is_empty() {
        return Err(Error::InvalidArgument("dev split is empty".into()));
    }
    let mut net = TraceNetwork::new(config.clone(), embeddings.dim(), seed)?;
    let mut run = TrainRun {
        config: config.clone(),
        seed,
        train_loss: Vec::new(),
        dev_loss: Vec::new(),
        learning_rates: Vec::new(),
        best_epoch: None,
        best: net.clone(),
        last: net.clone(),
    };
    if config.epochs == 0 {
        return Ok(run);
    }

    let src: Vec<_> = dataset.sources.iter().map(|a| embeddings.embed(&a.tokens)).collect();
    let tgt: Vec<_> = dataset.targets.iter().map(|a| embeddings.embed(&a.tokens)).collect();
    let schedule = LrSchedule::new(config.lr);
    let mut opt = Rmsprop::new(&net.params);

    for epoch in 0..config.epochs {
        let rate = schedule.lr_at(epoch);
        let examples = balanced_epoch_sampler(dataset, &splits.train, seed, epoch)?;
        let mut total = 0.0;
        let mut batches = 0usize;
        for batch in examples.chunks(config.batch_size) {
            let scale = 1.0 / batch.len() as f64;
            let mut grads = net.params.zeros_like();
            let mut preds = Vec::with_capacity(batch.len());
            for &((s, t), label) in batch {
                let (pred, cache) = forward_embedded(config, &net.params, &src[s], &tgt[t])?;
                grads.add_scaled(1.0, &backward(config, &net.params, &cache, label, scale)?);
                preds.push((pred, label));
            }
            total += loss(&preds, &net.params, config.lambda)?.value;
            batches += 1;
            grads.add_scaled(config.lambda, &net.params);
            clip_tensors(&mut grads, config.gc)?;
            opt.step(&mut net.params, &grads, rate)?;
        }
        let dev = dev_loss(&net, dataset, &splits.dev, embeddings)?;
        if !dev.is_finite() {
            return Err(Error::NonFiniteUpdate);
        }
        let report = EpochReport {
            epoch,
            train_loss: total / batches as f64,
            dev_loss: dev,
            learning_rate: rate,
        };
        observe(&report, &net);
        run.train_loss.push(report.train_loss);
        run.dev_loss.push(dev);
        run.learning_rates.push(rate);
        if run.best_epoch.is_none_or(|b| dev < run.dev_loss[b]) {
            run.best_epoch = Some(epoch);
            run.best = net.clone();
        }
    }
    run.last = net;
    Ok(run)
}

/// CSV `epoch,train_loss,dev_loss,learning_rate`, epochs counted from 1.
pub fn write_run_log(path: &Path, run: &TrainRun) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "epoch,train_loss,dev_loss,learning_rate").unwrap();
    for e in 0..run.epochs() {
        writeln!(out, "{},{},{},{}", e + 1, run.train_loss[e], run.dev_loss[e], run.learning_rates[e]).unwrap();
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Artifact, Role, Vocabulary};
    use crate::rnn::CellKind;
    use ndarray::Array2;

    fn tiny() -> (TraceDataset, Splits, EmbeddingTable) {
        let s = vec![Artifact::new("s0", Role::Source, "a a"), Artifact::new("s1", Role::Source, "b")];
        let t = vec![Artifact::new("t0", Role::Target, "a"), Artifact::new("t1", Role::Target, "b b")];
        let links = vec![("s0".to_string(), "t0".to_string()), ("s1".to_string(), "t1".to_string())];
        let d = TraceDataset::new(s, t, &links).unwrap().0;
        let splits = Splits {
            train: d.all_pairs(),
            dev: d.all_pairs(),
            test: Vec::new(),
        };
        let vocab = Vocabulary::from_parts(vec!["a".into(), "b".into()], vec![1, 1]);
        let m = Array2::from_shape_vec((3, 2), vec![1.0, 0.0, 0.0, 1.0, 0.5, 0.5]).unwrap();
        (d, splits, EmbeddingTable::new(vocab, m).unwrap())
    }

    fn cfg(epochs: usize) -> NetworkConfig {
        NetworkConfig {
            cell: CellKind::Gru,
            hidden: 4,
            integration: 3,
            epochs,
            lr: 0.01,
            ..Default::default()
        }
    }

    #[test]
    fn zero_epochs_keeps_initialization() {
        let (d, s, e) = tiny();
        let run = train(&cfg(0), &d, &s, &e, 5).unwrap();
        assert_eq!(run.epochs(), 0);
        assert!(run.best_epoch.is_none());
        assert_eq!(run.best, TraceNetwork::new(cfg(0), 2, 5).unwrap());
    }

    #[test]
    fn deterministic_and_best_matches_log() {
        let (d, s, e) = tiny();
        let a = train(&cfg(15), &d, &s, &e, 1).unwrap();
        let b = train(&cfg(15), &d, &s, &e, 1).unwrap();
        assert_eq!(a.train_loss, b.train_loss);
        assert_eq!(a.dev_loss, b.dev_loss);
        let min = a.dev_loss.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(a.best_dev_loss(), Some(min));
        let recomputed = dev_loss(&a.best, &d, &s.dev, &e).unwrap();
        assert!((recomputed - min).abs() < 1e-12);
        assert!(a.dev_loss.last().unwrap() < &a.dev_loss[0]);
    }
}
