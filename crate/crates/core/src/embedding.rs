//! Skip-gram with negative sampling, embedding tables and their text format.

use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::corpus::{Vocabulary, UNK_TOKEN};
use crate::error::{Error, Result};
use crate::math::sigmoid;
use crate::rng::{seeded, streams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SgnsConfig {
    pub dim: usize,
    /// Maximum window radius T; each center draws its radius from [1, T].
    pub window: usize,
    pub negatives: usize,
    pub learning_rate: f64,
    /// Floor reached by the linear learning-rate decay.
    pub min_learning_rate: f64,
    pub epochs: usize,
    /// Subsampling threshold t. Zero disables subsampling.
    pub subsample: f64,
    /// Exponent applied to unigram counts for the negative distribution.
    pub smoothing: f64,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 50,
            window: 5,
            negatives: 5,
            learning_rate: 0.025,
            min_learning_rate: 1e-4,
            epochs: 5,
            subsample: 1e-3,
            smoothing: 0.75,
        }
    }
}

impl SgnsConfig {
    fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.window == 0 || self.negatives == 0 {
            return Err(Error::InvalidArgument("dim, window and negatives must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) || !(self.min_learning_rate > 0.0) || self.subsample < 0.0 {
            return Err(Error::InvalidArgument("rates must be positive".into()));
        }
        Ok(())
    }
}

/// Word vectors indexed by a vocabulary. Downstream consumers read
/// `input_vectors` only; `output_vectors` exist while training.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    vocab: Vocabulary,
    input: Array2<f64>,
    output: Option<Array2<f64>>,
}

/// Tables are equal when tokens and vectors match; vocabulary counts are
/// not part of the stored format.
impl PartialEq for EmbeddingTable {
    fn eq(&self, other: &Self) -> bool {
        self.vocab.tokens() == other.vocab.tokens() && self.input == other.input && self.output == other.output
    }
}

impl EmbeddingTable {
    pub fn new(vocab: Vocabulary, input: Array2<f64>) -> Result<Self> {
        if input.nrows() != vocab.len() || input.ncols() == 0 {
            return Err(Error::Shape(format!(
                "embedding matrix {}x{} for vocabulary of {}",
                input.nrows(),
                input.ncols(),
                vocab.len()
            )));
        }
        if input.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite embedding entry".into()));
        }
        Ok(EmbeddingTable {
            vocab,
            input,
            output: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.input.ncols()
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn input_vectors(&self) -> &Array2<f64> {
        &self.input
    }

    pub fn output_vectors(&self) -> Option<&Array2<f64>> {
        self.output.as_ref()
    }

    pub fn vector(&self, index: usize) -> ArrayView1<'_, f64> {
        self.input.row(index)
    }

    pub fn lookup(&self, token: &str) -> ArrayView1<'_, f64> {
        self.vector(self.vocab.index_of(token))
    }

    /// Maps tokens to word vectors with UNK fallback. An empty token list
    /// becomes a single UNK vector.
    pub fn embed(&self, tokens: &[String]) -> Vec<Array1<f64>> {
        if tokens.is_empty() {
            return vec![self.vector(self.vocab.unk()).to_owned()];
        }
        tokens.iter().map(|t| self.lookup(t).to_owned()).collect()
    }

    /// Drops the context vectors, freezing the table for downstream use.
    pub fn freeze(mut self) -> Self {
        self.output = None;
        self
    }

    /// Top `n` tokens by cosine similarity to `token`, excluding the token
    /// itself and UNK. Ties go to the lower vocabulary index.
    pub fn cosine_neighbors(&self, token: &str, n: usize) -> Result<Vec<(String, f64)>> {
        let q = self
            .vocab
            .get(token)
            .filter(|&i| i != self.vocab.unk())
            .ok_or_else(|| Error::UnknownToken(token.to_string()))?;
        let qv = self.vector(q);
        let mut scored: Vec<(usize, f64)> = (0..self.vocab.len())
            .filter(|&i| i != q && i != self.vocab.unk())
            .map(|i| (i, cosine(qv, self.vector(i))))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(n);
        Ok(scored
            .into_iter()
            .map(|(i, s)| (self.vocab.token(i).to_string(), s))
            .collect())
    }

    /// Text format: header "V dim", then one "token f1 .. fdim" line per
    /// vocabulary entry in index order. Floats use shortest round-trip form.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(f);
        let io = |e| Error::io(path, e);
        writeln!(w, "{} {}", self.vocab.len(), self.dim()).map_err(io)?;
        for (i, tok) in self.vocab.tokens().iter().enumerate() {
            write!(w, "{tok}").map_err(io)?;
            for v in self.input.row(i) {
                write!(w, " {v}").map_err(io)?;
            }
            writeln!(w).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn read_text(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_text(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(path.display().to_string(), message),
            other => other,
        })
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let bad = |m: String| Error::parse("embedding table", m);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("missing header".into()))?;
        let mut h = header.split_whitespace().map(str::parse::<usize>);
        let (v, dim) = match (h.next(), h.next()) {
            (Some(Ok(v)), Some(Ok(d))) if d > 0 => (v, d),
            _ => return Err(bad(format!("bad header `{header}`"))),
        };
        let mut tokens = Vec::with_capacity(v);
        let mut data = Vec::with_capacity(v * dim);
        for (n, line) in lines.enumerate() {
            let mut parts = line.split_whitespace();
            let tok = parts.next().ok_or_else(|| bad(format!("row {}: empty", n + 1)))?;
            let before = data.len();
            for p in parts {
                data.push(p.parse::<f64>().map_err(|_| bad(format!("row {}: bad float `{p}`", n + 1)))?);
            }
            if data.len() - before != dim {
                return Err(bad(format!("row {}: expected {dim} values", n + 1)));
            }
            tokens.push(tok.to_string());
        }
        if tokens.len() != v {
            return Err(bad(format!("header says {v} rows, found {}", tokens.len())));
        }
        if tokens.iter().rev().skip(1).any(|t| t == UNK_TOKEN) {
            return Err(bad(format!("`{UNK_TOKEN}` must be the last row")));
        }
        let had_unk = tokens.last().map(String::as_str) == Some(UNK_TOKEN);
        let mut input = Array2::from_shape_vec((v, dim), data).map_err(|e| bad(e.to_string()))?;
        let vocab = Vocabulary::from_parts(tokens, vec![0; v]);
        if !had_unk {
            // Tables from other tools lack UNK; give it the mean vector.
            let mean = input.mean_axis(ndarray::Axis(0)).unwrap_or_else(|| Array1::zeros(dim));
            input.push_row(mean.view()).map_err(|e| bad(e.to_string()))?;
        }
        EmbeddingTable::new(vocab, input)
    }
}

pub fn cosine(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let na = a.dot(&a).sqrt();
    let nb = b.dot(&b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    a.dot(&b) / (na * nb)
}

/// Smoothed unigram distribution supporting draws that exclude one word.
struct NegativeSampler {
    cumulative: Vec<f64>,
    weights: Vec<f64>,
}

impl NegativeSampler {
    fn new(counts: &[u64], power: f64) -> Self {
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(power)).collect();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        NegativeSampler { cumulative, weights }
    }

    /// Draws from the distribution conditioned on `!= exclude`. Returns
    /// `None` when no other word has mass.
    fn draw(&self, rng: &mut impl rand::Rng, exclude: usize) -> Option<usize> {
        let total = *self.cumulative.last()?;
        let mass = total - self.weights[exclude];
        if mass <= 0.0 {
            return None;
        }
        let mut u = rng.random::<f64>() * mass;
        let before = self.cumulative[exclude] - self.weights[exclude];
        if u >= before {
            u += self.weights[exclude];
        }
        let i = self.cumulative.partition_point(|&c| c <= u);
        let i = i.min(self.weights.len() - 1);
        if i == exclude || self.weights[i] == 0.0 {
            // Rounding at an interval edge; fall back to the nearest word with mass.
            return (0..self.weights.len()).find(|&j| j != exclude && self.weights[j] > 0.0);
        }
        Some(i)
    }
}

/// Trains input/output vectors; returns the table and per-epoch mean loss.
pub fn train_skipgram_logged(
    corpus: &[Vec<String>],
    vocab: &Vocabulary,
    cfg: &SgnsConfig,
    seed: u64,
) -> Result<(EmbeddingTable, Vec<f64>)> {
    cfg.validate()?;
    let unk = vocab.unk();
    let sentences: Vec<Vec<usize>> = corpus
        .iter()
        .map(|s| s.iter().map(|t| vocab.index_of(t)).filter(|&i| i != unk).collect())
        .collect();
    let total: usize = sentences.iter().map(Vec::len).sum();
    if total < 2 {
        return Err(Error::CorpusTooSmall(total));
    }

    let v = vocab.len();
    let dim = cfg.dim;
    let mut counts = vec![0u64; v];
    for s in &sentences {
        for &w in s {
            counts[w] += 1;
        }
    }
    let sampler = NegativeSampler::new(&counts, cfg.smoothing);

    let mut rng = seeded(seed, streams::SKIPGRAM);
    let half = 0.5 / dim as f64;
    let mut input = Array2::from_shape_fn((v, dim), |_| rng.random_range(-half..half));
    let mut output = Array2::<f64>::zeros((v, dim));

    let planned = (cfg.epochs * total).max(1) as f64;
    let mut processed = 0usize;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut grad = vec![0.0; dim];
    let mut kept = Vec::new();

    for _ in 0..cfg.epochs {
        let mut loss_sum = 0.0;
        let mut pairs = 0usize;
        for sentence in &sentences {
            kept.clear();
            for &w in sentence {
                let keep = if cfg.subsample > 0.0 {
                    let f = counts[w] as f64 / total as f64;
                    let p_keep = (cfg.subsample / f).sqrt();
                    p_keep >= 1.0 || rng.random::<f64>() < p_keep
                } else {
                    true
                };
                if keep {
                    kept.push(w);
                }
            }
            for pos in 0..kept.len() {
                let progress = processed as f64 / planned;
                let lr = (cfg.learning_rate * (1.0 - progress)).max(cfg.min_learning_rate);
                let radius = rng.random_range(1..=cfg.window);
                let lo = pos.saturating_sub(radius);
                let hi = (pos + radius).min(kept.len() - 1);
                let center = kept[pos];
                for ctx_pos in lo..=hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    let context = kept[ctx_pos];
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    loss_sum += sgns_update(&mut input, &mut output, center, context, 1.0, lr, &mut grad);
                    for _ in 0..cfg.negatives {
                        let Some(neg) = sampler.draw(&mut rng, context) else { break };
                        loss_sum += sgns_update(&mut input, &mut output, center, neg, 0.0, lr, &mut grad);
                    }
                    let mut row = input.row_mut(center);
                    for (x, g) in row.iter_mut().zip(&grad) {
                        *x += g;
                    }
                    pairs += 1;
                }
            }
            processed += sentence.len();
        }
        epoch_losses.push(if pairs > 0 { loss_sum / pairs as f64 } else { 0.0 });
    }

    // UNK never trains; it takes the mean of the trained vectors.
    let mut mean = Array1::<f64>::zeros(dim);
    for i in (0..v).filter(|&i| i != unk) {
        mean += &input.row(i);
    }
    mean /= (v - 1).max(1) as f64;
    input.row_mut(unk).assign(&mean);

    let mut table = EmbeddingTable::new(vocab.clone(), input)?;
    table.output = Some(output);
    Ok((table, epoch_losses))
}

/// One logistic update of `output[word]` against `input[center]`; the
/// center gradient is accumulated into `grad`. Returns the pair loss.
fn sgns_update(
    input: &mut Array2<f64>,
    output: &mut Array2<f64>,
    center: usize,
    word: usize,
    label: f64,
    lr: f64,
    grad: &mut [f64],
) -> f64 {
    let vc = input.row(center);
    let mut uo = output.row_mut(word);
    let score = vc.dot(&uo);
    let p = sigmoid(score);
    let g = (label - p) * lr;
    for ((gr, u), c) in grad.iter_mut().zip(uo.iter_mut()).zip(vc.iter()) {
        *gr += g * *u;
        *u += g * c;
    }
    let p_correct = if label > 0.5 { p } else { 1.0 - p };
    -p_correct.max(1e-12).ln()
}

pub fn train_skipgram(
    corpus: &[Vec<String>],
    vocab: &Vocabulary,
    cfg: &SgnsConfig,
    seed: u64,
) -> Result<EmbeddingTable> {
    train_skipgram_logged(corpus, vocab, cfg, seed).map(|(t, _)| t)
}
