//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use ndarray::Array1;
use rand::Rng as _;
use tracelink::corpus::{normalize_and_tokenize, Vocabulary};
use tracelink::datasets::{generate_synthetic, split_pairs, SplitSpec, Splits, SynthConfig, SyntheticBenchmark};
use tracelink::embedding::{train_skipgram, EmbeddingTable, SgnsConfig};
use tracelink::params::Tensors;
use tracelink::rng::Rng;

pub const FD_STEP: f64 = 1e-5;
/// Gradients smaller than this are compared in absolute terms.
pub const FD_FLOOR: f64 = 1e-3;

/// Largest relative gap between `analytic` and a central finite difference
/// of `f`, over every scalar parameter.
pub fn fd_max_error<P: Tensors + Clone>(params: &P, analytic: &P, f: impl Fn(&P) -> f64) -> f64 {
    let grads = analytic.flatten();
    let shapes: Vec<usize> = params.tensors().iter().map(|(_, t)| t.len()).collect();
    let mut worst = 0.0f64;
    let mut flat = 0;
    for (k, &len) in shapes.iter().enumerate() {
        for e in 0..len {
            let shifted = |delta: f64| {
                let mut p = params.clone();
                *p.tensors_mut()[k].iter_mut().nth(e).unwrap() += delta;
                f(&p)
            };
            let numeric = (shifted(FD_STEP) - shifted(-FD_STEP)) / (2.0 * FD_STEP);
            let a = grads[flat];
            let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(FD_FLOOR);
            worst = worst.max(err);
            flat += 1;
        }
    }
    worst
}

pub fn random_vec(rng: &mut Rng, n: usize) -> Array1<f64> {
    Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0))
}

pub fn random_sequence(rng: &mut Rng, len: usize, dim: usize) -> Vec<Array1<f64>> {
    (0..len).map(|_| random_vec(rng, dim)).collect()
}

/// Average precision straight from its definition: for every relevant
/// rank k, the share of relevant items among the first k, averaged over
/// the relevant items.
pub fn brute_force_ap(relevance: &[bool]) -> Option<f64> {
    let total = relevance.iter().filter(|&&r| r).count();
    if total == 0 {
        return None;
    }
    let mut sum = 0.0;
    for k in 0..relevance.len() {
        if relevance[k] {
            let hits = relevance[..=k].iter().filter(|&&r| r).count();
            sum += hits as f64 / (k + 1) as f64;
        }
    }
    Some(sum / total as f64)
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Scalar LSTM step with gates (i, f, o, c) given as (w, u, b) triples.
pub fn scalar_lstm(g: [(f64, f64, f64); 4], x: f64, h: f64, c: f64) -> (f64, f64) {
    let pre = |k: usize| g[k].0 * x + g[k].1 * h + g[k].2;
    let (i, f, o, cand) = (sigmoid(pre(0)), sigmoid(pre(1)), sigmoid(pre(2)), pre(3).tanh());
    let c = i * cand + f * c;
    (o * c.tanh(), c)
}

/// Scalar GRU step with gates (r, u, h̃) given as (w, u, b) triples.
pub fn scalar_gru(g: [(f64, f64, f64); 3], x: f64, h: f64) -> f64 {
    let r = sigmoid(g[0].0 * x + g[0].1 * h + g[0].2);
    let u = sigmoid(g[1].0 * x + g[1].1 * h + g[1].2);
    let cand = (g[2].0 * x + g[2].1 * (r * h) + g[2].2).tanh();
    (1.0 - u) * h + u * cand
}

/// A synthetic benchmark with skip-gram vectors trained on its corpus and
/// the standard split, all from one seed.
pub struct Fixture {
    pub bench: SyntheticBenchmark,
    pub embeddings: EmbeddingTable,
    pub splits: Splits,
}

pub fn fixture(cfg: &SynthConfig) -> Fixture {
    let bench = generate_synthetic(cfg).unwrap();
    let corpus: Vec<Vec<String>> = bench.corpus.iter().map(|l| normalize_and_tokenize(l)).collect();
    let vocab = Vocabulary::build(&corpus, 1).unwrap();
    let embeddings = train_skipgram(&corpus, &vocab, &SgnsConfig::default(), cfg.seed).unwrap();
    let splits = split_pairs(&bench.dataset, &SplitSpec::standard(cfg.seed)).unwrap();
    Fixture { bench, embeddings, splits }
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
