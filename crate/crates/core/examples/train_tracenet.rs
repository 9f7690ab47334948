//! Trains a BI-GRU trace network on a synthetic synonym benchmark and
//! reports per-epoch losses and test MAP.

use tracelink::corpus::{normalize_and_tokenize, Vocabulary};
use tracelink::datasets::{generate_synthetic, split_pairs, SplitSpec, SynthConfig};
use tracelink::embedding::{train_skipgram, SgnsConfig};
use tracelink::evaluation::{mean_average_precision, ranked_lists};
use tracelink::rnn::CellKind;
use tracelink::tracenet::NetworkConfig;
use tracelink::training::{score_pairs, train_observed};

fn main() -> tracelink::Result<()> {
    let seed = 1;
    let bench = generate_synthetic(&SynthConfig { seed, ..Default::default() })?;
    let corpus: Vec<Vec<String>> = bench.corpus.iter().map(|l| normalize_and_tokenize(l)).collect();
    let vocab = Vocabulary::build(&corpus, 1)?;
    let emb = train_skipgram(&corpus, &vocab, &SgnsConfig::default(), seed)?;
    let splits = split_pairs(&bench.dataset, &SplitSpec::standard(seed))?;
    let config = NetworkConfig { cell: CellKind::Gru, bidirectional: true, epochs: 15, ..Default::default() };
    let run = train_observed(&config, &bench.dataset, &splits, &emb, seed, |r, _| {
        println!("epoch {:>2} lr {:.4} train {:.4} dev {:.4}", r.epoch + 1, r.learning_rate, r.train_loss, r.dev_loss);
    })?;
    println!("best epoch {:?}", run.best_epoch.map(|e| e + 1));
    let scores = score_pairs(&run.best, &bench.dataset, &splits.test, &emb)?;
    let map = mean_average_precision(&ranked_lists(&bench.dataset, &splits.test, &scores)?)?;
    println!("test MAP {:.4} over {} queries", map.map, map.per_query.len());
    Ok(())
}
