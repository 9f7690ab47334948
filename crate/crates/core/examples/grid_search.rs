//! A small hyperparameter grid over unit type and learning rate, trained in
//! parallel, reporting the best configuration per unit.

use std::collections::BTreeMap;

use tracelink::corpus::{normalize_and_tokenize, Vocabulary};
use tracelink::datasets::{generate_synthetic, split_pairs, SplitSpec, SynthConfig};
use tracelink::embedding::{train_skipgram, SgnsConfig};
use tracelink::training::{grid_search, SearchSpace};

fn main() -> tracelink::Result<()> {
    let bench = generate_synthetic(&SynthConfig { n_sources: 30, n_targets: 20, ..Default::default() })?;
    let corpus: Vec<Vec<String>> = bench.corpus.iter().map(|l| normalize_and_tokenize(l)).collect();
    let vocab = Vocabulary::build(&corpus, 1)?;
    let emb = train_skipgram(&corpus, &vocab, &SgnsConfig { dim: 20, ..Default::default() }, 0)?;
    let splits = split_pairs(&bench.dataset, &SplitSpec::standard(0))?;
    let space = SearchSpace {
        unit: ["GRU", "BI-LSTM", "AveVect"].map(String::from).to_vec(),
        layers: vec![1],
        hidden: vec![(20, 10)],
        lr: vec![1e-2, 1e-1],
        gc: vec![10.0],
        lambda: vec![1e-4],
        epochs: vec![5],
        ..Default::default()
    };
    let tables = BTreeMap::from([("default".to_string(), emb)]);
    let result = grid_search(&space, &bench.dataset, &splits, &tables, &[0, 1], 0)?;
    for run in result.best_per_unit() {
        let r = run.run().unwrap();
        println!("{:<8} lr {:<5} seed {} best dev loss {:.4}", r.config.encoder().label(), r.config.lr, r.seed, run.best_dev_loss().unwrap());
    }
    for (run, why) in result.failures() {
        println!("failed {:?}: {why}", run.config);
    }
    Ok(())
}
