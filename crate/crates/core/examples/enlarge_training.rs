//! Moves test pairs into training to reach a larger training share, keeping
//! the dev split fixed, then retrains and compares test MAP.

use tracelink::corpus::{normalize_and_tokenize, Vocabulary};
use tracelink::datasets::{enlarge_training, generate_synthetic, split_pairs, SplitSpec, SynthConfig};
use tracelink::embedding::{train_skipgram, SgnsConfig};
use tracelink::evaluation::{mean_average_precision, ranked_lists};
use tracelink::rnn::CellKind;
use tracelink::tracenet::NetworkConfig;
use tracelink::training::{score_pairs, train};

fn main() -> tracelink::Result<()> {
    let bench = generate_synthetic(&SynthConfig::default())?;
    let ds = &bench.dataset;
    let corpus: Vec<Vec<String>> = bench.corpus.iter().map(|l| normalize_and_tokenize(l)).collect();
    let emb = train_skipgram(&corpus, &Vocabulary::build(&corpus, 1)?, &SgnsConfig::default(), 0)?;
    let base = split_pairs(ds, &SplitSpec::standard(0))?;
    let big = enlarge_training(ds, &base, 0.8, 0)?;
    let config = NetworkConfig { cell: CellKind::Gru, bidirectional: true, epochs: 10, ..Default::default() };
    for (name, splits) in [("standard", &base), ("enlarged", &big)] {
        let (tr, dv, te) = splits.link_counts(ds);
        let run = train(&config, ds, splits, &emb, 0)?;
        // evaluate both on the enlarged test split, which the standard one contains
        let scores = score_pairs(&run.best, ds, &big.test, &emb)?;
        let map = mean_average_precision(&ranked_lists(ds, &big.test, &scores)?)?;
        println!("{name}: {} train pairs, links {tr}/{dv}/{te}, MAP {:.4}", splits.train.len(), map.map);
    }
    Ok(())
}
