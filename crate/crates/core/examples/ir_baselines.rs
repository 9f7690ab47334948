//! TF-IDF vector space and LSI retrieval on the same benchmark, with
//! preprocessing options tuned on the dev split.

use tracelink::baselines::{tune_baseline, BaselineMethod};
use tracelink::corpus::default_stopwords;
use tracelink::datasets::{generate_synthetic, split_pairs, SplitSpec, SynthConfig, SynthMode};
use tracelink::evaluation::{mean_average_precision, ranked_lists};

fn main() -> tracelink::Result<()> {
    let stopwords = default_stopwords();
    for mode in [SynthMode::Lexical, SynthMode::Synonym] {
        let bench = generate_synthetic(&SynthConfig { mode, ..Default::default() })?;
        let splits = split_pairs(&bench.dataset, &SplitSpec::standard(0))?;
        for method in [BaselineMethod::Vsm, BaselineMethod::Lsi] {
            let tuned = tune_baseline(&bench.dataset, &splits.dev, method, &stopwords, 0.75)?;
            let scores = tuned.model.score_pairs(&bench.dataset, &splits.test)?;
            let map = mean_average_precision(&ranked_lists(&bench.dataset, &splits.test, &scores)?)?;
            println!("{mode:?} {method}: options {:?} dev MAP {:.4} test MAP {:.4}", tuned.options, tuned.dev_map, map.map);
        }
    }
    Ok(())
}
