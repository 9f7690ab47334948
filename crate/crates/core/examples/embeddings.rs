//! Skip-gram word vectors trained on a synthetic domain corpus, then
//! queried for the nearest neighbors of a few synonym-dictionary entries.

use tracelink::corpus::{normalize_and_tokenize, Vocabulary};
use tracelink::datasets::{generate_synthetic, SynthConfig};
use tracelink::embedding::{train_skipgram_logged, SgnsConfig};

fn main() -> tracelink::Result<()> {
    let bench = generate_synthetic(&SynthConfig::default())?;
    let corpus: Vec<Vec<String>> = bench.corpus.iter().map(|l| normalize_and_tokenize(l)).collect();
    let vocab = Vocabulary::build(&corpus, 1)?;
    let (table, losses) = train_skipgram_logged(&corpus, &vocab, &SgnsConfig::default(), 7)?;
    println!("{} words, dim {}", table.vocab().len(), table.dim());
    for (epoch, loss) in losses.iter().enumerate() {
        println!("epoch {} loss {loss:.4}", epoch + 1);
    }
    for (a, b) in bench.manifest.dictionary.iter().take(5) {
        let near = table.cosine_neighbors(a, 3)?;
        println!("{a} (synonym {b}): {near:.3?}");
    }
    Ok(())
}
