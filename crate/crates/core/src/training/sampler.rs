use rand::seq::{index, SliceRandom};
use rand::Rng as _;

use crate::datasets::{Pair, TraceDataset};
use crate::error::{Error, Result};
use crate::rng::{seeded, streams};

/// One epoch of balanced examples: every link in `pairs` plus as many
/// non-links drawn afresh, shuffled. Negatives are drawn without
/// replacement unless the split has fewer non-links than links.
pub fn balanced_epoch_sampler(dataset: &TraceDataset, pairs: &[Pair], seed: u64, epoch: usize) -> Result<Vec<(Pair, bool)>> {
    let (pos, neg): (Vec<Pair>, Vec<Pair>) = pairs.iter().partition(|&&p| dataset.is_link(p));
    if pos.is_empty() {
        return Err(Error::NoPositives);
    }
    if neg.is_empty() {
        return Err(Error::InvalidArgument("training split has no non-links".into()));
    }
    let mut rng = seeded(seed, streams::SAMPLER_BASE + epoch as u64);
    let p = pos.len();
    let negatives: Vec<Pair> = if neg.len() >= p {
        index::sample(&mut rng, neg.len(), p).into_iter().map(|i| neg[i]).collect()
    } else {
        (0..p).map(|_| neg[rng.random_range(0..neg.len())]).collect()
    };
    let mut out: Vec<(Pair, bool)> = pos.into_iter().map(|q| (q, true)).chain(negatives.into_iter().map(|q| (q, false))).collect();
    out.shuffle(&mut rng);
    Ok(out)
}
