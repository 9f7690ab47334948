use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{csv_error, Pair, TraceDataset};
use crate::error::{Error, Result};
use crate::rng::{seeded, streams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
    pub seed: u64,
}

impl SplitSpec {
    /// 45% train, 10% dev, 45% test.
    pub fn standard(seed: u64) -> Self {
        SplitSpec { train: 0.45, dev: 0.10, test: 0.45, seed }
    }

    /// 80% train, 10% dev, 10% test.
    pub fn enlarged(seed: u64) -> Self {
        SplitSpec { train: 0.80, dev: 0.10, test: 0.10, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.dev, self.test];
        if parts.iter().any(|f| !(0.0..=1.0).contains(f)) || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "split fractions {}/{}/{} must be non-negative and sum to 1",
                self.train, self.dev, self.test
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitName {
    Train,
    Dev,
    Test,
}

impl std::str::FromStr for SplitName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(SplitName::Train),
            "dev" => Ok(SplitName::Dev),
            "test" => Ok(SplitName::Test),
            other => Err(Error::InvalidArgument(format!("unknown split `{other}`"))),
        }
    }
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitName::Train => "train",
            SplitName::Dev => "dev",
            SplitName::Test => "test",
        })
    }
}

/// Disjoint pair sets, each sorted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Splits {
    pub train: Vec<Pair>,
    pub dev: Vec<Pair>,
    pub test: Vec<Pair>,
}

impl Splits {
    pub fn get(&self, name: SplitName) -> &[Pair] {
        match name {
            SplitName::Train => &self.train,
            SplitName::Dev => &self.dev,
            SplitName::Test => &self.test,
        }
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.dev.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Gold link count per split (train, dev, test).
    pub fn link_counts(&self, dataset: &TraceDataset) -> (usize, usize, usize) {
        let c = |s: &[Pair]| s.iter().filter(|&&p| dataset.is_link(p)).count();
        (c(&self.train), c(&self.dev), c(&self.test))
    }
}

/// Seeded pair-level partition of the full pair space. Split sizes are
/// rounded from the fractions; test takes the remainder.
pub fn split_pairs(dataset: &TraceDataset, spec: &SplitSpec) -> Result<Splits> {
    spec.validate()?;
    let mut pairs = dataset.all_pairs();
    let n = pairs.len();
    pairs.shuffle(&mut seeded(spec.seed, streams::SPLIT));
    let n_train = (spec.train * n as f64).round() as usize;
    let n_dev = ((spec.dev * n as f64).round() as usize).min(n - n_train);
    let mut train = pairs[..n_train].to_vec();
    let mut dev = pairs[n_train..n_train + n_dev].to_vec();
    let mut test = pairs[n_train + n_dev..].to_vec();
    train.sort_unstable();
    dev.sort_unstable();
    test.sort_unstable();
    Ok(Splits { train, dev, test })
}

/// Moves randomly chosen test pairs into training until training holds
/// `train_fraction` of the pair space. Dev is left untouched.
pub fn enlarge_training(dataset: &TraceDataset, splits: &Splits, train_fraction: f64, seed: u64) -> Result<Splits> {
    let n = dataset.num_pairs();
    let target = (train_fraction * n as f64).round() as usize;
    if !(0.0..=1.0).contains(&train_fraction) || target <= splits.train.len() {
        return Err(Error::InvalidArgument(format!(
            "new training fraction {train_fraction} must exceed the current {:.4}",
            splits.train.len() as f64 / n.max(1) as f64
        )));
    }
    let needed = target - splits.train.len();
    if needed > splits.test.len() {
        return Err(Error::InsufficientTestPairs {
            needed,
            available: splits.test.len(),
        });
    }
    let mut test = splits.test.clone();
    test.shuffle(&mut seeded(seed, streams::ENLARGE));
    let moved = test.split_off(test.len() - needed);
    let mut train = splits.train.clone();
    train.extend(moved);
    train.sort_unstable();
    test.sort_unstable();
    Ok(Splits {
        train,
        dev: splits.dev.clone(),
        test,
    })
}

/// CSV `source_id,target_id,split`.
pub fn write_splits(path: &Path, dataset: &TraceDataset, splits: &Splits) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["source_id", "target_id", "split"]).map_err(|e| csv_error(path, e))?;
    for name in [SplitName::Train, SplitName::Dev, SplitName::Test] {
        let label = name.to_string();
        for &p in splits.get(name) {
            let (s, t) = dataset.pair_ids(p);
            w.write_record([s, t, label.as_str()]).map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_splits(path: &Path, dataset: &TraceDataset) -> Result<Splits> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut splits = Splits::default();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() < 3 {
            return Err(Error::parse(path.display().to_string(), "expected source_id,target_id,split"));
        }
        let pair = dataset.pair_of(&rec[0], &rec[1])?;
        match rec[2].parse::<SplitName>() {
            Ok(SplitName::Train) => splits.train.push(pair),
            Ok(SplitName::Dev) => splits.dev.push(pair),
            Ok(SplitName::Test) => splits.test.push(pair),
            Err(e) => return Err(Error::parse(path.display().to_string(), e.to_string())),
        }
    }
    splits.train.sort_unstable();
    splits.dev.sort_unstable();
    splits.test.sort_unstable();
    Ok(splits)
}
