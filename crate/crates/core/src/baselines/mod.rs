//! Bag-of-words retrieval baselines: TF-IDF vector space model and latent
//! semantic indexing, with the IR preprocessing grid.

mod lsi;
mod matrix;
mod svd;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::{ir_preprocess_with, StopWords};
use crate::datasets::{Pair, TraceDataset};
use crate::error::{Error, Result};
use crate::evaluation::{mean_average_precision, ranked_lists};

pub use lsi::{default_rank, lsi_score, truncated_svd, LsiModel, DEFAULT_RANK_FRACTION};
pub use matrix::{tfidf_weight, vsm_score, TermDocMatrix, WeightedMatrix};
pub use svd::{symmetric_eigen, truncated_svd_dense, TruncatedSvd, SVD_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    Vsm,
    Lsi,
}

impl fmt::Display for BaselineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineMethod::Vsm => "vsm",
            BaselineMethod::Lsi => "lsi",
        })
    }
}

impl FromStr for BaselineMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vsm" => Ok(BaselineMethod::Vsm),
            "lsi" => Ok(BaselineMethod::Lsi),
            _ => Err(Error::InvalidArgument(format!("unknown baseline `{s}`"))),
        }
    }
}

/// Which IR preprocessing stages are on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IrOptions {
    pub stopwords: bool,
    pub stem: bool,
}

impl IrOptions {
    /// Stopwords × stemming, both-on first.
    pub fn grid() -> [IrOptions; 4] {
        [(true, true), (true, false), (false, true), (false, false)].map(|(stopwords, stem)| IrOptions { stopwords, stem })
    }
}

impl Default for IrOptions {
    fn default() -> Self {
        IrOptions { stopwords: true, stem: true }
    }
}

/// Term-document counts over every artifact of the dataset, sources first.
pub fn index_dataset(dataset: &TraceDataset, options: IrOptions, stopwords: &StopWords) -> Result<TermDocMatrix> {
    let stop = options.stopwords.then_some(stopwords);
    let docs: Vec<(String, Vec<String>)> = dataset
        .sources
        .iter()
        .chain(&dataset.targets)
        .map(|a| (a.id.clone(), ir_preprocess_with(&a.raw_text, stop, options.stem)))
        .collect();
    TermDocMatrix::from_documents(&docs)
}

/// A fitted baseline ready to score pairs.
#[derive(Debug, Clone)]
pub enum BaselineModel {
    Vsm(WeightedMatrix),
    Lsi(LsiModel),
}

impl BaselineModel {
    /// Fits `method`; LSI keeps `rank_fraction` of `min(terms, docs)`.
    pub fn fit(dataset: &TraceDataset, method: BaselineMethod, options: IrOptions, stopwords: &StopWords, rank_fraction: f64) -> Result<Self> {
        let weighted = tfidf_weight(&index_dataset(dataset, options, stopwords)?);
        Ok(match method {
            BaselineMethod::Vsm => BaselineModel::Vsm(weighted),
            BaselineMethod::Lsi => {
                let k = default_rank(weighted.terms().len(), weighted.docs().len(), rank_fraction);
                BaselineModel::Lsi(truncated_svd(&weighted, k)?)
            }
        })
    }

    pub fn score(&self, a: &str, b: &str) -> Result<f64> {
        match self {
            BaselineModel::Vsm(w) => vsm_score(a, b, w),
            BaselineModel::Lsi(m) => lsi_score(a, b, m),
        }
    }

    /// Scores of (source, target) pairs, in order.
    pub fn score_pairs(&self, dataset: &TraceDataset, pairs: &[Pair]) -> Result<Vec<f64>> {
        pairs
            .par_iter()
            .map(|&(s, t)| self.score(&dataset.sources[s].id, &dataset.targets[t].id))
            .collect()
    }
}

/// Outcome of the preprocessing grid for one method.
#[derive(Debug, Clone)]
pub struct TunedBaseline {
    pub method: BaselineMethod,
    pub options: IrOptions,
    pub dev_map: f64,
    pub model: BaselineModel,
}

/// Fits `method` under every preprocessing option and keeps the one with
/// the best MAP over `dev_pairs`; earlier grid entries win ties.
pub fn tune_baseline(
    dataset: &TraceDataset,
    dev_pairs: &[Pair],
    method: BaselineMethod,
    stopwords: &StopWords,
    rank_fraction: f64,
) -> Result<TunedBaseline> {
    let mut best: Option<TunedBaseline> = None;
    for options in IrOptions::grid() {
        let model = BaselineModel::fit(dataset, method, options, stopwords, rank_fraction)?;
        let scores = model.score_pairs(dataset, dev_pairs)?;
        let dev_map = mean_average_precision(&ranked_lists(dataset, dev_pairs, &scores)?)?.map;
        if best.as_ref().is_none_or(|b| dev_map > b.dev_map) {
            best = Some(TunedBaseline { method, options, dev_map, model });
        }
    }
    Ok(best.expect("grid is not empty"))
}

/// CSV `source_id,target_id,score,method`.
pub fn write_scores(path: &Path, dataset: &TraceDataset, pairs: &[Pair], scores: &[f64], method: &str) -> Result<()> {
    if pairs.len() != scores.len() {
        return Err(Error::Shape(format!("{} pairs but {} scores", pairs.len(), scores.len())));
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let csv_err = |e: csv::Error| Error::parse(path.display().to_string(), e.to_string());
    w.write_record(["source_id", "target_id", "score", "method"]).map_err(csv_err)?;
    for (&(s, t), score) in pairs.iter().zip(scores) {
        w.write_record([dataset.sources[s].id.as_str(), dataset.targets[t].id.as_str(), &score.to_string(), method])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a score CSV written by [`write_scores`] (or by the network) into
/// (source id, target id, score, method) records.
pub fn read_scores(path: &Path) -> Result<Vec<(String, String, f64, String)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    let mut out = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let ctx = || format!("{}:{}", path.display(), n + 2);
        let rec = rec.map_err(|e| Error::parse(ctx(), e.to_string()))?;
        if rec.len() != 4 {
            return Err(Error::parse(ctx(), format!("expected 4 fields, found {}", rec.len())));
        }
        let score: f64 = rec[2].parse().map_err(|_| Error::parse(ctx(), format!("bad score `{}`", &rec[2])))?;
        out.push((rec[0].to_string(), rec[1].to_string(), score, rec[3].to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::default_stopwords;
    use crate::datasets::{generate_synthetic, SynthConfig};

    #[test]
    fn lexical_benchmark_favours_links() {
        let b = generate_synthetic(&SynthConfig::toy_lexical(3)).unwrap();
        let d = &b.dataset;
        let model = BaselineModel::fit(d, BaselineMethod::Vsm, IrOptions::default(), &default_stopwords(), DEFAULT_RANK_FRACTION).unwrap();
        let pairs = d.all_pairs();
        let scores = model.score_pairs(d, &pairs).unwrap();
        let mean = |want: bool| {
            let v: Vec<f64> = pairs.iter().zip(&scores).filter(|(p, _)| d.is_link(**p) == want).map(|x| *x.1).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!(mean(true) > mean(false));
    }

    #[test]
    fn synonym_benchmark_gives_vsm_nothing() {
        let b = generate_synthetic(&SynthConfig { n_sources: 12, n_targets: 10, corpus_lines: 50, ..SynthConfig::default() }).unwrap();
        let d = &b.dataset;
        let model = BaselineModel::fit(d, BaselineMethod::Vsm, IrOptions::default(), &default_stopwords(), DEFAULT_RANK_FRACTION).unwrap();
        assert!(model.score_pairs(d, &d.all_pairs()).unwrap().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn tuning_and_score_file() {
        let b = generate_synthetic(&SynthConfig::toy_lexical(1)).unwrap();
        let d = &b.dataset;
        let pairs = d.all_pairs();
        let tuned = tune_baseline(d, &pairs, BaselineMethod::Lsi, &default_stopwords(), DEFAULT_RANK_FRACTION).unwrap();
        assert!(tuned.dev_map > 0.0 && tuned.dev_map <= 1.0);
        let scores = tuned.model.score_pairs(d, &pairs).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_scores(&p, d, &pairs, &scores, "lsi").unwrap();
        let back = read_scores(&p).unwrap();
        assert_eq!(back.len(), pairs.len());
        assert_eq!(back[0].2, scores[0]);
        assert_eq!(back[0].3, "lsi");
        assert_eq!("LSI".parse::<BaselineMethod>().unwrap(), BaselineMethod::Lsi);
    }
}
