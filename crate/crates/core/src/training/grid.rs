use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{train, TrainRun};
use crate::datasets::{Splits, TraceDataset};
use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::rnn::CellKind;
use crate::tracenet::NetworkConfig;

/// Value lists for every configuration field; the grid is their product.
/// Units are labels such as `GRU`, `BI-LSTM` or `AveVect`; `hidden` lists
/// (recurrent width, integration width) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSpace {
    pub embedding: Vec<String>,
    pub unit: Vec<String>,
    pub layers: Vec<usize>,
    pub hidden: Vec<(usize, usize)>,
    pub lr: Vec<f64>,
    pub gc: Vec<f64>,
    pub lambda: Vec<f64>,
    pub batch_size: Vec<usize>,
    pub epochs: Vec<usize>,
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            embedding: vec!["default".into()],
            unit: ["GRU", "LSTM", "BI-GRU", "BI-LSTM", "AveVect"].map(String::from).to_vec(),
            layers: vec![1, 2],
            hidden: vec![(30, 10), (60, 20)],
            lr: vec![1e-3, 1e-2, 1e-1],
            gc: vec![10.0, 100.0],
            lambda: vec![1e-4, 1e-3],
            batch_size: vec![1],
            epochs: vec![60],
        }
    }
}

/// Parses a unit label (`GRU`, `BI-GRU`, `AveVect`, ...) case-insensitively.
pub(crate) fn parse_unit(label: &str) -> Result<(CellKind, bool)> {
    let lower = label.to_ascii_lowercase();
    match lower.strip_prefix("bi-") {
        Some(rest) => {
            let cell: CellKind = rest.parse()?;
            if !cell.is_recurrent() {
                return Err(Error::InvalidArgument(format!("`{label}` cannot be bidirectional")));
            }
            Ok((cell, true))
        }
        None => Ok((lower.parse()?, false)),
    }
}

impl SearchSpace {
    /// Every configuration in the grid, in a fixed order. AveVect ignores
    /// depth and recurrent width, so those axes collapse for it.
    pub fn configurations(&self) -> Result<Vec<NetworkConfig>> {
        let mut out = Vec::new();
        for emb in &self.embedding {
            for unit in &self.unit {
                let (cell, bidirectional) = parse_unit(unit)?;
                let mut seen = Vec::new();
                for &layers in &self.layers {
                    for &(hidden, integration) in &self.hidden {
                        let shape = if cell.is_recurrent() { (layers, hidden) } else { (1, 0) };
                        if seen.contains(&(shape, integration)) {
                            continue;
                        }
                        seen.push((shape, integration));
                        for &lr in &self.lr {
                            for &gc in &self.gc {
                                for &lambda in &self.lambda {
                                    for &batch_size in &self.batch_size {
                                        for &epochs in &self.epochs {
                                            out.push(NetworkConfig {
                                                embedding: emb.clone(),
                                                cell,
                                                bidirectional,
                                                layers: shape.0,
                                                hidden: shape.1,
                                                integration,
                                                lr,
                                                gc,
                                                lambda,
                                                batch_size,
                                                epochs,
                                            });
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

pub fn read_search_space(path: &Path) -> Result<SearchSpace> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

#[derive(Debug, Clone)]
pub enum GridOutcome {
    Trained(TrainRun),
    Failed(String),
}

#[derive(Debug, Clone)]
pub struct GridRun {
    pub config: NetworkConfig,
    pub seed: u64,
    pub outcome: GridOutcome,
}

impl GridRun {
    pub fn run(&self) -> Option<&TrainRun> {
        match &self.outcome {
            GridOutcome::Trained(r) => Some(r),
            GridOutcome::Failed(_) => None,
        }
    }

    pub fn best_dev_loss(&self) -> Option<f64> {
        self.run().and_then(TrainRun::best_dev_loss)
    }
}

/// All runs: trained ones ranked by best dev loss, failures last.
#[derive(Debug, Clone)]
pub struct GridResult {
    pub runs: Vec<GridRun>,
}

impl GridResult {
    pub fn trained(&self) -> impl Iterator<Item = &GridRun> {
        self.runs.iter().filter(|r| r.run().is_some())
    }

    pub fn failures(&self) -> impl Iterator<Item = (&GridRun, &str)> {
        self.runs.iter().filter_map(|r| match &r.outcome {
            GridOutcome::Failed(m) => Some((r, m.as_str())),
            GridOutcome::Trained(_) => None,
        })
    }

    /// Lowest-dev-loss run for each unit label, best first.
    pub fn best_per_unit(&self) -> Vec<&GridRun> {
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for r in self.trained() {
            let label = r.config.encoder().label();
            if !seen.contains(&label) {
                seen.push(label);
                out.push(r);
            }
        }
        out
    }
}

/// Trains every (configuration, seed) combination, `jobs` at a time.
/// Failures are recorded, never fatal.
pub fn grid_search(
    space: &SearchSpace,
    dataset: &TraceDataset,
    splits: &Splits,
    embeddings: &BTreeMap<String, EmbeddingTable>,
    seeds: &[u64],
    jobs: usize,
) -> Result<GridResult> {
    let configs = space.configurations()?;
    let tasks: Vec<(NetworkConfig, u64)> = configs.into_iter().flat_map(|c| seeds.iter().map(move |&s| (c.clone(), s))).collect();
    let work = |(config, seed): &(NetworkConfig, u64)| {
        let outcome = match embeddings.get(&config.embedding) {
            None => GridOutcome::Failed(format!("unknown embedding source `{}`", config.embedding)),
            Some(emb) => match train(config, dataset, splits, emb, *seed) {
                Ok(run) if run.best_epoch.is_some() => GridOutcome::Trained(run),
                Ok(_) => GridOutcome::Failed("no epochs trained".into()),
                Err(e) => GridOutcome::Failed(e.to_string()),
            },
        };
        GridRun {
            config: config.clone(),
            seed: *seed,
            outcome,
        }
    };
    let mut runs: Vec<GridRun> = if jobs <= 1 {
        tasks.iter().map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        pool.install(|| tasks.par_iter().map(work).collect())
    };
    runs.sort_by(|a, b| match (a.best_dev_loss(), b.best_dev_loss()) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    Ok(GridResult { runs })
}

/// CSV with one row per trained run:
/// `unit,dev_loss,embedding,layers,rnn_hidden,integration,lr,gc,lambda,seed`.
pub fn write_grid_report<'a>(path: &Path, runs: impl IntoIterator<Item = &'a GridRun>) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "unit,dev_loss,embedding,layers,rnn_hidden,integration,lr,gc,lambda,seed").unwrap();
    for r in runs {
        let Some(loss) = r.best_dev_loss() else { continue };
        let c = &r.config;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            c.encoder().label(),
            loss,
            c.embedding,
            c.layers,
            c.hidden,
            c.integration,
            c.lr,
            c.gc,
            c.lambda,
            r.seed
        )
        .unwrap();
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_labels() {
        assert_eq!(parse_unit("BI-GRU").unwrap(), (CellKind::Gru, true));
        assert_eq!(parse_unit("lstm").unwrap(), (CellKind::Lstm, false));
        assert_eq!(parse_unit("AveVect").unwrap(), (CellKind::AveVect, false));
        assert!(parse_unit("BI-AveVect").is_err());
        assert!(parse_unit("cnn").is_err());
    }

    #[test]
    fn default_space_size() {
        // 4 recurrent units × 2 depths × 2 widths, plus AveVect with 2
        // integration widths, each × 3 lr × 2 gc × 2 λ.
        let n = SearchSpace::default().configurations().unwrap().len();
        assert_eq!(n, (4 * 2 * 2 + 2) * 12);
    }

    #[test]
    fn space_json_partial() {
        let s: SearchSpace = serde_json::from_str(r#"{"unit":["GRU"],"lr":[0.01],"hidden":[[8,3]]}"#).unwrap();
        assert_eq!(s.unit, vec!["GRU"]);
        assert_eq!(s.hidden, vec![(8, 3)]);
        assert_eq!(s.gc, vec![10.0, 100.0]);
    }
}
