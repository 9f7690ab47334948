//! Trace datasets: ingestion and validation, the source×target pair space,
//! seeded pair-level splits, training-split enlargement and the synthetic
//! benchmark generator.

mod split;
mod synth;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::corpus::{read_artifacts, Artifact, Role};
use crate::error::{Error, Result};

pub use split::{enlarge_training, read_splits, split_pairs, write_splits, SplitName, SplitSpec, Splits};
pub use synth::{generate_synthetic, SynthConfig, SynthManifest, SynthMode, SyntheticBenchmark};

/// (source index, target index) into a [`TraceDataset`].
pub type Pair = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct TraceDataset {
    pub sources: Vec<Artifact>,
    pub targets: Vec<Artifact>,
    links: BTreeSet<Pair>,
    source_index: HashMap<String, usize>,
    target_index: HashMap<String, usize>,
}

/// Non-fatal findings while assembling a dataset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadReport {
    pub duplicate_links: usize,
    pub degenerate_artifacts: Vec<String>,
}

impl LoadReport {
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.duplicate_links > 0 {
            w.push(format!("{} duplicate links ignored", self.duplicate_links));
        }
        if !self.degenerate_artifacts.is_empty() {
            w.push(format!("{} artifacts have no tokens", self.degenerate_artifacts.len()));
        }
        w
    }
}

impl TraceDataset {
    /// Validates ids and links; duplicate links are dropped and counted.
    pub fn new(sources: Vec<Artifact>, targets: Vec<Artifact>, links: &[(String, String)]) -> Result<(Self, LoadReport)> {
        let mut report = LoadReport::default();
        let mut source_index = HashMap::new();
        let mut target_index = HashMap::new();
        for (i, a) in sources.iter().enumerate() {
            if a.id.is_empty() {
                return Err(Error::InvalidArgument("empty artifact id".into()));
            }
            if source_index.insert(a.id.clone(), i).is_some() {
                return Err(Error::DuplicateArtifact(a.id.clone()));
            }
        }
        for (i, a) in targets.iter().enumerate() {
            if a.id.is_empty() {
                return Err(Error::InvalidArgument("empty artifact id".into()));
            }
            if source_index.contains_key(&a.id) || target_index.insert(a.id.clone(), i).is_some() {
                return Err(Error::DuplicateArtifact(a.id.clone()));
            }
        }
        report.degenerate_artifacts = sources
            .iter()
            .chain(&targets)
            .filter(|a| a.is_degenerate())
            .map(|a| a.id.clone())
            .collect();

        let mut set = BTreeSet::new();
        for (s, t) in links {
            let si = *source_index.get(s).ok_or_else(|| Error::DanglingLink(s.clone()))?;
            let ti = *target_index.get(t).ok_or_else(|| Error::DanglingLink(t.clone()))?;
            if !set.insert((si, ti)) {
                report.duplicate_links += 1;
            }
        }
        Ok((
            TraceDataset {
                sources,
                targets,
                links: set,
                source_index,
                target_index,
            },
            report,
        ))
    }

    pub fn num_pairs(&self) -> usize {
        self.sources.len() * self.targets.len()
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn is_link(&self, pair: Pair) -> bool {
        self.links.contains(&pair)
    }

    pub fn links(&self) -> impl Iterator<Item = Pair> + '_ {
        self.links.iter().copied()
    }

    /// Every source×target pair, source-major.
    pub fn all_pairs(&self) -> Vec<Pair> {
        let nt = self.targets.len();
        (0..self.sources.len()).flat_map(|s| (0..nt).map(move |t| (s, t))).collect()
    }

    pub fn source_idx(&self, id: &str) -> Option<usize> {
        self.source_index.get(id).copied()
    }

    pub fn target_idx(&self, id: &str) -> Option<usize> {
        self.target_index.get(id).copied()
    }

    pub fn pair_ids(&self, (s, t): Pair) -> (&str, &str) {
        (&self.sources[s].id, &self.targets[t].id)
    }

    /// Looks a pair up by artifact ids.
    pub fn pair_of(&self, source: &str, target: &str) -> Result<Pair> {
        let s = self.source_idx(source).ok_or_else(|| Error::UnknownArtifact(source.to_string()))?;
        let t = self.target_idx(target).ok_or_else(|| Error::UnknownArtifact(target.to_string()))?;
        Ok((s, t))
    }

    pub fn link_ids(&self) -> Vec<(String, String)> {
        self.links
            .iter()
            .map(|&p| {
                let (s, t) = self.pair_ids(p);
                (s.to_string(), t.to_string())
            })
            .collect()
    }

    /// Sources followed by targets.
    pub fn artifacts(&self) -> impl Iterator<Item = &Artifact> {
        self.sources.iter().chain(&self.targets)
    }
}

/// Reads a link file: CSV `source_id,target_id`, optional header row.
pub fn read_links(path: &Path) -> Result<Vec<(String, String)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut out = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() < 2 {
            return Err(Error::parse(format!("{}:{}", path.display(), n + 1), "expected source_id,target_id"));
        }
        if n == 0 && &rec[0] == "source_id" {
            continue;
        }
        out.push((rec[0].to_string(), rec[1].to_string()));
    }
    Ok(out)
}

pub fn write_links(path: &Path, links: &[(String, String)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["source_id", "target_id"]).map_err(|e| csv_error(path, e))?;
    for (s, t) in links {
        w.write_record([s, t]).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path.display().to_string(), format!("{other:?}")),
    }
}

/// Loads artifacts (JSON lines, roles inline) and gold links.
pub fn load_dataset(artifacts: &Path, links: &Path) -> Result<(TraceDataset, LoadReport)> {
    let all = read_artifacts(artifacts)?;
    let (sources, targets): (Vec<_>, Vec<_>) = all.into_iter().partition(|a| a.role == Role::Source);
    let links = read_links(links)?;
    TraceDataset::new(sources, targets, &links)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::write_artifacts;

    fn art(id: &str, role: Role) -> Artifact {
        Artifact::new(id, role, format!("text of {id}"))
    }

    #[test]
    fn pair_space_and_validation() {
        let s = vec![art("s1", Role::Source), art("s2", Role::Source)];
        let t = vec![art("t1", Role::Target), art("t2", Role::Target), art("t3", Role::Target)];
        let links = vec![("s1".to_string(), "t2".to_string()), ("s1".to_string(), "t2".to_string())];
        let (d, rep) = TraceDataset::new(s.clone(), t.clone(), &links).unwrap();
        assert_eq!(d.num_pairs(), 6);
        assert_eq!(d.all_pairs().len(), 6);
        assert_eq!(d.num_links(), 1);
        assert_eq!(rep.duplicate_links, 1);

        let bad = vec![("s1".to_string(), "t9".to_string())];
        let err = TraceDataset::new(s.clone(), t.clone(), &bad).unwrap_err();
        assert!(err.to_string().contains("t9"));

        let dup = vec![art("s1", Role::Source), art("s1", Role::Source)];
        assert!(matches!(TraceDataset::new(dup, t, &[]), Err(Error::DuplicateArtifact(_))));
    }

    #[test]
    fn loads_files() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.jsonl");
        let l = dir.path().join("l.csv");
        write_artifacts(&a, &[art("s1", Role::Source), art("t1", Role::Target), Artifact::new("t2", Role::Target, "")]).unwrap();
        std::fs::write(&l, "").unwrap();
        let (d, rep) = load_dataset(&a, &l).unwrap();
        assert_eq!(d.num_links(), 0);
        assert_eq!(rep.degenerate_artifacts, vec!["t2".to_string()]);

        write_links(&l, &[("s1".into(), "t1".into())]).unwrap();
        let (d, _) = load_dataset(&a, &l).unwrap();
        assert!(d.is_link((0, 0)));
        std::fs::write(&l, "s1,t1\ns1,t2\n").unwrap();
        assert_eq!(load_dataset(&a, &l).unwrap().0.num_links(), 2);
    }
}
