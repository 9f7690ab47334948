use std::collections::BTreeMap;

use crate::datasets::{Pair, TraceDataset};
use crate::error::{Error, Result};

/// Candidates for one query, best first; equal scores are ordered by
/// ascending target id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub query: String,
    pub candidates: Vec<(String, f64, bool)>,
}

impl RankedList {
    pub fn new(query: impl Into<String>, mut candidates: Vec<(String, f64, bool)>) -> Result<Self> {
        if candidates.iter().any(|c| c.1.is_nan()) {
            return Err(Error::InvalidArgument("NaN score in ranked list".into()));
        }
        candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(RankedList {
            query: query.into(),
            candidates,
        })
    }

    pub fn relevance(&self) -> Vec<bool> {
        self.candidates.iter().map(|c| c.2).collect()
    }

    pub fn gold_count(&self) -> usize {
        self.candidates.iter().filter(|c| c.2).count()
    }
}

/// Mean of precision@i over the ranks i holding a relevant candidate,
/// divided by the number of relevant candidates. `None` when the query has
/// no relevant candidate.
pub fn average_precision(list: &RankedList) -> Option<f64> {
    let gold = list.gold_count();
    if gold == 0 {
        return None;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, c) in list.candidates.iter().enumerate() {
        if c.2 {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    Some(sum / gold as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapResult {
    pub map: f64,
    /// (query, AP) for every included query, in input order.
    pub per_query: Vec<(String, f64)>,
    /// Queries without relevant candidates.
    pub excluded: Vec<String>,
}

impl MapResult {
    pub fn aps(&self) -> Vec<f64> {
        self.per_query.iter().map(|q| q.1).collect()
    }
}

pub fn mean_average_precision(lists: &[RankedList]) -> Result<MapResult> {
    let mut per_query = Vec::new();
    let mut excluded = Vec::new();
    for l in lists {
        match average_precision(l) {
            Some(ap) => per_query.push((l.query.clone(), ap)),
            None => excluded.push(l.query.clone()),
        }
    }
    if per_query.is_empty() {
        return Err(Error::NoQueries);
    }
    let map = per_query.iter().map(|q| q.1).sum::<f64>() / per_query.len() as f64;
    Ok(MapResult { map, per_query, excluded })
}

/// Groups scored pairs by source into one ranked list per query, ordered
/// by source index.
pub fn ranked_lists(dataset: &TraceDataset, pairs: &[Pair], scores: &[f64]) -> Result<Vec<RankedList>> {
    if pairs.len() != scores.len() {
        return Err(Error::Shape(format!("{} pairs but {} scores", pairs.len(), scores.len())));
    }
    let mut groups: BTreeMap<usize, Vec<(String, f64, bool)>> = BTreeMap::new();
    for (&(s, t), &score) in pairs.iter().zip(scores) {
        groups
            .entry(s)
            .or_default()
            .push((dataset.targets[t].id.clone(), score, dataset.is_link((s, t))));
    }
    groups
        .into_iter()
        .map(|(s, c)| RankedList::new(dataset.sources[s].id.clone(), c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(rel: &[bool]) -> RankedList {
        let n = rel.len();
        let c = rel.iter().enumerate().map(|(i, &r)| (format!("t{i:02}"), (n - i) as f64, r)).collect();
        RankedList::new("q", c).unwrap()
    }

    #[test]
    fn ap_cases() {
        assert!((average_precision(&list(&[true, false, true])).unwrap() - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-15);
        assert_eq!(average_precision(&list(&[true, true, false, false])), Some(1.0));
        assert_eq!(average_precision(&list(&[false, false, false, true, false])), Some(0.25));
        assert_eq!(average_precision(&list(&[false, false])), None);
    }

    #[test]
    fn ties_break_by_target_id() {
        let l = RankedList::new("q", vec![("b".into(), 1.0, false), ("a".into(), 1.0, true), ("c".into(), 2.0, false)]).unwrap();
        let ids: Vec<_> = l.candidates.iter().map(|c| c.0.as_str()).collect();
        assert_eq!(ids, ["c", "a", "b"]);
    }

    #[test]
    fn map_excludes_empty_queries() {
        let mut a = list(&[true, false]);
        a.query = "a".into();
        let mut b = list(&[false, true]);
        b.query = "b".into();
        let mut c = list(&[false, false]);
        c.query = "c".into();
        let m = mean_average_precision(&[a, b, c]).unwrap();
        assert_eq!(m.map, 0.75);
        assert_eq!(m.excluded, vec!["c"]);
        assert!(matches!(mean_average_precision(&[list(&[false])]), Err(Error::NoQueries)));
    }
}
