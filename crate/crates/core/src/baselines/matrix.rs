use std::collections::{BTreeMap, HashMap};

use ndarray::Array2;

use crate::error::{Error, Result};

/// Sparse term×document counts. Columns hold (term, count) sorted by term.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDocMatrix {
    terms: Vec<String>,
    docs: Vec<String>,
    doc_index: HashMap<String, usize>,
    columns: Vec<Vec<(usize, u32)>>,
}

impl TermDocMatrix {
    /// Builds the matrix from (document id, tokens). Terms are indexed in
    /// lexicographic order.
    pub fn from_documents(documents: &[(String, Vec<String>)]) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::InvalidArgument("term-document matrix needs at least one document".into()));
        }
        let mut vocab: BTreeMap<&str, usize> = documents.iter().flat_map(|d| d.1.iter().map(|t| (t.as_str(), 0))).collect();
        for (i, v) in vocab.values_mut().enumerate() {
            *v = i;
        }
        let mut doc_index = HashMap::new();
        let mut columns = Vec::with_capacity(documents.len());
        for (j, (id, tokens)) in documents.iter().enumerate() {
            if doc_index.insert(id.clone(), j).is_some() {
                return Err(Error::DuplicateArtifact(id.clone()));
            }
            let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
            for t in tokens {
                *counts.entry(vocab[t.as_str()]).or_default() += 1;
            }
            columns.push(counts.into_iter().collect());
        }
        Ok(TermDocMatrix {
            terms: vocab.into_keys().map(str::to_string).collect(),
            docs: documents.iter().map(|d| d.0.clone()).collect(),
            doc_index,
            columns,
        })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn docs(&self) -> &[String] {
        &self.docs
    }

    pub fn doc(&self, id: &str) -> Result<usize> {
        self.doc_index.get(id).copied().ok_or_else(|| Error::UnknownArtifact(id.to_string()))
    }

    pub fn column(&self, doc: usize) -> &[(usize, u32)] {
        &self.columns[doc]
    }

    /// Number of documents containing each term.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0; self.terms.len()];
        for c in &self.columns {
            for &(t, _) in c {
                df[t] += 1;
            }
        }
        df
    }
}

/// TF-IDF weighted term×document matrix, kept sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMatrix {
    terms: Vec<String>,
    docs: Vec<String>,
    doc_index: HashMap<String, usize>,
    columns: Vec<Vec<(usize, f64)>>,
}

/// `w(t, d) = tf(t, d) · ln(N / df(t))`. Entries that weigh 0 are dropped.
pub fn tfidf_weight(matrix: &TermDocMatrix) -> WeightedMatrix {
    let n = matrix.docs.len() as f64;
    let idf: Vec<f64> = matrix.document_frequencies().iter().map(|&df| (n / df as f64).ln()).collect();
    let columns = matrix
        .columns
        .iter()
        .map(|c| {
            c.iter()
                .map(|&(t, tf)| (t, tf as f64 * idf[t]))
                .filter(|&(_, w)| w != 0.0)
                .collect()
        })
        .collect();
    WeightedMatrix {
        terms: matrix.terms.clone(),
        docs: matrix.docs.clone(),
        doc_index: matrix.doc_index.clone(),
        columns,
    }
}

impl WeightedMatrix {
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn docs(&self) -> &[String] {
        &self.docs
    }

    pub fn doc(&self, id: &str) -> Result<usize> {
        self.doc_index.get(id).copied().ok_or_else(|| Error::UnknownArtifact(id.to_string()))
    }

    pub fn column(&self, doc: usize) -> &[(usize, f64)] {
        &self.columns[doc]
    }

    /// Dense terms×documents copy.
    pub fn to_dense(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.terms.len(), self.docs.len()));
        for (j, c) in self.columns.iter().enumerate() {
            for &(t, w) in c {
                m[[t, j]] = w;
            }
        }
        m
    }

    pub(crate) fn doc_index(&self) -> &HashMap<String, usize> {
        &self.doc_index
    }
}

fn sparse_dot(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut i, mut j, mut sum) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                sum += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    sum
}

/// Cosine of two TF-IDF columns; 0 when either is the zero vector.
pub fn vsm_score(a: &str, b: &str, matrix: &WeightedMatrix) -> Result<f64> {
    let (ca, cb) = (matrix.column(matrix.doc(a)?), matrix.column(matrix.doc(b)?));
    let na = sparse_dot(ca, ca).sqrt();
    let nb = sparse_dot(cb, cb).sqrt();
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((sparse_dot(ca, cb) / (na * nb)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn docs(spec: &[(&str, &str)]) -> Vec<(String, Vec<String>)> {
        spec.iter()
            .map(|(id, text)| (id.to_string(), text.split_whitespace().map(str::to_string).collect()))
            .collect()
    }

    #[test]
    fn idf_weights() {
        let m = TermDocMatrix::from_documents(&docs(&[("a", "x y y y"), ("b", "x"), ("c", "")])).unwrap();
        let w = tfidf_weight(&m);
        let d = w.to_dense();
        // x: df 2 of 3; y: tf 3, df 1
        assert!((d[[0, 0]] - (1.5f64).ln()).abs() < 1e-15);
        assert!((d[[1, 0]] - 3.0 * 3f64.ln()).abs() < 1e-15);
        assert!(w.column(2).is_empty());

        let two = tfidf_weight(&TermDocMatrix::from_documents(&docs(&[("a", "t t t"), ("b", "u")])).unwrap());
        assert!((two.column(0)[0].1 - 2.07944).abs() < 1e-5);
    }

    #[test]
    fn ubiquitous_terms_vanish() {
        let w = tfidf_weight(&TermDocMatrix::from_documents(&docs(&[("A", "a b"), ("B", "a")])).unwrap());
        assert_eq!(vsm_score("A", "B", &w).unwrap(), 0.0);
        let w = tfidf_weight(&TermDocMatrix::from_documents(&docs(&[("A", "a a"), ("B", "a")])).unwrap());
        assert!(w.column(0).is_empty());
    }

    #[test]
    fn vsm_extremes() {
        let w = tfidf_weight(&TermDocMatrix::from_documents(&docs(&[("A", "p q"), ("B", "q p"), ("C", "r s"), ("D", "z")])).unwrap());
        assert!((vsm_score("A", "B", &w).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(vsm_score("A", "C", &w).unwrap(), 0.0);
        assert!(matches!(vsm_score("A", "nope", &w), Err(Error::UnknownArtifact(_))));
        assert!(matches!(
            TermDocMatrix::from_documents(&docs(&[("A", "p"), ("A", "q")])),
            Err(Error::DuplicateArtifact(_))
        ));
    }

    proptest! {
        #[test]
        fn vsm_symmetric_and_bounded(texts in proptest::collection::vec(proptest::collection::vec(0u8..6, 0..8), 2..6)) {
            let d: Vec<(String, Vec<String>)> = texts
                .iter()
                .enumerate()
                .map(|(i, t)| (format!("d{i}"), t.iter().map(|w| format!("w{w}")).collect()))
                .collect();
            let w = tfidf_weight(&TermDocMatrix::from_documents(&d).unwrap());
            for a in &d {
                for b in &d {
                    let s = vsm_score(&a.0, &b.0, &w).unwrap();
                    prop_assert!((0.0..=1.0).contains(&s));
                    prop_assert_eq!(s, vsm_score(&b.0, &a.0, &w).unwrap());
                }
            }
        }
    }
}
