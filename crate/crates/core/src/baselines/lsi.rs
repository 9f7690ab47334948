use std::collections::HashMap;

use ndarray::{Array1, Array2};

use super::svd::{cosine, truncated_svd_dense};
use super::WeightedMatrix;
use crate::error::{Error, Result};

/// Share of `min(terms, documents)` kept by the default LSI rank.
pub const DEFAULT_RANK_FRACTION: f64 = 0.75;

/// `⌈fraction · min(terms, docs)⌉`, at least 1.
pub fn default_rank(terms: usize, docs: usize, fraction: f64) -> usize {
    ((fraction * terms.min(docs) as f64).ceil() as usize).clamp(1, terms.min(docs).max(1))
}

const ZERO_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LsiModel {
    pub rank: usize,
    /// terms×k, orthonormal columns.
    pub term_vectors: Array2<f64>,
    pub singular_values: Array1<f64>,
    /// k×documents, Σ-scaled.
    pub doc_coordinates: Array2<f64>,
    doc_index: HashMap<String, usize>,
}

/// Rank-k LSI model of a weighted term×document matrix.
pub fn truncated_svd(matrix: &WeightedMatrix, k: usize) -> Result<LsiModel> {
    let svd = truncated_svd_dense(&matrix.to_dense(), k)?;
    let doc_coordinates = (&svd.v * &svd.sigma).t().to_owned();
    Ok(LsiModel {
        rank: k,
        term_vectors: svd.u,
        singular_values: svd.sigma,
        doc_coordinates,
        doc_index: matrix.doc_index().clone(),
    })
}

impl LsiModel {
    pub fn doc(&self, id: &str) -> Result<usize> {
        self.doc_index.get(id).copied().ok_or_else(|| Error::UnknownArtifact(id.to_string()))
    }
}

/// Cosine between Σ-scaled document coordinates.
pub fn lsi_score(a: &str, b: &str, model: &LsiModel) -> Result<f64> {
    let (i, j) = (model.doc(a)?, model.doc(b)?);
    let (ca, cb) = (model.doc_coordinates.column(i), model.doc_coordinates.column(j));
    // Documents that project to zero come back as rounding noise.
    let floor = ZERO_FLOOR * model.singular_values.first().copied().unwrap_or(0.0);
    if ca.dot(&ca).sqrt() <= floor || cb.dot(&cb).sqrt() <= floor {
        return Ok(0.0);
    }
    Ok(cosine(ca, cb))
}
