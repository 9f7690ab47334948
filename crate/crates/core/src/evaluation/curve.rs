use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Every distinct score plus -∞ and +∞, ascending.
pub fn exact_thresholds(scores: &[f64]) -> Vec<f64> {
    let mut t: Vec<f64> = scores.iter().copied().filter(|s| !s.is_nan()).collect();
    t.sort_by(f64::total_cmp);
    t.dedup();
    t.insert(0, f64::NEG_INFINITY);
    t.push(f64::INFINITY);
    t
}

/// Pooled precision and recall when predicting a link iff score ≥ θ.
/// Precision is 1 when nothing is predicted.
pub fn pr_curve(scored: &[(f64, bool)], thresholds: &[f64]) -> Result<Vec<PrPoint>> {
    let gold = scored.iter().filter(|s| s.1).count();
    if gold == 0 {
        return Err(Error::EmptyGold);
    }
    if thresholds.windows(2).any(|w| w[0] > w[1]) || thresholds.iter().any(|t| t.is_nan()) {
        return Err(Error::InvalidArgument("thresholds must be sorted ascending".into()));
    }
    let mut sorted: Vec<(f64, bool)> = scored.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    // tp[i], fp[i]: counts among the i highest scores
    let mut tp = vec![0usize; sorted.len() + 1];
    let mut fp = vec![0usize; sorted.len() + 1];
    for (i, &(_, g)) in sorted.iter().enumerate() {
        tp[i + 1] = tp[i] + g as usize;
        fp[i + 1] = fp[i] + !g as usize;
    }
    Ok(thresholds
        .iter()
        .map(|&th| {
            let n = sorted.partition_point(|s| s.0 >= th);
            let predicted = tp[n] + fp[n];
            PrPoint {
                threshold: th,
                precision: if predicted == 0 { 1.0 } else { tp[n] as f64 / predicted as f64 },
                recall: tp[n] as f64 / gold as f64,
            }
        })
        .collect())
}

pub fn pr_curve_exact(scored: &[(f64, bool)]) -> Result<Vec<PrPoint>> {
    let scores: Vec<f64> = scored.iter().map(|s| s.0).collect();
    pr_curve(scored, &exact_thresholds(&scores))
}
