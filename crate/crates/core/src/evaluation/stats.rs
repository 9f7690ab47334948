use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Ranks starting at 1; tied values share the mean of their ranks.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Sizes of the tie groups among `values`.
fn tie_sizes(values: &[f64]) -> Vec<usize> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let j = v[i..].iter().take_while(|&&x| x == v[i]).count();
        out.push(j);
        i += j;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KruskalWallis {
    pub h: f64,
    pub df: usize,
    pub p_value: f64,
    /// Every value was identical, so H is 0 by convention.
    pub tie_degenerate: bool,
}

/// Tie-corrected Kruskal–Wallis H with a chi-squared p-value.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<KruskalWallis> {
    if groups.len() < 2 || groups.iter().any(|g| g.is_empty()) {
        return Err(Error::InvalidArgument("Kruskal-Wallis needs at least two non-empty groups".into()));
    }
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    if all.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("NaN in sample".into()));
    }
    let n = all.len() as f64;
    let df = groups.len() - 1;
    let ties: f64 = tie_sizes(&all).iter().map(|&t| (t * t * t - t) as f64).sum();
    let correction = 1.0 - ties / (n * n * n - n);
    if correction <= 0.0 {
        return Ok(KruskalWallis {
            h: 0.0,
            df,
            p_value: 1.0,
            tie_degenerate: true,
        });
    }
    let ranks = midranks(&all);
    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        sum += r * r / g.len() as f64;
        offset += g.len();
    }
    let h = ((12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction).max(0.0);
    let p_value = ChiSquared::new(df as f64).map(|c| c.sf(h)).unwrap_or(1.0);
    Ok(KruskalWallis {
        h,
        df,
        p_value,
        tie_degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// Σ over pairs of [a > b] + ½[a = b].
    pub u: f64,
    /// Two-sided.
    pub p_value: f64,
    /// The p-value comes from the exact permutation distribution.
    pub exact: bool,
}

/// Sample size from which both groups use the normal approximation.
const NORMAL_MIN: usize = 8;

pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("Mann-Whitney needs two non-empty samples".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("NaN in sample".into()));
    }
    let mut u = 0.0;
    for &x in a {
        for &y in b {
            u += if x > y {
                1.0
            } else if x == y {
                0.5
            } else {
                0.0
            };
        }
    }
    let (n1, n2) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    if n1 >= NORMAL_MIN && n2 >= NORMAL_MIN {
        let n = (n1 + n2) as f64;
        let mu = (n1 * n2) as f64 / 2.0;
        let ties: f64 = tie_sizes(&pooled).iter().map(|&t| (t * t * t - t) as f64).sum();
        let var = (n1 * n2) as f64 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
        let p_value = if var <= 0.0 {
            1.0
        } else {
            let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
            (2.0 * Normal::standard().sf(z)).min(1.0)
        };
        return Ok(MannWhitney { u, p_value, exact: false });
    }
    Ok(MannWhitney {
        u,
        p_value: exact_p(&pooled, n1, u),
        exact: true,
    })
}

/// Two-sided exact p-value: the share of all ways to choose the first
/// sample's positions among the pooled midranks whose U is at least as far
/// from its mean as the observed one.
fn exact_p(pooled: &[f64], n1: usize, u_obs: f64) -> f64 {
    let n = pooled.len();
    let n2 = n - n1;
    // Select the smaller group; its U distribution is the mirror image.
    let (k, u_sel) = if n1 <= n2 { (n1, u_obs) } else { (n2, (n1 * n2) as f64 - u_obs) };
    let doubled: Vec<usize> = midranks(pooled).iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = {
        let mut d = doubled.clone();
        d.sort_unstable_by(|x, y| y.cmp(x));
        d[..k].iter().sum()
    };
    // ways[j][s]: subsets of size j with doubled rank sum s
    let mut ways = vec![vec![0.0f64; max_sum + 1]; k + 1];
    ways[0][0] = 1.0;
    for &r in &doubled {
        for j in (1..=k).rev() {
            let (lo, hi) = ways.split_at_mut(j);
            for s in (r..=max_sum).rev() {
                hi[0][s] += lo[j - 1][s - r];
            }
        }
    }
    let base = (k * (k + 1)) as f64;
    let mu = (n1 * n2) as f64 / 2.0;
    let dev = (u_sel - mu).abs() - 1e-9;
    let total: f64 = ways[k].iter().sum();
    let tail: f64 = ways[k]
        .iter()
        .enumerate()
        .filter(|&(s, &w)| w > 0.0 && ((s as f64 - base) / 2.0 - mu).abs() >= dev)
        .map(|(_, &w)| w)
        .sum();
    (tail / total).min(1.0)
}

/// `min(1, p·m)` for each p.
pub fn bonferroni(p_values: &[f64], m: usize) -> Vec<f64> {
    p_values.iter().map(|p| (p * m.max(1) as f64).min(1.0)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseTest {
    pub a: String,
    pub b: String,
    pub test: MannWhitney,
    pub p_adjusted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub kruskal_wallis: KruskalWallis,
    pub pairwise: Vec<PairwiseTest>,
}

/// Kruskal–Wallis over all methods, then Mann–Whitney U for every pair of
/// methods with Bonferroni adjustment over the number of pairs.
pub fn compare_methods(groups: &[(String, Vec<f64>)]) -> Result<StatsReport> {
    let samples: Vec<Vec<f64>> = groups.iter().map(|g| g.1.clone()).collect();
    let kruskal_wallis = kruskal_wallis(&samples)?;
    let mut raw = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            raw.push((i, j, mann_whitney_u(&groups[i].1, &groups[j].1)?));
        }
    }
    let adjusted = bonferroni(&raw.iter().map(|r| r.2.p_value).collect::<Vec<_>>(), raw.len());
    let pairwise = raw
        .into_iter()
        .zip(adjusted)
        .map(|((i, j, test), p_adjusted)| PairwiseTest {
            a: groups[i].0.clone(),
            b: groups[j].0.clone(),
            test,
            p_adjusted,
        })
        .collect();
    Ok(StatsReport { kruskal_wallis, pairwise })
}
