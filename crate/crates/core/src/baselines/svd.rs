use ndarray::{s, Array1, Array2, ArrayView1, Axis};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::{seeded, streams};

/// Stop when no singular value moves by more than this between sweeps.
pub const SVD_TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 10_000;
const OVERSAMPLE: usize = 5;

/// Rank-k factorization `M ≈ U diag(σ) Vᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    /// rows×k, orthonormal columns.
    pub u: Array2<f64>,
    /// Non-increasing, non-negative.
    pub sigma: Array1<f64>,
    /// cols×k, orthonormal columns.
    pub v: Array2<f64>,
    pub iterations: usize,
}

impl TruncatedSvd {
    pub fn reconstruct(&self) -> Array2<f64> {
        (&self.u * &self.sigma).dot(&self.v.t())
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order with eigenvectors as columns.
pub fn symmetric_eigen(a: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[[i, j]].powi(2)).sum();
        if off.sqrt() <= 1e-15 * scale || scale == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[[k, p]], a[[k, q]]);
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[[p, k]], a[[q, k]]);
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[[k, p]], v[[k, q]]);
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[j, j]].total_cmp(&a[[i, i]]));
    let values = order.iter().map(|&i| a[[i, i]]).collect();
    let vectors = v.select(Axis(1), &order);
    (values, vectors)
}

/// Modified Gram–Schmidt on the columns of `q`. Columns that collapse are
/// replaced by unit vectors orthogonal to everything before them.
fn orthonormalize(q: &mut Array2<f64>) {
    let (rows, cols) = q.dim();
    let mut next_basis = 0;
    for j in 0..cols {
        let mut attempt = 0;
        loop {
            for i in 0..j {
                let d = q.column(i).dot(&q.column(j));
                let qi = q.column(i).to_owned();
                q.column_mut(j).scaled_add(-d, &qi);
            }
            // second pass for stability
            for i in 0..j {
                let d = q.column(i).dot(&q.column(j));
                let qi = q.column(i).to_owned();
                q.column_mut(j).scaled_add(-d, &qi);
            }
            let norm = q.column(j).dot(&q.column(j)).sqrt();
            if norm > 1e-10 || attempt > rows {
                q.column_mut(j).mapv_inplace(|x| x / norm);
                break;
            }
            let mut e = Array1::zeros(rows);
            e[next_basis % rows] = 1.0;
            next_basis += 1;
            attempt += 1;
            q.column_mut(j).assign(&e);
        }
    }
}

/// Maps orthonormal vectors on one side through `m` to the other side:
/// `σ_i = ‖m x_i‖`, `y_i = m x_i / σ_i`, completing the basis where σ
/// vanishes.
fn other_side(m: &Array2<f64>, x: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let mut y = m.dot(x);
    let sigma: Array1<f64> = y.axis_iter(Axis(1)).map(|c| c.dot(&c).sqrt()).collect();
    let tiny = 1e-13 * sigma.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for (j, &s) in sigma.iter().enumerate() {
        if s > tiny {
            y.column_mut(j).mapv_inplace(|v| v / s);
        } else {
            y.column_mut(j).fill(0.0);
        }
    }
    orthonormalize(&mut y);
    (sigma, y)
}

/// Rank-k SVD by orthogonal subspace iteration on the smaller Gram matrix
/// with a Rayleigh–Ritz step per sweep. Deterministic.
pub fn truncated_svd_dense(m: &Array2<f64>, k: usize) -> Result<TruncatedSvd> {
    let (rows, cols) = m.dim();
    if k == 0 || k > rows.min(cols) {
        return Err(Error::InvalidArgument(format!("rank {k} outside 1..={}", rows.min(cols))));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let right = cols <= rows;
    let gram = if right { m.t().dot(m) } else { m.dot(&m.t()) };
    let p = gram.nrows();
    let block = p.min(k + k.max(OVERSAMPLE));

    let mut rng = seeded(0, streams::SVD);
    let mut q = Array2::from_shape_fn((p, block), |_| rng.random_range(-1.0..1.0));
    orthonormalize(&mut q);

    let mut previous: Option<Array1<f64>> = None;
    let mut iterations = 0;
    let basis = loop {
        iterations += 1;
        let mut z = gram.dot(&q);
        orthonormalize(&mut z);
        let t = z.t().dot(&gram).dot(&z);
        let (values, vectors) = symmetric_eigen(&t);
        q = z.dot(&vectors);
        let sigma: Array1<f64> = values.slice(s![..k]).mapv(|l| l.max(0.0).sqrt());
        let done = block == p
            || previous
                .as_ref()
                .is_some_and(|prev| prev.iter().zip(&sigma).all(|(a, b)| (a - b).abs() <= SVD_TOLERANCE * sigma[0].max(1.0)));
        if done || iterations >= MAX_ITERATIONS {
            break q.slice(s![.., ..k]).to_owned();
        }
        previous = Some(sigma);
    };

    let (u, sigma, v) = if right {
        let (sigma, u) = other_side(m, &basis);
        (u, sigma, basis)
    } else {
        let (sigma, v) = other_side(&m.t().to_owned(), &basis);
        (basis, sigma, v)
    };
    // Ritz order can differ from the order of ‖M x‖ by rounding.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    Ok(TruncatedSvd {
        u: u.select(Axis(1), &order),
        sigma: order.iter().map(|&i| sigma[i]).collect(),
        v: v.select(Axis(1), &order),
        iterations,
    })
}

pub(crate) fn cosine(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let (na, nb) = (a.dot(&a).sqrt(), b.dot(&b).sqrt());
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (a.dot(&b) / (na * nb)).clamp(-1.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn frob(a: &Array2<f64>) -> f64 {
        a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn diagonal() {
        let m = array![[3.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]];
        let r = truncated_svd_dense(&m, 2).unwrap();
        assert!((r.sigma[0] - 3.0).abs() < 1e-12 && (r.sigma[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_exact() {
        let m = array![[1.0], [2.0], [3.0]].dot(&array![[4.0, 5.0]]);
        let r = truncated_svd_dense(&m, 1).unwrap();
        assert!(frob(&(&m - &r.reconstruct())) < 1e-12);
        assert!(matches!(truncated_svd_dense(&m, 3), Err(Error::InvalidArgument(_))));
        assert!(matches!(truncated_svd_dense(&m, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn wide_and_rank_deficient() {
        let m = array![[1.0, 2.0, 3.0, 4.0], [2.0, 4.0, 6.0, 8.0]];
        let r = truncated_svd_dense(&m, 2).unwrap();
        assert!(r.sigma[1].abs() < 1e-8);
        let utu = r.u.t().dot(&r.u);
        assert!(frob(&(utu - Array2::<f64>::eye(2))) < 1e-8);
        assert!(frob(&(&m - &r.reconstruct())) < 1e-12);
    }

    #[test]
    fn iterates_when_block_is_partial() {
        let mut rng = seeded(9, 0);
        let m = Array2::from_shape_fn((40, 30), |_| rng.random_range(-1.0..1.0));
        let r = truncated_svd_dense(&m, 3).unwrap();
        assert!(r.iterations > 1);
        let full = truncated_svd_dense(&m, 30).unwrap();
        for i in 0..3 {
            assert!((r.sigma[i] - full.sigma[i]).abs() < 1e-8);
        }
        assert!(frob(&(&m - &full.reconstruct())) < 1e-9);
    }

    #[test]
    fn jacobi_eigen_reconstructs() {
        let a = array![[4.0, 1.0, 2.0], [1.0, 3.0, 0.5], [2.0, 0.5, 1.0]];
        let (l, v) = symmetric_eigen(&a);
        let back = (&v * &l).dot(&v.t());
        assert!(frob(&(back - &a)) < 1e-12);
        assert!(l[0] >= l[1] && l[1] >= l[2]);
    }
}
