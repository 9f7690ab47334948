use ndarray::{Array1, Array2, ArrayView1};

/// Logistic function, evaluated so that neither branch overflows.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn sigmoid_vec(z: &Array1<f64>) -> Array1<f64> {
    z.mapv(sigmoid)
}

pub fn tanh_vec(z: &Array1<f64>) -> Array1<f64> {
    z.mapv(f64::tanh)
}

/// Softmax with max subtraction.
pub fn softmax(z: ArrayView1<f64>) -> Array1<f64> {
    let max = z.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let e = z.mapv(|v| (v - max).exp());
    let s = e.sum();
    e / s
}

/// `acc += a ⊗ b` (a as column, b as row).
pub fn add_outer(acc: &mut Array2<f64>, a: ArrayView1<f64>, b: ArrayView1<f64>) {
    for (mut row, &ai) in acc.rows_mut().into_iter().zip(a.iter()) {
        if ai == 0.0 {
            continue;
        }
        row.scaled_add(ai, &b);
    }
}
