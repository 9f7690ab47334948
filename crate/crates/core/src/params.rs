//! Uniform access to every trainable tensor of a model, used by the
//! optimizer, gradient clipping, L2 regularization and checkpoints.

use ndarray::{Array1, Array2, ArrayView2, ArrayViewMut2, Axis};

pub trait Tensors {
    /// Named views in a fixed order. Vectors appear as 1×n matrices.
    fn tensors(&self) -> Vec<(String, ArrayView2<'_, f64>)>;

    /// Mutable views, same order as [`Tensors::tensors`].
    fn tensors_mut(&mut self) -> Vec<ArrayViewMut2<'_, f64>>;

    fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }

    fn squared_norm(&self) -> f64 {
        self.tensors()
            .iter()
            .map(|(_, t)| t.iter().map(|v| v * v).sum::<f64>())
            .sum()
    }

    fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_parameters());
        for (_, t) in self.tensors() {
            out.extend(t.iter().copied());
        }
        out
    }

    fn all_finite(&self) -> bool {
        self.tensors().iter().all(|(_, t)| t.iter().all(|v| v.is_finite()))
    }

    fn scale(&mut self, factor: f64) {
        for mut t in self.tensors_mut() {
            t.mapv_inplace(|v| v * factor);
        }
    }

    /// `self += alpha * other`; both must share a layout.
    fn add_scaled<T: Tensors>(&mut self, alpha: f64, other: &T)
    where
        Self: Sized,
    {
        let src = other.tensors();
        for (mut dst, (_, s)) in self.tensors_mut().into_iter().zip(src) {
            dst.scaled_add(alpha, &s);
        }
    }
}

pub(crate) fn matrix_view<'a>(name: String, m: &'a Array2<f64>) -> (String, ArrayView2<'a, f64>) {
    (name, m.view())
}

pub(crate) fn vector_view<'a>(name: String, v: &'a Array1<f64>) -> (String, ArrayView2<'a, f64>) {
    (name, v.view().insert_axis(Axis(0)))
}

pub(crate) fn vector_view_mut(v: &mut Array1<f64>) -> ArrayViewMut2<'_, f64> {
    v.view_mut().insert_axis(Axis(0))
}
