use ndarray::Array2;

use crate::error::{Error, Result};
use crate::params::Tensors;

/// Linear decay from `initial` to `floor` over `horizon` epochs, constant
/// afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrSchedule {
    pub initial: f64,
    pub horizon: usize,
    pub floor: f64,
}

impl LrSchedule {
    pub const DEFAULT_HORIZON: usize = 500;

    /// Horizon 500, floor `initial / 100`.
    pub fn new(initial: f64) -> Self {
        LrSchedule {
            initial,
            horizon: Self::DEFAULT_HORIZON,
            floor: initial / 100.0,
        }
    }

    pub fn lr_at(&self, epoch: usize) -> f64 {
        if epoch >= self.horizon {
            return self.floor;
        }
        let alpha = epoch as f64 / self.horizon as f64;
        (1.0 - alpha) * self.initial + alpha * self.floor
    }
}

/// Rescales `g` to global norm `gc` when it is longer.
pub fn clip_gradient(g: &[f64], gc: f64) -> Result<Vec<f64>> {
    if !(gc > 0.0) {
        return Err(Error::InvalidArgument(format!("clip value must be positive, got {gc}")));
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::GradientOverflow);
    }
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= gc {
        return Ok(g.to_vec());
    }
    let f = gc / norm;
    Ok(g.iter().map(|v| v * f).collect())
}

/// In-place global-norm clipping over every tensor; returns the norm
/// before clipping.
pub fn clip_tensors<T: Tensors>(grads: &mut T, gc: f64) -> Result<f64> {
    if !(gc > 0.0) {
        return Err(Error::InvalidArgument(format!("clip value must be positive, got {gc}")));
    }
    if !grads.all_finite() {
        return Err(Error::GradientOverflow);
    }
    let norm = grads.squared_norm().sqrt();
    if !norm.is_finite() {
        return Err(Error::GradientOverflow);
    }
    if norm > gc {
        grads.scale(gc / norm);
    }
    Ok(norm)
}

/// RMSprop with per-parameter running mean of squared gradients.
#[derive(Debug, Clone)]
pub struct Rmsprop {
    pub rho: f64,
    pub eps: f64,
    state: Vec<Array2<f64>>,
}

impl Rmsprop {
    pub const RHO: f64 = 0.9;
    pub const EPS: f64 = 1e-8;

    pub fn new<T: Tensors>(params: &T) -> Self {
        Self::with_constants(params, Self::RHO, Self::EPS)
    }

    pub fn with_constants<T: Tensors>(params: &T, rho: f64, eps: f64) -> Self {
        let state = params.tensors().iter().map(|(_, t)| Array2::zeros(t.raw_dim())).collect();
        Rmsprop { rho, eps, state }
    }

    pub fn state(&self) -> &[Array2<f64>] {
        &self.state
    }

    /// One update. Parameters and state are left untouched when any new
    /// value would be non-finite.
    pub fn step<P: Tensors, G: Tensors>(&mut self, params: &mut P, grads: &G, rate: f64) -> Result<()> {
        let g = grads.tensors();
        if g.len() != self.state.len() {
            return Err(Error::Shape(format!("{} gradient tensors for {} parameters", g.len(), self.state.len())));
        }
        let mut new_state = Vec::with_capacity(self.state.len());
        let mut deltas = Vec::with_capacity(self.state.len());
        for ((_, gt), s) in g.iter().zip(&self.state) {
            if gt.shape() != s.shape() {
                return Err(Error::Shape(format!("gradient {:?} vs state {:?}", gt.shape(), s.shape())));
            }
            let mut ns = s.clone();
            ns.zip_mut_with(gt, |s, &g| *s = self.rho * *s + (1.0 - self.rho) * g * g);
            let mut d = gt.to_owned();
            d.zip_mut_with(&ns, |g, &s| *g = -rate * *g / (s.sqrt() + self.eps));
            new_state.push(ns);
            deltas.push(d);
        }
        let ok = params
            .tensors()
            .iter()
            .zip(&deltas)
            .all(|((_, p), d)| p.iter().zip(d).all(|(a, b)| (a + b).is_finite()));
        if !ok || new_state.iter().any(|s| s.iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFiniteUpdate);
        }
        for (mut p, d) in params.tensors_mut().into_iter().zip(&deltas) {
            p += d;
        }
        self.state = new_state;
        Ok(())
    }
}
