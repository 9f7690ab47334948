use ndarray::Array1;

use super::{CellKind, CellParameters, GateParams};
use crate::error::{Error, Result};
use crate::math::{add_outer, sigmoid_vec, tanh_vec};

// Gate storage order, see `CellKind::gate_names`.
const LSTM_I: usize = 0;
const LSTM_F: usize = 1;
const LSTM_O: usize = 2;
const LSTM_C: usize = 3;
const GRU_R: usize = 0;
const GRU_U: usize = 1;
const GRU_H: usize = 2;

/// Everything one timestep needs for its backward pass.
#[derive(Debug, Clone)]
pub(crate) enum StepCache {
    Rnn {
        x: Array1<f64>,
        h_prev: Array1<f64>,
        h: Array1<f64>,
    },
    Lstm {
        x: Array1<f64>,
        h_prev: Array1<f64>,
        c_prev: Array1<f64>,
        i: Array1<f64>,
        f: Array1<f64>,
        o: Array1<f64>,
        cand: Array1<f64>,
        c: Array1<f64>,
        h: Array1<f64>,
    },
    Gru {
        x: Array1<f64>,
        h_prev: Array1<f64>,
        r: Array1<f64>,
        u: Array1<f64>,
        cand: Array1<f64>,
        h: Array1<f64>,
    },
}

impl StepCache {
    pub(crate) fn h(&self) -> &Array1<f64> {
        match self {
            StepCache::Rnn { h, .. } | StepCache::Lstm { h, .. } | StepCache::Gru { h, .. } => h,
        }
    }

    pub(crate) fn c(&self) -> Option<&Array1<f64>> {
        match self {
            StepCache::Lstm { c, .. } => Some(c),
            _ => None,
        }
    }
}

/// One forward step; `c_prev` is only read by LSTM cells.
pub(crate) fn step_forward(p: &CellParameters, x: Array1<f64>, h_prev: Array1<f64>, c_prev: Option<&Array1<f64>>) -> StepCache {
    let g = &p.gates;
    match p.kind {
        CellKind::Rnn => {
            let h = tanh_vec(&g[0].preactivation(&x, &h_prev));
            StepCache::Rnn { x, h_prev, h }
        }
        CellKind::Lstm => {
            let c_prev = c_prev.cloned().unwrap_or_else(|| Array1::zeros(h_prev.len()));
            let i = sigmoid_vec(&g[LSTM_I].preactivation(&x, &h_prev));
            let f = sigmoid_vec(&g[LSTM_F].preactivation(&x, &h_prev));
            let o = sigmoid_vec(&g[LSTM_O].preactivation(&x, &h_prev));
            let cand = tanh_vec(&g[LSTM_C].preactivation(&x, &h_prev));
            let c = &i * &cand + &f * &c_prev;
            let h = &o * &tanh_vec(&c);
            StepCache::Lstm { x, h_prev, c_prev, i, f, o, cand, c, h }
        }
        CellKind::Gru => {
            let r = sigmoid_vec(&g[GRU_R].preactivation(&x, &h_prev));
            let u = sigmoid_vec(&g[GRU_U].preactivation(&x, &h_prev));
            let cand = tanh_vec(&g[GRU_H].preactivation(&x, &(&r * &h_prev)));
            let h = (1.0 - &u) * &h_prev + &u * &cand;
            StepCache::Gru { x, h_prev, r, u, cand, h }
        }
        CellKind::AveVect => unreachable!("AveVect has no cell"),
    }
}

/// Accumulates gate gradients for pre-activation gradient `da`, adding the
/// input gradient into `dx` and returning the gradient w.r.t. `h_in`.
fn gate_backward(gate: &GateParams, grad: &mut GateParams, x: &Array1<f64>, h_in: &Array1<f64>, da: &Array1<f64>, dx: &mut Array1<f64>) -> Array1<f64> {
    add_outer(&mut grad.w, x.view(), da.view());
    add_outer(&mut grad.u, h_in.view(), da.view());
    grad.b += da;
    *dx += &gate.w.dot(da);
    gate.u.dot(da)
}

/// Backward through one step given the gradients flowing into `h` (and `c`
/// for LSTM). Returns (dx, dh_prev, dc_prev).
pub(crate) fn step_backward(
    p: &CellParameters,
    grads: &mut CellParameters,
    cache: &StepCache,
    dh: &Array1<f64>,
    dc: Option<&Array1<f64>>,
) -> (Array1<f64>, Array1<f64>, Option<Array1<f64>>) {
    let g = &p.gates;
    let gg = &mut grads.gates;
    match cache {
        StepCache::Rnn { x, h_prev, h } => {
            let mut dx = Array1::zeros(x.len());
            let da = dh * &(1.0 - h * h);
            let dh_prev = gate_backward(&g[0], &mut gg[0], x, h_prev, &da, &mut dx);
            (dx, dh_prev, None)
        }
        StepCache::Lstm { x, h_prev, c_prev, i, f, o, cand, c, .. } => {
            let mut dx = Array1::zeros(x.len());
            let tc = tanh_vec(c);
            let d_o = dh * &tc;
            let mut dcell = dh * o * &(1.0 - &tc * &tc);
            if let Some(dc) = dc {
                dcell += dc;
            }
            let di = &dcell * cand;
            let dcand = &dcell * i;
            let df = &dcell * c_prev;
            let dc_prev = &dcell * f;

            let da_i = di * i * &(1.0 - i);
            let da_f = df * f * &(1.0 - f);
            let da_o = d_o * o * &(1.0 - o);
            let da_c = dcand * &(1.0 - cand * cand);
            let mut dh_prev = gate_backward(&g[LSTM_I], &mut gg[LSTM_I], x, h_prev, &da_i, &mut dx);
            dh_prev += &gate_backward(&g[LSTM_F], &mut gg[LSTM_F], x, h_prev, &da_f, &mut dx);
            dh_prev += &gate_backward(&g[LSTM_O], &mut gg[LSTM_O], x, h_prev, &da_o, &mut dx);
            dh_prev += &gate_backward(&g[LSTM_C], &mut gg[LSTM_C], x, h_prev, &da_c, &mut dx);
            (dx, dh_prev, Some(dc_prev))
        }
        StepCache::Gru { x, h_prev, r, u, cand, .. } => {
            let mut dx = Array1::zeros(x.len());
            let du = dh * &(cand - h_prev);
            let dcand = dh * u;
            let mut dh_prev = dh * &(1.0 - u);

            let da_h = dcand * &(1.0 - cand * cand);
            let rh = r * h_prev;
            let drh = gate_backward(&g[GRU_H], &mut gg[GRU_H], x, &rh, &da_h, &mut dx);
            let dr = &drh * h_prev;
            dh_prev += &(&drh * r);

            let da_u = du * u * &(1.0 - u);
            let da_r = dr * r * &(1.0 - r);
            dh_prev += &gate_backward(&g[GRU_U], &mut gg[GRU_U], x, h_prev, &da_u, &mut dx);
            dh_prev += &gate_backward(&g[GRU_R], &mut gg[GRU_R], x, h_prev, &da_r, &mut dx);
            (dx, dh_prev, None)
        }
    }
}

fn expect_kind(p: &CellParameters, kind: CellKind) -> Result<()> {
    if p.kind != kind {
        return Err(Error::Shape(format!("expected {kind} parameters, got {}", p.kind)));
    }
    Ok(())
}

/// `h_t = tanh(x·W + h_prev·U + b)`.
pub fn rnn_step(params: &CellParameters, x: &Array1<f64>, h_prev: &Array1<f64>) -> Result<Array1<f64>> {
    expect_kind(params, CellKind::Rnn)?;
    params.check(x.len(), h_prev.len())?;
    Ok(step_forward(params, x.clone(), h_prev.clone(), None).h().clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmStep {
    pub h: Array1<f64>,
    pub c: Array1<f64>,
    pub input: Array1<f64>,
    pub forget: Array1<f64>,
    pub output: Array1<f64>,
    pub candidate: Array1<f64>,
}

pub fn lstm_step(params: &CellParameters, x: &Array1<f64>, h_prev: &Array1<f64>, c_prev: &Array1<f64>) -> Result<LstmStep> {
    expect_kind(params, CellKind::Lstm)?;
    params.check(x.len(), h_prev.len())?;
    if c_prev.len() != h_prev.len() {
        return Err(Error::Shape(format!("cell state width {}, expected {}", c_prev.len(), h_prev.len())));
    }
    match step_forward(params, x.clone(), h_prev.clone(), Some(c_prev)) {
        StepCache::Lstm { i, f, o, cand, c, h, .. } => Ok(LstmStep {
            h,
            c,
            input: i,
            forget: f,
            output: o,
            candidate: cand,
        }),
        _ => unreachable!(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GruStep {
    pub h: Array1<f64>,
    pub reset: Array1<f64>,
    pub update: Array1<f64>,
    pub candidate: Array1<f64>,
}

pub fn gru_step(params: &CellParameters, x: &Array1<f64>, h_prev: &Array1<f64>) -> Result<GruStep> {
    expect_kind(params, CellKind::Gru)?;
    params.check(x.len(), h_prev.len())?;
    match step_forward(params, x.clone(), h_prev.clone(), None) {
        StepCache::Gru { r, u, cand, h, .. } => Ok(GruStep {
            h,
            reset: r,
            update: u,
            candidate: cand,
        }),
        _ => unreachable!(),
    }
}
