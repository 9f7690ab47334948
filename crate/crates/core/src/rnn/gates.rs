use std::fmt::Write as _;

use ndarray::Array1;

use super::cell::StepCache;
use super::{encode_with_state, CellKind, CellParameters, EncoderConfig, EncoderParams};
use crate::error::{Error, Result};

/// Gate activations for one (step, dimension) cell of a trace. Steps are
/// 1-based: step t is the state after reading word t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateRow {
    Gru {
        step: usize,
        dim: usize,
        reset: f64,
        update: f64,
        output: f64,
    },
    Lstm {
        step: usize,
        dim: usize,
        input: f64,
        forget: f64,
        output: f64,
        hidden: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateTrace {
    pub kind: CellKind,
    pub steps: usize,
    pub dims: Vec<usize>,
    /// Step-major, then in the order of `dims`.
    pub rows: Vec<GateRow>,
}

impl GateTrace {
    fn from_steps(kind: CellKind, steps: &[StepCache], dims: &[usize]) -> Self {
        let mut rows = Vec::with_capacity(steps.len() * dims.len());
        for (t, s) in steps.iter().enumerate() {
            for &d in dims {
                rows.push(match s {
                    StepCache::Gru { r, u, h, .. } => GateRow::Gru {
                        step: t + 1,
                        dim: d,
                        reset: r[d],
                        update: u[d],
                        output: h[d],
                    },
                    StepCache::Lstm { i, f, o, h, .. } => GateRow::Lstm {
                        step: t + 1,
                        dim: d,
                        input: i[d],
                        forget: f[d],
                        output: o[d],
                        hidden: h[d],
                    },
                    StepCache::Rnn { .. } => unreachable!("checked by caller"),
                });
            }
        }
        GateTrace {
            kind,
            steps: steps.len(),
            dims: dims.to_vec(),
            rows,
        }
    }

    /// CSV with one row per (step, dim). `tokens[t-1]` labels step t.
    pub fn to_csv(&self, tokens: &[String]) -> String {
        let mut out = String::new();
        out.push_str(match self.kind {
            CellKind::Lstm => "step,token,dim,input,forget,output,hidden\n",
            _ => "step,token,dim,reset,update,output\n",
        });
        let tok = |step: usize| tokens.get(step - 1).map_or("", String::as_str);
        for row in &self.rows {
            match *row {
                GateRow::Gru { step, dim, reset, update, output } => {
                    let _ = writeln!(out, "{step},{},{dim},{reset},{update},{output}", tok(step));
                }
                GateRow::Lstm { step, dim, input, forget, output, hidden } => {
                    let _ = writeln!(out, "{step},{},{dim},{input},{forget},{output},{hidden}", tok(step));
                }
            }
        }
        out
    }
}

fn check_gated(kind: CellKind, hidden: usize, dims: &[usize]) -> Result<()> {
    if !matches!(kind, CellKind::Gru | CellKind::Lstm) {
        return Err(Error::InvalidArgument(format!("gate tracing needs a GRU or LSTM cell, got {kind}")));
    }
    if let Some(&bad) = dims.iter().find(|&&d| d >= hidden) {
        return Err(Error::InvalidArgument(format!("dimension {bad} out of range for hidden size {hidden}")));
    }
    Ok(())
}

/// Runs one gated cell over `inputs` and records the requested dimensions.
pub fn trace_gates(params: &CellParameters, inputs: &[Array1<f64>], dims: &[usize]) -> Result<GateTrace> {
    check_gated(params.kind, params.hidden_dim(), dims)?;
    let cfg = EncoderConfig::new(params.kind, false, 1, params.hidden_dim());
    let enc = EncoderParams {
        forward: vec![params.clone()],
        backward: Vec::new(),
    };
    trace_layer_gates(&cfg, &enc, inputs, 0, dims)
}

/// Traces forward-direction layer `layer` of a full encoder; values are the
/// very ones produced while encoding.
pub fn trace_layer_gates(cfg: &EncoderConfig, params: &EncoderParams, inputs: &[Array1<f64>], layer: usize, dims: &[usize]) -> Result<GateTrace> {
    check_gated(cfg.cell, cfg.hidden, dims)?;
    if layer >= cfg.layers {
        return Err(Error::InvalidArgument(format!("layer {layer} out of range")));
    }
    let state = encode_with_state(cfg, params, inputs)?;
    let steps = state.forward_cache(layer).ok_or(Error::MissingCache)?;
    Ok(GateTrace::from_steps(cfg.cell, steps, dims))
}
