//! Recurrent sequence encoders: standard RNN, LSTM and GRU cells, their
//! bidirectional and stacked arrangements, the averaged-vector baseline,
//! full backpropagation through time, and gate tracing.

mod cell;
mod encoder;
mod gates;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView2, ArrayViewMut2};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{matrix_view, vector_view, vector_view_mut, Tensors};

pub use cell::{gru_step, lstm_step, rnn_step, GruStep, LstmStep};
pub use encoder::{backprop_sequence, encode_sequence, encode_with_state, EncoderGradients, SequenceState};
pub use gates::{trace_gates, trace_layer_gates, GateRow, GateTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Rnn,
    Lstm,
    Gru,
    #[serde(rename = "avevect")]
    AveVect,
}

impl CellKind {
    /// Gate labels in storage order.
    pub fn gate_names(self) -> &'static [&'static str] {
        match self {
            CellKind::Rnn => &["h"],
            CellKind::Lstm => &["i", "f", "o", "c"],
            CellKind::Gru => &["r", "u", "h"],
            CellKind::AveVect => &[],
        }
    }

    pub fn is_recurrent(self) -> bool {
        self != CellKind::AveVect
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellKind::Rnn => "RNN",
            CellKind::Lstm => "LSTM",
            CellKind::Gru => "GRU",
            CellKind::AveVect => "AveVect",
        })
    }
}

impl FromStr for CellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rnn" => Ok(CellKind::Rnn),
            "lstm" => Ok(CellKind::Lstm),
            "gru" => Ok(CellKind::Gru),
            "avevect" | "ave" | "average" => Ok(CellKind::AveVect),
            other => Err(Error::InvalidArgument(format!("unknown cell kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub cell: CellKind,
    pub bidirectional: bool,
    pub layers: usize,
    pub hidden: usize,
}

impl EncoderConfig {
    pub fn new(cell: CellKind, bidirectional: bool, layers: usize, hidden: usize) -> Self {
        EncoderConfig {
            cell,
            bidirectional,
            layers,
            hidden,
        }
    }

    /// Width of the semantic vector for inputs of width `input_dim`.
    pub fn output_dim(&self, input_dim: usize) -> usize {
        match self.cell {
            CellKind::AveVect => input_dim,
            _ if self.bidirectional => 2 * self.hidden,
            _ => self.hidden,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cell.is_recurrent() && (self.layers == 0 || self.hidden == 0) {
            return Err(Error::InvalidArgument("layers and hidden must be >= 1".into()));
        }
        Ok(())
    }

    /// Label in the style "BI-GRU".
    pub fn label(&self) -> String {
        if self.bidirectional && self.cell.is_recurrent() {
            format!("BI-{}", self.cell)
        } else {
            self.cell.to_string()
        }
    }
}

/// Initial bias magnitude of the gates that control state retention.
pub const MEMORY_BIAS: f64 = 2.0;

/// Affine parameters of one gate: `x·W + h·U + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateParams {
    /// input × hidden
    pub w: Array2<f64>,
    /// hidden × hidden
    pub u: Array2<f64>,
    pub b: Array1<f64>,
}

impl GateParams {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        GateParams {
            w: Array2::zeros((input, hidden)),
            u: Array2::zeros((hidden, hidden)),
            b: Array1::zeros(hidden),
        }
    }

    pub(crate) fn preactivation(&self, x: &Array1<f64>, h: &Array1<f64>) -> Array1<f64> {
        x.dot(&self.w) + h.dot(&self.u) + &self.b
    }
}

/// All gates of one cell layer.
#[derive(Debug, Clone, PartialEq)]
pub struct CellParameters {
    pub kind: CellKind,
    pub gates: Vec<GateParams>,
}

impl CellParameters {
    pub fn zeros(kind: CellKind, input: usize, hidden: usize) -> Self {
        CellParameters {
            kind,
            gates: kind.gate_names().iter().map(|_| GateParams::zeros(input, hidden)).collect(),
        }
    }

    /// Weights uniform in ±1/√hidden, biases zero.
    /// Weights uniform in ±1/√hidden. Biases start in a slow-integration
    /// regime: GRU update gate at `-MEMORY_BIAS`, LSTM forget gate at
    /// `+MEMORY_BIAS` and input gate at `-MEMORY_BIAS`, so a fresh cell keeps
    /// most of its state at each token. All other biases are zero.
    pub fn random(kind: CellKind, input: usize, hidden: usize, rng: &mut crate::rng::Rng) -> Self {
        let mut p = Self::zeros(kind, input, hidden);
        let a = 1.0 / (hidden as f64).sqrt();
        for g in &mut p.gates {
            g.w.mapv_inplace(|_| rng.random_range(-a..=a));
            g.u.mapv_inplace(|_| rng.random_range(-a..=a));
        }
        match kind {
            CellKind::Lstm => {
                p.gates[0].b.fill(-MEMORY_BIAS);
                p.gates[1].b.fill(MEMORY_BIAS);
            }
            CellKind::Gru => p.gates[1].b.fill(-MEMORY_BIAS),
            _ => {}
        }
        p
    }

    pub fn input_dim(&self) -> usize {
        self.gates.first().map_or(0, |g| g.w.nrows())
    }

    pub fn hidden_dim(&self) -> usize {
        self.gates.first().map_or(0, |g| g.u.nrows())
    }

    pub(crate) fn check(&self, x: usize, h: usize) -> Result<()> {
        if self.gates.len() != self.kind.gate_names().len() {
            return Err(Error::Shape(format!("{} expects {} gates", self.kind, self.kind.gate_names().len())));
        }
        let (d_in, d_r) = (self.input_dim(), self.hidden_dim());
        for g in &self.gates {
            if g.w.dim() != (d_in, d_r) || g.u.dim() != (d_r, d_r) || g.b.len() != d_r {
                return Err(Error::Shape("gate parameters do not conform".into()));
            }
        }
        if x != d_in {
            return Err(Error::Shape(format!("input width {x}, expected {d_in}")));
        }
        if h != d_r {
            return Err(Error::Shape(format!("state width {h}, expected {d_r}")));
        }
        Ok(())
    }

    fn named<'a>(&'a self, prefix: &str, out: &mut Vec<(String, ArrayView2<'a, f64>)>) {
        for (g, name) in self.gates.iter().zip(self.kind.gate_names()) {
            out.push(matrix_view(format!("{prefix}.{name}.W"), &g.w));
            out.push(matrix_view(format!("{prefix}.{name}.U"), &g.u));
            out.push(vector_view(format!("{prefix}.{name}.b"), &g.b));
        }
    }

    fn named_mut<'a>(&'a mut self, out: &mut Vec<ArrayViewMut2<'a, f64>>) {
        for g in &mut self.gates {
            out.push(g.w.view_mut());
            out.push(g.u.view_mut());
            out.push(vector_view_mut(&mut g.b));
        }
    }
}

/// Parameters of a whole encoder. `backward` is empty for unidirectional
/// encoders; both stacks are empty for AveVect.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub forward: Vec<CellParameters>,
    pub backward: Vec<CellParameters>,
}

impl EncoderParams {
    fn build(cfg: &EncoderConfig, input_dim: usize, mut make: impl FnMut(usize) -> CellParameters) -> Self {
        if !cfg.cell.is_recurrent() {
            return EncoderParams {
                forward: Vec::new(),
                backward: Vec::new(),
            };
        }
        let widths = |l: usize| if l == 0 { input_dim } else { cfg.hidden };
        let forward = (0..cfg.layers).map(|l| make(widths(l))).collect();
        let backward = if cfg.bidirectional {
            (0..cfg.layers).map(|l| make(widths(l))).collect()
        } else {
            Vec::new()
        };
        EncoderParams { forward, backward }
    }

    pub fn zeros(cfg: &EncoderConfig, input_dim: usize) -> Self {
        Self::build(cfg, input_dim, |w| CellParameters::zeros(cfg.cell, w, cfg.hidden))
    }

    pub fn random(cfg: &EncoderConfig, input_dim: usize, rng: &mut crate::rng::Rng) -> Self {
        Self::build(cfg, input_dim, |w| CellParameters::random(cfg.cell, w, cfg.hidden, rng))
    }

    pub fn zeros_like(&self) -> Self {
        let z = |c: &CellParameters| CellParameters::zeros(c.kind, c.input_dim(), c.hidden_dim());
        EncoderParams {
            forward: self.forward.iter().map(z).collect(),
            backward: self.backward.iter().map(z).collect(),
        }
    }
}

impl Tensors for EncoderParams {
    fn tensors(&self) -> Vec<(String, ArrayView2<'_, f64>)> {
        let mut out = Vec::new();
        for (l, c) in self.forward.iter().enumerate() {
            c.named(&format!("encoder.fwd.l{l}"), &mut out);
        }
        for (l, c) in self.backward.iter().enumerate() {
            c.named(&format!("encoder.bwd.l{l}"), &mut out);
        }
        out
    }

    fn tensors_mut(&mut self) -> Vec<ArrayViewMut2<'_, f64>> {
        let mut out = Vec::new();
        for c in self.forward.iter_mut().chain(self.backward.iter_mut()) {
            c.named_mut(&mut out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_counts() {
        let cfg = EncoderConfig::new(CellKind::Gru, true, 2, 3);
        let p = EncoderParams::zeros(&cfg, 4);
        // per direction: layer0 3*(4*3+3*3+3)=72, layer1 3*(9+9+3)=63
        assert_eq!(p.num_parameters(), 2 * (72 + 63));
        assert_eq!(cfg.output_dim(4), 6);
        let ave = EncoderConfig::new(CellKind::AveVect, true, 2, 3);
        assert_eq!(EncoderParams::zeros(&ave, 4).num_parameters(), 0);
        assert_eq!(ave.output_dim(4), 4);
    }

    #[test]
    fn initialization_bounds() {
        let biased = [(".l0.f.b", MEMORY_BIAS), (".l0.i.b", -MEMORY_BIAS), (".l0.u.b", -MEMORY_BIAS)];
        for cell in [CellKind::Lstm, CellKind::Gru, CellKind::Rnn] {
            let cfg = EncoderConfig::new(cell, false, 1, 16);
            let mut rng = crate::rng::seeded(1, 1);
            let p = EncoderParams::random(&cfg, 5, &mut rng);
            for (name, t) in p.tensors() {
                if let Some(&(_, bias)) = biased.iter().find(|(suffix, _)| name.ends_with(suffix)) {
                    assert!(t.iter().all(|&v| v == bias), "{name}");
                } else if name.ends_with(".b") {
                    assert!(t.iter().all(|&v| v == 0.0), "{name}");
                } else {
                    assert!(t.iter().all(|&v| v.abs() <= 0.25), "{name}");
                }
            }
        }
    }

    #[test]
    fn parses_cell_names() {
        assert_eq!("GRU".parse::<CellKind>().unwrap(), CellKind::Gru);
        assert_eq!("AveVect".parse::<CellKind>().unwrap(), CellKind::AveVect);
        assert!("cnn".parse::<CellKind>().is_err());
        assert_eq!(EncoderConfig::new(CellKind::Gru, true, 1, 2).label(), "BI-GRU");
    }
}
