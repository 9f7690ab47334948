use ndarray::{concatenate, s, Array1, Axis};

use super::cell::{step_backward, step_forward, StepCache};
use super::{CellKind, CellParameters, EncoderConfig, EncoderParams};
use crate::error::{Error, Result};

type LayerCache = Vec<StepCache>;

/// Forward results of one encoded sequence, plus the per-step caches BPTT
/// needs (unless dropped).
#[derive(Debug, Clone)]
pub struct SequenceState {
    cfg: EncoderConfig,
    len: usize,
    input_dim: usize,
    output: Array1<f64>,
    caches: Option<(Vec<LayerCache>, Vec<LayerCache>)>,
}

impl SequenceState {
    /// The semantic vector.
    pub fn output(&self) -> &Array1<f64> {
        &self.output
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Per-step outputs of forward-direction layer `layer`.
    pub fn forward_hidden(&self, layer: usize) -> Option<Vec<Array1<f64>>> {
        let (fwd, _) = self.caches.as_ref()?;
        fwd.get(layer).map(|steps| steps.iter().map(|c| c.h().clone()).collect())
    }

    /// Per-step outputs of backward-direction layer `layer`, in processing
    /// (reversed) order.
    pub fn backward_hidden(&self, layer: usize) -> Option<Vec<Array1<f64>>> {
        let (_, bwd) = self.caches.as_ref()?;
        bwd.get(layer).map(|steps| steps.iter().map(|c| c.h().clone()).collect())
    }

    pub(crate) fn forward_cache(&self, layer: usize) -> Option<&[StepCache]> {
        self.caches.as_ref()?.0.get(layer).map(Vec::as_slice)
    }

    /// Releases the step caches; BPTT on this state then fails.
    pub fn drop_cache(&mut self) {
        self.caches = None;
    }
}

fn check_params(cfg: &EncoderConfig, params: &EncoderParams, input_dim: usize) -> Result<()> {
    cfg.validate()?;
    if !cfg.cell.is_recurrent() {
        return Ok(());
    }
    let want_bwd = if cfg.bidirectional { cfg.layers } else { 0 };
    if params.forward.len() != cfg.layers || params.backward.len() != want_bwd {
        return Err(Error::Shape("encoder parameters do not match configuration".into()));
    }
    for stack in [&params.forward, &params.backward] {
        for (l, p) in stack.iter().enumerate() {
            let width = if l == 0 { input_dim } else { cfg.hidden };
            if p.kind != cfg.cell {
                return Err(Error::Shape(format!("layer {l} holds {} parameters", p.kind)));
            }
            p.check(width, cfg.hidden)?;
        }
    }
    Ok(())
}

fn run_stack(stack: &[CellParameters], inputs: Vec<Array1<f64>>) -> Vec<LayerCache> {
    let mut layers = Vec::with_capacity(stack.len());
    let mut xs = inputs;
    for p in stack {
        let d = p.hidden_dim();
        let mut h = Array1::zeros(d);
        let mut c: Option<Array1<f64>> = None;
        let mut steps = Vec::with_capacity(xs.len());
        for x in xs {
            let step = step_forward(p, x, h, c.as_ref());
            h = step.h().clone();
            c = step.c().cloned();
            steps.push(step);
        }
        xs = steps.iter().map(|s| s.h().clone()).collect();
        layers.push(steps);
    }
    layers
}

/// BPTT through a stack given the gradient on its final top-layer output.
/// Returns input gradients in processing order.
fn backprop_stack(stack: &[CellParameters], grads: &mut [CellParameters], caches: &[LayerCache], d_last: Array1<f64>) -> Vec<Array1<f64>> {
    let m = caches[0].len();
    let d = stack.last().map_or(0, CellParameters::hidden_dim);
    let mut d_out: Vec<Array1<f64>> = vec![Array1::zeros(d); m];
    d_out[m - 1] = d_last;
    for l in (0..stack.len()).rev() {
        let hidden = stack[l].hidden_dim();
        let mut dh_next = Array1::zeros(hidden);
        let mut dc_next: Option<Array1<f64>> = None;
        let mut dxs = vec![Array1::zeros(0); m];
        for t in (0..m).rev() {
            let dh = &d_out[t] + &dh_next;
            let (dx, dh_prev, dc_prev) = step_backward(&stack[l], &mut grads[l], &caches[l][t], &dh, dc_next.as_ref());
            dxs[t] = dx;
            dh_next = dh_prev;
            dc_next = dc_prev;
        }
        d_out = dxs;
    }
    d_out
}

/// Encodes word vectors and keeps the caches needed for
/// [`backprop_sequence`].
pub fn encode_with_state(cfg: &EncoderConfig, params: &EncoderParams, inputs: &[Array1<f64>]) -> Result<SequenceState> {
    let Some(first) = inputs.first() else {
        return Err(Error::EmptyArtifact);
    };
    let input_dim = first.len();
    if inputs.iter().any(|x| x.len() != input_dim) {
        return Err(Error::Shape("word vectors differ in width".into()));
    }
    check_params(cfg, params, input_dim)?;

    if cfg.cell == CellKind::AveVect {
        let mut mean = Array1::zeros(input_dim);
        for x in inputs {
            mean += x;
        }
        mean /= inputs.len() as f64;
        return Ok(SequenceState {
            cfg: *cfg,
            len: inputs.len(),
            input_dim,
            output: mean,
            caches: Some((Vec::new(), Vec::new())),
        });
    }

    let fwd = run_stack(&params.forward, inputs.to_vec());
    let fwd_last = fwd.last().unwrap()[inputs.len() - 1].h().clone();
    let (bwd, output) = if cfg.bidirectional {
        let bwd = run_stack(&params.backward, inputs.iter().rev().cloned().collect());
        let bwd_last = bwd.last().unwrap()[inputs.len() - 1].h();
        let out = concatenate(Axis(0), &[fwd_last.view(), bwd_last.view()]).expect("1-d concat");
        (bwd, out)
    } else {
        (Vec::new(), fwd_last)
    };
    Ok(SequenceState {
        cfg: *cfg,
        len: inputs.len(),
        input_dim,
        output,
        caches: Some((fwd, bwd)),
    })
}

/// Semantic vector of a sequence: final top-layer state (both directions
/// concatenated when bidirectional), or the mean for AveVect.
pub fn encode_sequence(cfg: &EncoderConfig, params: &EncoderParams, inputs: &[Array1<f64>]) -> Result<Array1<f64>> {
    encode_with_state(cfg, params, inputs).map(|s| s.output)
}

#[derive(Debug, Clone)]
pub struct EncoderGradients {
    pub params: EncoderParams,
    /// Gradient w.r.t. each input word vector, in sequence order.
    pub inputs: Vec<Array1<f64>>,
}

/// Exact reverse-mode gradients of [`encode_sequence`] for upstream
/// gradient `dv`.
pub fn backprop_sequence(cfg: &EncoderConfig, params: &EncoderParams, state: &SequenceState, dv: &Array1<f64>) -> Result<EncoderGradients> {
    let (fwd, bwd) = state.caches.as_ref().ok_or(Error::MissingCache)?;
    if state.cfg != *cfg {
        return Err(Error::InvalidArgument("state was produced by a different encoder".into()));
    }
    if dv.len() != state.output.len() {
        return Err(Error::Shape(format!("upstream gradient width {}, expected {}", dv.len(), state.output.len())));
    }
    let mut grads = params.zeros_like();
    let m = state.len;

    if cfg.cell == CellKind::AveVect {
        let share = dv / m as f64;
        return Ok(EncoderGradients {
            params: grads,
            inputs: vec![share; m],
        });
    }

    let d = cfg.hidden;
    let (d_fwd, d_bwd) = if cfg.bidirectional {
        (dv.slice(s![..d]).to_owned(), Some(dv.slice(s![d..]).to_owned()))
    } else {
        (dv.clone(), None)
    };
    let mut inputs = backprop_stack(&params.forward, &mut grads.forward, fwd, d_fwd);
    if let Some(d_bwd) = d_bwd {
        let rev = backprop_stack(&params.backward, &mut grads.backward, bwd, d_bwd);
        for (acc, g) in inputs.iter_mut().zip(rev.into_iter().rev()) {
            *acc += &g;
        }
    }
    debug_assert!(inputs.iter().all(|g| g.len() == state.input_dim));
    Ok(EncoderGradients { params: grads, inputs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Tensors;
    use crate::rnn::gru_step;
    use crate::rng::seeded;
    use ndarray::array;
    use rand::Rng;

    fn random_inputs(m: usize, d: usize, seed: u64) -> Vec<Array1<f64>> {
        let mut rng = seeded(seed, 77);
        (0..m).map(|_| Array1::from_shape_fn(d, |_| rng.random_range(-1.0..1.0))).collect()
    }

    #[test]
    fn avevect_mean_and_gradient() {
        let cfg = EncoderConfig::new(CellKind::AveVect, false, 1, 1);
        let p = EncoderParams::zeros(&cfg, 2);
        let xs = vec![array![1.0, 0.0], array![0.0, 1.0]];
        let st = encode_with_state(&cfg, &p, &xs).unwrap();
        assert_eq!(st.output(), &array![0.5, 0.5]);
        let g = backprop_sequence(&cfg, &p, &st, &array![2.0, -4.0]).unwrap();
        assert_eq!(g.inputs, vec![array![1.0, -2.0]; 2]);
    }

    #[test]
    fn single_step_equals_cell() {
        let cfg = EncoderConfig::new(CellKind::Gru, false, 1, 4);
        let mut rng = seeded(3, 1);
        let p = EncoderParams::random(&cfg, 3, &mut rng);
        let xs = random_inputs(1, 3, 1);
        let v = encode_sequence(&cfg, &p, &xs).unwrap();
        let s = gru_step(&p.forward[0], &xs[0], &Array1::zeros(4)).unwrap();
        assert_eq!(v, s.h);
    }

    #[test]
    fn empty_sequence_rejected() {
        let cfg = EncoderConfig::new(CellKind::Lstm, false, 1, 2);
        let p = EncoderParams::zeros(&cfg, 3);
        assert!(matches!(encode_sequence(&cfg, &p, &[]), Err(Error::EmptyArtifact)));
    }

    #[test]
    fn palindrome_with_shared_directions_is_symmetric() {
        let cfg = EncoderConfig::new(CellKind::Gru, true, 1, 3);
        let mut rng = seeded(5, 1);
        let mut p = EncoderParams::random(&cfg, 2, &mut rng);
        p.backward = p.forward.clone();
        let a = array![0.3, -0.7];
        let b = array![-0.2, 0.9];
        let xs = vec![a.clone(), b.clone(), a.clone()];
        let v = encode_sequence(&cfg, &p, &xs).unwrap();
        assert_eq!(v.slice(s![..3]), v.slice(s![3..]));
    }

    #[test]
    fn hidden_states_bounded_and_gru_convex() {
        for kind in [CellKind::Rnn, CellKind::Lstm, CellKind::Gru] {
            let cfg = EncoderConfig::new(kind, false, 2, 5);
            let mut rng = seeded(9, 1);
            let mut p = EncoderParams::random(&cfg, 4, &mut rng);
            p.scale(4.0);
            let xs: Vec<_> = random_inputs(12, 4, 2).into_iter().map(|x| x * 3.0).collect();
            let st = encode_with_state(&cfg, &p, &xs).unwrap();
            for l in 0..2 {
                for h in st.forward_hidden(l).unwrap() {
                    assert!(h.iter().all(|v| v.abs() < 1.0));
                }
            }
            if kind == CellKind::Gru {
                for step in st.forward_cache(0).unwrap() {
                    if let StepCache::Gru { h_prev, cand, h, .. } = step {
                        for i in 0..h.len() {
                            let (lo, hi) = if h_prev[i] < cand[i] { (h_prev[i], cand[i]) } else { (cand[i], h_prev[i]) };
                            assert!(h[i] >= lo - 1e-15 && h[i] <= hi + 1e-15);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let cfg = EncoderConfig::new(CellKind::Lstm, true, 2, 3);
        let mut rng = seeded(4, 1);
        let p = EncoderParams::random(&cfg, 2, &mut rng);
        let xs = random_inputs(4, 2, 3);
        let st = encode_with_state(&cfg, &p, &xs).unwrap();
        let g = backprop_sequence(&cfg, &p, &st, &Array1::zeros(6)).unwrap();
        assert_eq!(g.params.squared_norm(), 0.0);
        assert!(g.inputs.iter().all(|x| x.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn missing_cache_is_an_error() {
        let cfg = EncoderConfig::new(CellKind::Gru, false, 1, 2);
        let p = EncoderParams::zeros(&cfg, 2);
        let mut st = encode_with_state(&cfg, &p, &random_inputs(3, 2, 1)).unwrap();
        st.drop_cache();
        assert!(matches!(backprop_sequence(&cfg, &p, &st, &array![1.0, 1.0]), Err(Error::MissingCache)));
    }

    #[test]
    fn deterministic_forward() {
        let cfg = EncoderConfig::new(CellKind::Lstm, true, 2, 4);
        let mut rng = seeded(8, 1);
        let p = EncoderParams::random(&cfg, 3, &mut rng);
        let xs = random_inputs(6, 3, 4);
        let a = encode_sequence(&cfg, &p, &xs).unwrap();
        let b = encode_sequence(&cfg, &p, &xs).unwrap();
        assert_eq!(a.to_vec().iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.to_vec().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}
