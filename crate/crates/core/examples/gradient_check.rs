//! Compares backpropagated encoder gradients with central differences for
//! every cell type and topology.

use ndarray::Array1;
use tracelink::params::Tensors;
use tracelink::rng::seeded;
use tracelink::rnn::{backprop_sequence, encode_sequence, encode_with_state, CellKind, EncoderConfig, EncoderParams};

fn objective(cfg: &EncoderConfig, params: &EncoderParams, xs: &[Array1<f64>], w: &Array1<f64>) -> f64 {
    encode_sequence(cfg, params, xs).unwrap().dot(w)
}

fn main() -> tracelink::Result<()> {
    let dim = 4;
    let mut rng = seeded(11, 0);
    let xs: Vec<Array1<f64>> = (0..5).map(|t| Array1::from_iter((0..dim).map(|i| ((t * dim + i) as f64 * 0.37).sin()))).collect();
    for (cell, bi, layers) in [(CellKind::Rnn, false, 1), (CellKind::Gru, true, 2), (CellKind::Lstm, true, 2)] {
        let cfg = EncoderConfig::new(cell, bi, layers, 3);
        let params = EncoderParams::random(&cfg, dim, &mut rng);
        let w = Array1::from_iter((0..cfg.output_dim(dim)).map(|i| 1.0 - 0.3 * i as f64));
        let state = encode_with_state(&cfg, &params, &xs)?;
        let analytic = backprop_sequence(&cfg, &params, &state, &w)?.params.flatten();
        let step = 1e-5;
        let mut worst: f64 = 0.0;
        let mut probe = params.clone();
        let mut k = 0;
        for ti in 0..probe.tensors_mut().len() {
            let n = probe.tensors_mut()[ti].len();
            for j in 0..n {
                let orig = probe.tensors_mut()[ti].as_slice_mut().unwrap()[j];
                probe.tensors_mut()[ti].as_slice_mut().unwrap()[j] = orig + step;
                let up = objective(&cfg, &probe, &xs, &w);
                probe.tensors_mut()[ti].as_slice_mut().unwrap()[j] = orig - step;
                let down = objective(&cfg, &probe, &xs, &w);
                probe.tensors_mut()[ti].as_slice_mut().unwrap()[j] = orig;
                let numeric = (up - down) / (2.0 * step);
                let err = (analytic[k] - numeric).abs() / analytic[k].abs().max(numeric.abs()).max(1e-3);
                worst = worst.max(err);
                k += 1;
            }
        }
        println!("{:<10} {} parameters, max relative error {worst:.2e}", cfg.label(), k);
    }
    Ok(())
}
