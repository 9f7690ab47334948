//! Gate activations of a GRU and an LSTM over one sentence, written as the
//! same CSV the `gates` subcommand produces.

use ndarray::Array1;
use tracelink::rng::seeded;
use tracelink::rnn::{trace_gates, CellKind, CellParameters};

fn main() -> tracelink::Result<()> {
    let words: Vec<String> = "the pump shall stop when pressure exceeds the limit".split(' ').map(String::from).collect();
    let mut rng = seeded(3, 0);
    let dim = 8;
    // deterministic stand-in vectors, one per word
    let inputs: Vec<Array1<f64>> = words
        .iter()
        .map(|w| Array1::from_iter((0..dim).map(|i| ((w.len() * 31 + i * 7) % 13) as f64 / 13.0 - 0.5)))
        .collect();
    for kind in [CellKind::Gru, CellKind::Lstm] {
        let params = CellParameters::random(kind, dim, 16, &mut rng);
        let trace = trace_gates(&params, &inputs, &[0, 5])?;
        println!("{kind:?} gates {:?}", kind.gate_names());
        print!("{}", trace.to_csv(&words));
    }
    Ok(())
}
