//! Generates a synonym benchmark and writes it in the on-disk formats the
//! command-line tools read.

use tracelink::corpus::write_artifacts;
use tracelink::datasets::{generate_synthetic, write_links, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "synthetic_out".into());
    let out = std::path::Path::new(&out);
    std::fs::create_dir_all(out)?;
    let bench = generate_synthetic(&SynthConfig { seed: 42, ..Default::default() })?;
    let ds = &bench.dataset;
    let artifacts: Vec<_> = ds.artifacts().cloned().collect();
    write_artifacts(&out.join("artifacts.jsonl"), &artifacts)?;
    write_links(&out.join("links.csv"), &ds.link_ids())?;
    std::fs::write(out.join("corpus.txt"), bench.corpus.join("\n") + "\n")?;
    println!("{} sources, {} targets, {} links", ds.sources.len(), ds.targets.len(), ds.num_links());
    println!("{} topics, {} dictionary entries, e.g. {:?}", bench.manifest.topics, bench.manifest.dictionary.len(), &bench.manifest.dictionary[..3]);
    println!("{}", ds.sources[0].raw_text);
    println!("written to {}", out.display());
    Ok(())
}
