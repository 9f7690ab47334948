//! Text normalization for the two pipelines: raw tokens for the neural
//! encoder, stopword-filtered Porter stems for the IR baselines.

use tracelink::corpus::{default_stopwords, ir_preprocess, normalize_and_tokenize, porter::stem};

fn main() {
    let raw = "The system shall encrypt all stored patient records using AES-256 (see REQ-12).";
    println!("neural tokens: {:?}", normalize_and_tokenize(raw));
    println!("ir tokens:     {:?}", ir_preprocess(raw, &default_stopwords()));
    for word in ["connection", "relational", "generalizations", "running", "traceability"] {
        println!("{word:>16} -> {}", stem(word));
    }
}
