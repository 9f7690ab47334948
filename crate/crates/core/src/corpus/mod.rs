//! Text normalization, tokenization, vocabularies and the two preprocessing
//! pipelines: the neural pipeline (lowercase + character filter) and the IR
//! pipeline (neural pipeline + stopword removal + Porter stemming).

mod artifact;
pub mod porter;
mod stopwords;
mod tokenize;
mod vocab;

pub use artifact::{read_artifacts, write_artifacts, Artifact, Role};
pub use stopwords::{default_stopwords, read_stopwords, StopWords};
pub use tokenize::{ir_preprocess, ir_preprocess_with, normalize_and_tokenize};
pub use vocab::{Vocabulary, UNK_TOKEN};
