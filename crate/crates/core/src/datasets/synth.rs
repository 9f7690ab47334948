//! Synthetic tracing benchmarks.
//!
//! Every artifact belongs to one topic; a source and a target are linked
//! exactly when their topics agree. In *lexical* mode both roles draw from
//! one vocabulary, so linked pairs share keywords. In *synonym* mode the two
//! roles use disjoint vocabularies joined by a bijective synonym
//! dictionary; no source shares a token (or a stem) with any target.
//!
//! Artifacts are mostly filler text with a few topic words. The embedding
//! corpus consists of definition sentences, each naming one concept once
//! amid register-neutral context words (the concept's descriptors and its
//! topic's context words), so synonym partners share contexts. Glossary
//! sentences name both partners side by side.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::TraceDataset;
use crate::corpus::{default_stopwords, porter, Artifact, Role};
use crate::error::{Error, Result};
use crate::rng::{seeded, streams, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthMode {
    Lexical,
    Synonym,
}

impl std::str::FromStr for SynthMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lexical" => Ok(SynthMode::Lexical),
            "synonym" => Ok(SynthMode::Synonym),
            other => Err(Error::InvalidArgument(format!("unknown synthetic mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub mode: SynthMode,
    pub n_sources: usize,
    pub n_targets: usize,
    /// Expected fraction of linked pairs; the topic count is 1/density.
    pub density: f64,
    /// Distinct artifact words per register, fillers included.
    pub vocab_size: usize,
    /// Topic-neutral filler words per register.
    pub fillers: usize,
    /// Register-neutral context words per concept and per topic, used
    /// only in the corpus.
    pub descriptors: usize,
    /// Probability that an artifact position holds a topic word.
    pub topic_rate: f64,
    /// Probability that a corpus position holds a concept descriptor.
    pub descriptor_rate: f64,
    pub source_len: (usize, usize),
    pub target_len: (usize, usize),
    pub corpus_lines: usize,
    /// Fraction of corpus lines that are mixed-register glossary sentences.
    pub glossary_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            mode: SynthMode::Synonym,
            n_sources: 60,
            n_targets: 40,
            density: 0.02,
            vocab_size: 200,
            fillers: 20,
            descriptors: 1,
            topic_rate: 0.25,
            descriptor_rate: 0.5,
            source_len: (8, 16),
            target_len: (12, 24),
            corpus_lines: 4000,
            glossary_rate: 0.1,
            seed: 0,
        }
    }
}

impl SynthConfig {
    /// Small lexical dataset used for memorization checks (10 + 10 artifacts).
    pub fn toy_lexical(seed: u64) -> Self {
        SynthConfig {
            mode: SynthMode::Lexical,
            n_sources: 10,
            n_targets: 10,
            density: 0.2,
            vocab_size: 40,
            fillers: 10,
            topic_rate: 0.5,
            corpus_lines: 1000,
            seed,
            ..Default::default()
        }
    }
}

/// Generation record: parameters, topic structure and synonym dictionary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub config: SynthConfig,
    pub topics: usize,
    pub words_per_topic: usize,
    /// Source word → target word (synonym mode only).
    pub dictionary: Vec<(String, String)>,
    pub source_topics: Vec<usize>,
    pub target_topics: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SyntheticBenchmark {
    pub dataset: TraceDataset,
    /// Embedding corpus, one sentence per line.
    pub corpus: Vec<String>,
    pub manifest: SynthManifest,
}

/// One register's lexicon: `topic_words[k]` holds topic k's words.
#[derive(Clone)]
struct Lexicon {
    topic_words: Vec<Vec<String>>,
    fillers: Vec<String>,
}

struct WordMaker {
    used_words: HashSet<String>,
    used_stems: HashSet<String>,
    stop: HashSet<String>,
}

impl WordMaker {
    const ONSETS: &'static [&'static str] = &[
        "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "dr", "gr", "kl", "pl", "st", "tr",
    ];
    const NUCLEI: &'static [&'static str] = &["a", "e", "i", "o", "u", "ai", "ou"];

    fn new() -> Self {
        WordMaker {
            used_words: HashSet::new(),
            used_stems: HashSet::new(),
            stop: default_stopwords(),
        }
    }

    /// Fresh pseudo-word whose surface form and Porter stem are both unused.
    fn make(&mut self, rng: &mut Rng, syllables: usize) -> String {
        loop {
            let mut w = String::new();
            for _ in 0..syllables {
                w.push_str(Self::ONSETS.choose(rng).unwrap());
                w.push_str(Self::NUCLEI.choose(rng).unwrap());
            }
            if rng.random_bool(0.5) {
                w.push_str(["n", "r", "s", "t", "m"].choose(rng).unwrap());
            }
            let stem = porter::stem(&w);
            if self.stop.contains(&w) || self.used_words.contains(&w) || self.used_stems.contains(&stem) {
                continue;
            }
            self.used_words.insert(w.clone());
            self.used_stems.insert(stem);
            return w;
        }
    }

    fn lexicon(&mut self, rng: &mut Rng, topics: usize, per_topic: usize, fillers: usize, syllables: usize) -> Lexicon {
        let topic_words = (0..topics)
            .map(|_| (0..per_topic).map(|_| self.make(rng, syllables)).collect())
            .collect();
        let fillers = (0..fillers).map(|_| self.make(rng, syllables)).collect();
        Lexicon { topic_words, fillers }
    }
}

/// Builds a sentence of `len` slots; each slot is a topic mention or a
/// filler, and at least one slot is a topic mention. `extra` mentions are
/// spliced in at random positions afterwards.
fn sentence(
    rng: &mut Rng,
    len: (usize, usize),
    topic_rate: f64,
    mut topic: impl FnMut(&mut Rng) -> Vec<String>,
    mut filler: impl FnMut(&mut Rng) -> String,
    extra: Vec<Vec<String>>,
) -> String {
    let n = rng.random_range(len.0..=len.1.max(len.0)).max(1);
    let forced = rng.random_range(0..n);
    let mut chunks: Vec<Vec<String>> = (0..n)
        .map(|i| if i == forced || rng.random_bool(topic_rate) { topic(rng) } else { vec![filler(rng)] })
        .collect();
    for e in extra {
        let at = rng.random_range(0..=chunks.len());
        chunks.insert(at, e);
    }
    let mut text = chunks.concat().join(" ");
    if let Some(first) = text.get_mut(..1) {
        first.make_ascii_uppercase();
    }
    text.push('.');
    text
}

struct Generator<'a> {
    cfg: &'a SynthConfig,
    per_topic: usize,
    /// Index 0 is the source register, 1 the target register.
    lex: [Lexicon; 2],
    /// Register-neutral context words per concept, `[topic][concept]`.
    descriptors: Vec<Vec<Vec<String>>>,
    /// Register-neutral context words per topic.
    topic_context: Vec<Vec<String>>,
}

impl Generator<'_> {
    fn artifact(&self, rng: &mut Rng, reg: usize, topic: usize, len: (usize, usize)) -> String {
        let lex = &self.lex[reg];
        sentence(
            rng,
            len,
            self.cfg.topic_rate,
            |r| vec![lex.topic_words[topic].choose(r).unwrap().clone()],
            |r| lex.fillers.choose(r).unwrap().clone(),
            Vec::new(),
        )
    }

    fn descriptor(&self, rng: &mut Rng, topic: usize, concept: usize) -> Vec<String> {
        self.descriptors[topic][concept].choose(rng).cloned().into_iter().collect()
    }

    /// Filler slot of a corpus line: a topic context word or a register
    /// filler.
    fn corpus_filler(&self, rng: &mut Rng, reg: usize, topic: usize) -> String {
        match self.topic_context[topic].choose(rng) {
            Some(w) if rng.random_bool(0.5) => w.clone(),
            _ => self.lex[reg].fillers.choose(rng).unwrap().clone(),
        }
    }

    /// Single-register definition of one concept: the concept is named
    /// once, its descriptors fill the topical slots.
    fn corpus_line(&self, rng: &mut Rng, reg: usize, topic: usize) -> String {
        let j = rng.random_range(0..self.per_topic);
        let word = self.lex[reg].topic_words[topic][j].clone();
        let len = if reg == 0 { self.cfg.source_len } else { self.cfg.target_len };
        sentence(
            rng,
            len,
            self.cfg.descriptor_rate,
            |r| self.descriptor(r, topic, j),
            |r| self.corpus_filler(r, reg, topic),
            vec![vec![word]],
        )
    }

    /// Mixed-register definition naming one concept in both registers side
    /// by side.
    fn glossary_line(&self, rng: &mut Rng, topic: usize) -> String {
        let j = rng.random_range(0..self.per_topic);
        let (a, b) = (self.lex[0].topic_words[topic][j].clone(), self.lex[1].topic_words[topic][j].clone());
        let pair = if rng.random_bool(0.5) { vec![a, b] } else { vec![b, a] };
        sentence(
            rng,
            self.cfg.source_len,
            self.cfg.descriptor_rate,
            |r| self.descriptor(r, topic, j),
            |r| {
                let reg = r.random_range(0..2);
                self.corpus_filler(r, reg, topic)
            },
            vec![pair],
        )
    }
}

pub fn generate_synthetic(cfg: &SynthConfig) -> Result<SyntheticBenchmark> {
    if cfg.n_sources == 0 || cfg.n_targets == 0 || cfg.vocab_size == 0 {
        return Err(Error::InvalidArgument("artifact counts and vocabulary size must be positive".into()));
    }
    if !(0.0..=1.0).contains(&cfg.density) || !(0.0..=1.0).contains(&cfg.topic_rate) || !(0.0..=1.0).contains(&cfg.descriptor_rate) || !(0.0..=1.0).contains(&cfg.glossary_rate) {
        return Err(Error::InvalidArgument("density and rates must lie in [0, 1]".into()));
    }
    let topics = if cfg.density == 0.0 { 2 } else { (1.0 / cfg.density).round().max(1.0) as usize };
    let per_topic = cfg.vocab_size.saturating_sub(cfg.fillers) / topics;
    if per_topic == 0 || cfg.fillers == 0 {
        return Err(Error::VocabTooSmall(format!(
            "{} words with {} fillers cannot cover {topics} topics",
            cfg.vocab_size, cfg.fillers
        )));
    }

    let mut rng = seeded(cfg.seed, streams::SYNTH);
    let mut maker = WordMaker::new();
    let src_lex = maker.lexicon(&mut rng, topics, per_topic, cfg.fillers, 2);
    let tgt_lex = match cfg.mode {
        SynthMode::Synonym => maker.lexicon(&mut rng, topics, per_topic, cfg.fillers, 3),
        SynthMode::Lexical => src_lex.clone(),
    };
    let descriptors = (0..topics)
        .map(|_| (0..per_topic).map(|_| (0..cfg.descriptors).map(|_| maker.make(&mut rng, 2)).collect()).collect())
        .collect();
    let topic_context = (0..topics).map(|_| (0..cfg.descriptors).map(|_| maker.make(&mut rng, 2)).collect()).collect();
    let g = Generator {
        cfg,
        per_topic,
        lex: [src_lex, tgt_lex],
        descriptors,
        topic_context,
    };

    // With zero density sources and targets draw from disjoint topic halves.
    let (src_range, tgt_range) = if cfg.density == 0.0 { ((0, 1), (1, 2)) } else { ((0, topics), (0, topics)) };
    let source_topics: Vec<usize> = (0..cfg.n_sources).map(|_| rng.random_range(src_range.0..src_range.1)).collect();
    let target_topics: Vec<usize> = (0..cfg.n_targets).map(|_| rng.random_range(tgt_range.0..tgt_range.1)).collect();

    let sw = cfg.n_sources.to_string().len().max(3);
    let tw = cfg.n_targets.to_string().len().max(3);
    let sources: Vec<Artifact> = source_topics
        .iter()
        .enumerate()
        .map(|(i, &k)| Artifact::new(format!("S{:0sw$}", i + 1), Role::Source, g.artifact(&mut rng, 0, k, cfg.source_len)))
        .collect();
    let targets: Vec<Artifact> = target_topics
        .iter()
        .enumerate()
        .map(|(i, &k)| Artifact::new(format!("T{:0tw$}", i + 1), Role::Target, g.artifact(&mut rng, 1, k, cfg.target_len)))
        .collect();

    let mut links = Vec::new();
    for (s, &ks) in source_topics.iter().enumerate() {
        for (t, &kt) in target_topics.iter().enumerate() {
            if ks == kt {
                links.push((sources[s].id.clone(), targets[t].id.clone()));
            }
        }
    }

    let corpus = (0..cfg.corpus_lines)
        .map(|_| {
            let k = rng.random_range(0..topics);
            if cfg.mode == SynthMode::Synonym && rng.random_bool(cfg.glossary_rate) {
                g.glossary_line(&mut rng, k)
            } else {
                let reg = rng.random_range(0..2);
                g.corpus_line(&mut rng, reg, k)
            }
        })
        .collect();

    let dictionary = match cfg.mode {
        SynthMode::Synonym => g.lex[0]
            .topic_words
            .iter()
            .flatten()
            .zip(g.lex[1].topic_words.iter().flatten())
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect(),
        SynthMode::Lexical => Vec::new(),
    };
    let (dataset, _) = TraceDataset::new(sources, targets, &links)?;
    Ok(SyntheticBenchmark {
        dataset,
        corpus,
        manifest: SynthManifest {
            config: cfg.clone(),
            topics,
            words_per_topic: per_topic,
            dictionary,
            source_topics,
            target_topics,
        },
    })
}
