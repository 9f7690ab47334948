use std::collections::HashMap;

use crate::error::{Error, Result};

/// Token reserved for out-of-vocabulary words. Cannot collide with a
/// normalized token since `<` never survives tokenization.
pub const UNK_TOKEN: &str = "<unk>";

/// Contiguous token index. Known tokens are ordered by descending count
/// (ties lexicographic); UNK always takes the last index.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn build<I, S>(corpus: I, min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[String]>,
    {
        if min_count == 0 {
            return Err(Error::InvalidArgument("min_count must be >= 1".into()));
        }
        let mut counts: HashMap<&str, u64> = HashMap::new();
        let docs: Vec<S> = corpus.into_iter().collect();
        for doc in &docs {
            for tok in doc.as_ref() {
                *counts.entry(tok.as_str()).or_default() += 1;
            }
        }
        if counts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut kept: Vec<(&str, u64)> = counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let dropped: u64 = docs.iter().map(|d| d.as_ref().len() as u64).sum::<u64>()
            - kept.iter().map(|&(_, c)| c).sum::<u64>();

        let mut tokens: Vec<String> = kept.iter().map(|&(t, _)| t.to_string()).collect();
        let mut counts: Vec<u64> = kept.iter().map(|&(_, c)| c).collect();
        tokens.push(UNK_TOKEN.to_string());
        counts.push(dropped);
        Ok(Self::from_parts(tokens, counts))
    }

    /// Rebuilds a vocabulary from an index-ordered token list. Appends UNK
    /// when the list does not already end with it.
    pub fn from_parts(mut tokens: Vec<String>, mut counts: Vec<u64>) -> Self {
        counts.resize(tokens.len(), 0);
        if tokens.last().map(String::as_str) != Some(UNK_TOKEN) {
            tokens.retain(|t| t != UNK_TOKEN);
            counts.truncate(tokens.len());
            tokens.push(UNK_TOKEN.to_string());
            counts.push(0);
        }
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { tokens, counts, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn unk(&self) -> usize {
        self.tokens.len() - 1
    }

    /// Exact lookup; `None` for out-of-vocabulary tokens.
    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Lookup with UNK fallback.
    pub fn index_of(&self, token: &str) -> usize {
        self.get(token).unwrap_or_else(|| self.unk())
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn encode(&self, tokens: &[String]) -> Vec<usize> {
        tokens.iter().map(|t| self.index_of(t)).collect()
    }

    /// "token\tcount" per line, index order.
    pub fn to_tsv(&self) -> String {
        self.tokens
            .iter()
            .zip(&self.counts)
            .map(|(t, c)| format!("{t}\t{c}\n"))
            .collect()
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        let mut counts = Vec::new();
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
            let (t, c) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse("vocabulary", format!("line {}: missing tab", n + 1)))?;
            tokens.push(t.to_string());
            counts.push(
                c.parse()
                    .map_err(|_| Error::parse("vocabulary", format!("line {}: bad count", n + 1)))?,
            );
        }
        Ok(Self::from_parts(tokens, counts))
    }
}
