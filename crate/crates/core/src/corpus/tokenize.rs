use super::porter;
use super::StopWords;

fn is_token_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

/// Lowercases `raw` and splits it on maximal runs of characters that are not
/// ASCII alphanumerics, underscores or hyphens.
pub fn normalize_and_tokenize(raw: &str) -> Vec<String> {
    raw.split(|c: char| !is_token_char(c))
        .filter(|t| !t.is_empty())
        .map(|t| t.to_ascii_lowercase())
        .collect()
}

/// IR pipeline: tokenize, drop stopwords, Porter-stem what is left.
pub fn ir_preprocess(raw: &str, stopwords: &StopWords) -> Vec<String> {
    ir_preprocess_with(raw, Some(stopwords), true)
}

/// IR pipeline with each stage switchable; used by the baseline
/// preprocessing grid.
pub fn ir_preprocess_with(raw: &str, stopwords: Option<&StopWords>, stem: bool) -> Vec<String> {
    normalize_and_tokenize(raw)
        .into_iter()
        .filter(|t| stopwords.is_none_or(|s| !s.contains(t)))
        .map(|t| if stem { porter::stem(&t) } else { t })
        .collect()
}
