use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::normalize_and_tokenize;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Source,
    Target,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Source => "source",
            Role::Target => "target",
        })
    }
}

/// One requirement or design text.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub id: String,
    pub role: Role,
    pub raw_text: String,
    pub tokens: Vec<String>,
}

impl Artifact {
    pub fn new(id: impl Into<String>, role: Role, raw_text: impl Into<String>) -> Self {
        let raw_text = raw_text.into();
        let tokens = normalize_and_tokenize(&raw_text);
        Artifact {
            id: id.into(),
            role,
            raw_text,
            tokens,
        }
    }

    /// Degenerate artifacts carry no tokens after normalization.
    pub fn is_degenerate(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct ArtifactRecord {
    id: String,
    role: Role,
    text: String,
}

/// Reads the JSON-lines artifact format: `{"id", "role", "text"}` per line.
pub fn read_artifacts(path: &Path) -> Result<Vec<Artifact>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ArtifactRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(format!("{}:{}", path.display(), n + 1), e.to_string()))?;
        if rec.id.is_empty() {
            return Err(Error::parse(format!("{}:{}", path.display(), n + 1), "empty id"));
        }
        out.push(Artifact::new(rec.id, rec.role, rec.text));
    }
    Ok(out)
}

pub fn write_artifacts(path: &Path, artifacts: &[Artifact]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
    for a in artifacts {
        let rec = ArtifactRecord {
            id: a.id.clone(),
            role: a.role,
            text: a.raw_text.clone(),
        };
        serde_json::to_writer(&mut w, &rec)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
