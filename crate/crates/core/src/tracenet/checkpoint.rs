//! Checkpoint container: 8-byte magic, little-endian u64 header length, a
//! JSON header, then every parameter block in manifest order as row-major
//! little-endian f64.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::network::{NetworkConfig, NetworkParams, TraceNetwork};
use super::relation::LINK;
use crate::error::{Error, Result};
use crate::params::Tensors;

const MAGIC: &[u8; 8] = b"TRNNCKPT";
pub const FORMAT_VERSION: u32 = 1;
/// Softmax index of the link class, asserted on load.
pub const LINK_INDEX: usize = LINK;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ManifestEntry {
    name: String,
    rows: usize,
    cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    format_version: u32,
    link_index: usize,
    input_dim: usize,
    config: NetworkConfig,
    manifest: Vec<ManifestEntry>,
    #[serde(default)]
    metadata: serde_json::Value,
}

/// A network plus free-form metadata (epoch, dev loss, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub network: TraceNetwork,
    pub metadata: serde_json::Value,
}

impl Checkpoint {
    pub fn new(network: TraceNetwork) -> Self {
        Checkpoint {
            network,
            metadata: serde_json::Value::Null,
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let params = &self.network.params;
        let manifest = params
            .tensors()
            .iter()
            .map(|(name, t)| ManifestEntry {
                name: name.clone(),
                rows: t.nrows(),
                cols: t.ncols(),
            })
            .collect();
        let header = Header {
            format_version: FORMAT_VERSION,
            link_index: LINK_INDEX,
            input_dim: self.network.input_dim,
            config: self.network.config.clone(),
            manifest,
            metadata: self.metadata.clone(),
        };
        let json = serde_json::to_vec(&header)?;
        let mut out = Vec::with_capacity(16 + json.len() + 8 * params.num_parameters());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(json.len() as u64).to_le_bytes());
        out.extend_from_slice(&json);
        for (_, t) in params.tensors() {
            // iter() walks logical row-major order regardless of layout
            for v in t.iter() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Checkpoint(m.to_string());
        if bytes.len() < 16 || &bytes[..8] != MAGIC {
            return Err(bad("not a checkpoint file"));
        }
        let hlen = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
        let body = bytes.get(16..16 + hlen).ok_or_else(|| bad("truncated header"))?;
        let header: Header = serde_json::from_slice(body)?;
        if header.format_version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported format version {}", header.format_version)));
        }
        if header.link_index != LINK_INDEX {
            return Err(Error::Checkpoint(format!("link index {} (expected {LINK_INDEX})", header.link_index)));
        }
        header.config.validate()?;
        let mut params = NetworkParams::zeros(&header.config, header.input_dim);
        let expected: Vec<ManifestEntry> = params
            .tensors()
            .iter()
            .map(|(name, t)| ManifestEntry {
                name: name.clone(),
                rows: t.nrows(),
                cols: t.ncols(),
            })
            .collect();
        if expected != header.manifest {
            return Err(bad("parameter manifest does not match configuration"));
        }
        let mut data = &bytes[16 + hlen..];
        for mut t in params.tensors_mut() {
            for v in t.iter_mut() {
                let (chunk, rest) = data.split_at_checked(8).ok_or_else(|| bad("truncated parameter block"))?;
                *v = f64::from_le_bytes(chunk.try_into().unwrap());
                data = rest;
            }
        }
        if !data.is_empty() {
            return Err(bad("trailing bytes after parameter blocks"));
        }
        Ok(Checkpoint {
            network: TraceNetwork {
                config: header.config,
                params,
                input_dim: header.input_dim,
            },
            metadata: header.metadata,
        })
    }
}

pub fn write_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    std::fs::write(path, checkpoint.to_bytes()?).map_err(|e| Error::io(path, e))
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Checkpoint::from_bytes(&bytes)
}
