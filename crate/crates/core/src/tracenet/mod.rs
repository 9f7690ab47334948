//! The tracing network: a shared recurrent encoder for both artifacts, the
//! semantic relation layers (elementwise product and absolute difference
//! feeding a sigmoid integration layer) and a two-way softmax whose index 1
//! is the link probability.

mod checkpoint;
mod network;
mod relation;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, FORMAT_VERSION, LINK_INDEX};
pub use network::{backward, forward, forward_embedded, loss, LossValue, NetworkConfig, NetworkParams, PairCache, TraceNetwork};
pub use relation::{relation_head, LinkPrediction, RelationCache, RelationParameters};
