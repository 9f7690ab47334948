//! Training regime: learning-rate decay, gradient clipping, balanced
//! sampling, RMSprop updates, the training loop and grid search.

mod grid;
mod optim;
mod sampler;
mod train;

pub use grid::{grid_search, read_search_space, write_grid_report, GridOutcome, GridResult, GridRun, SearchSpace};
pub use optim::{clip_gradient, clip_tensors, LrSchedule, Rmsprop};
pub use sampler::balanced_epoch_sampler;
pub use train::{dev_loss, encode_artifacts, link_accuracy, score_pairs, train, train_observed, write_run_log, EncodedArtifacts, EpochReport, TrainRun};
