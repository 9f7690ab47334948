//! Ranked-retrieval metrics, precision–recall curves and nonparametric
//! method comparison.

mod curve;
mod metrics;
mod report;
mod stats;

pub use curve::{exact_thresholds, pr_curve, pr_curve_exact, PrPoint};
pub use metrics::{average_precision, mean_average_precision, ranked_lists, MapResult, RankedList};
pub use report::{write_curves, write_metrics, write_stats};
pub use stats::{bonferroni, compare_methods, kruskal_wallis, mann_whitney_u, midranks, KruskalWallis, MannWhitney, PairwiseTest, StatsReport};
