//! Frequent multiplex pattern mining under minimum-image support.

mod canon;
mod embed;
mod io;
mod mine;
mod pattern;

pub use embed::{embeddings, min_image_support, support, Budget, Embedding, Matcher, SupportCount};
pub use io::{patterns_from_json, patterns_to_json, patterns_to_lg, PatternRecord};
pub use mine::{mine, mine_with_stats, MineStats, MinerConfig, PatternSet, DEFAULT_BUDGET};
pub use pattern::{Code, Pattern, PatternEdge, Slot};

pub(crate) use canon::automorphisms;
