//! Usability scoring, the constrained amplification-factor search and the
//! multi-block combination rule.

mod combine;
pub mod mock;
pub mod remote;
mod scorer;
mod search;

pub use combine::{combine, default_scale_sum, CombinationConfig, MULTI_STEP_SCALE_SUM, SINGLE_STEP_SCALE_SUM};
pub use remote::{RemoteClient, RemoteScorer};
pub use scorer::{
    aesthetic_proxy, aesthetic_stats, alignment_embedding, alignment_proxy, usability, AestheticStats,
    AestheticWeights, LocalProxy, Scorer, ScorerSource, Scores, UsabilityContext, SCORE_MAX,
};
pub use search::{
    select_lambda, select_lambda_with_generator, BlockSelection, SearchConfig, SearchGrid, TracePoint,
};
