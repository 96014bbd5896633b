//! Benchmark–human agreement: vote aggregation, rank correlation, leave-one-out
//! calibration and Bland–Altman limits of agreement.

mod calibration;
mod correlation;
mod votes;

pub use calibration::{
    bland_altman, bland_altman_from_differences, loo_calibrate, BlandAltman, BlandAltmanPoint,
    LooFit, LOA_Z,
};
pub use correlation::{average_ranks, spearman, CorrelationResult, PValueMethod, RankRow, EXACT_MAX_N};
pub use votes::{aggregate_votes, HumanScores, Outcome, PairwiseVote};
