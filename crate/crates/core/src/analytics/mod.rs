//! Aggregates over classified posts: daily series, leaderboards,
//! correlation statistics and regional joins.

pub mod leaderboard;
pub mod regions;
pub mod stats;
pub mod volume;

pub use leaderboard::{
    build_leaderboard, cross_platform_source_correlation, domain_tallies, truncate_leaderboard, LeaderboardEntry,
    Tally, ALL_LOW_CREDIBILITY,
};
pub use regions::{
    load_vaccine_records, read_vaccine_records, region_stats, users_vs_population_correlation, RegionOptions,
    RegionReport, RegionStat,
};
pub use stats::{mid_ranks, pearson, spearman, Correlation, PValueMethod};
pub use volume::{
    corpus_span, credibility_fractions, daily_volume, mean_daily_fraction, FractionPoint, FractionSeries,
};
