//! Monitoring pipeline for vaccine-related social media conversations.
//!
//! Posts are parsed from replayable platform feeds, filtered by keyword,
//! their links labeled against low/high-credibility source lists, authors
//! geolocated to Italian regions, and everything aggregated into daily
//! series, leaderboards, regional statistics and correlations.

pub mod analytics;
pub mod credibility;
pub mod error;
pub mod geolocate;
pub mod ingest;
pub mod model;
pub mod report;
pub mod text;
pub mod videos;

pub use analytics::{
    build_leaderboard, credibility_fractions, daily_volume, mean_daily_fraction, pearson, spearman, Correlation,
    FractionSeries, LeaderboardEntry, RegionStat, ALL_LOW_CREDIBILITY,
};
pub use credibility::{
    canonical_domain, classify_url, extract_urls, extract_youtube_id, ClassifiedPost, ClassifiedUrl, Classifier,
    RedirectMap, SourceList, SourceLists, VideoId,
};
pub use error::{Error, Result};
pub use geolocate::{geolocate_users, resolve_location, Gazetteer, GeoResolution};
pub use ingest::{KeywordSet, KeywordTimeline};
pub use model::{
    CredibilityClass, DailyStat, DateWindow, GazetteerEntry, PlaceKind, Platform, Post, RegionCode, VaccineRecord,
};
pub use report::{load_latest_snapshot, Manifest, Snapshot};
pub use text::normalize_text;
pub use videos::{VideoRecord, VideoStatus};
