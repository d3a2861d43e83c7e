//! Replayable platform feeds, keyword filtering and the channel-connected
//! ingest pipeline.

mod facebook;
mod filter;
mod keywords;
mod pipeline;
pub mod store;
mod twitter;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use serde::Serialize;

pub use facebook::FacebookFeed;
pub use filter::{filter_stream, FilterStats, FilterStream};
pub use keywords::{match_keywords, Keyword, KeywordSet, KeywordTimeline, DEFAULT_KEYWORDS};
pub use pipeline::{run_ingest, IngestSummary};
pub use twitter::TwitterFeed;

use crate::model::DateWindow;

#[derive(Debug, Clone, Default)]
pub struct FeedOptions {
    /// Records dated outside the collection window are rejected.
    pub window: Option<DateWindow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reject {
    pub line: usize,
    pub reason: String,
}

/// Per-record parse failures. All are counted; the first
/// [`Rejects::MAX_SAMPLES`] are kept for diagnostics.
#[derive(Debug, Clone, Default)]
pub struct Rejects {
    count: u64,
    samples: Vec<Reject>,
}

impl Rejects {
    pub const MAX_SAMPLES: usize = 100;

    pub(crate) fn record(&mut self, line: usize, reason: impl Into<String>) {
        self.count += 1;
        if self.samples.len() < Self::MAX_SAMPLES {
            self.samples.push(Reject {
                line,
                reason: reason.into(),
            });
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn samples(&self) -> &[Reject] {
        &self.samples
    }
}

/// Accepts RFC 3339, the classic Twitter `Sun Dec 27 10:00:00 +0000 2020`
/// form, naive `YYYY-MM-DD[ T]HH:MM:SS` (taken as UTC) and bare dates
/// (midnight UTC).
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    if let Ok(t) = DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y") {
        return Some(t.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t.and_utc());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .map(|d| d.and_hms_opt(0, 0, 0).unwrap().and_utc())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamp_formats() {
        let want: DateTime<Utc> = "2020-12-27T10:00:00Z".parse().unwrap();
        assert_eq!(parse_timestamp("2020-12-27T10:00:00Z"), Some(want));
        assert_eq!(parse_timestamp("2020-12-27T11:00:00+01:00"), Some(want));
        assert_eq!(parse_timestamp("Sun Dec 27 10:00:00 +0000 2020"), Some(want));
        assert_eq!(parse_timestamp("2020-12-27 10:00:00"), Some(want));
        assert_eq!(
            parse_timestamp("2020-12-27").unwrap().to_rfc3339(),
            "2020-12-27T00:00:00+00:00"
        );
        assert_eq!(parse_timestamp(""), None);
        assert_eq!(parse_timestamp("27/12/2020"), None);
    }

    #[test]
    fn rejects_keep_bounded_samples() {
        let mut r = Rejects::default();
        for i in 0..250 {
            r.record(i, "bad");
        }
        assert_eq!(r.count(), 250);
        assert_eq!(r.samples().len(), Rejects::MAX_SAMPLES);
    }
}
