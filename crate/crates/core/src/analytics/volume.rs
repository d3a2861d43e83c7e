//! Daily volume and credibility-fraction series.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::credibility::ClassifiedPost;
use crate::error::{Error, Result};
use crate::model::{CredibilityClass, DailyStat, DateWindow, Platform};

/// Weight a post contributes to its day: one per tweet, the share count per
/// Facebook post.
pub fn post_weight(post: &ClassifiedPost) -> u64 {
    match post.post.platform {
        Platform::Twitter => 1,
        Platform::Facebook => post.post.share_weight,
    }
}

/// Dense daily series for every platform, ordered by platform then date.
///
/// Days run over `window` when given, otherwise from the first to the last
/// post date in the corpus. Days without posts are emitted with zero counts,
/// and posts outside the window are ignored.
pub fn daily_volume(posts: &[ClassifiedPost], window: Option<DateWindow>) -> Vec<DailyStat> {
    let window = match window.or_else(|| corpus_span(posts)) {
        Some(w) => w,
        None => return Vec::new(),
    };
    let mut cells: BTreeMap<(Platform, NaiveDate), [u64; 3]> = BTreeMap::new();
    for p in posts {
        let date = p.post.date();
        if !window.contains(date) {
            continue;
        }
        let w = post_weight(p);
        let cell = cells.entry((p.post.platform, date)).or_default();
        cell[0] += w;
        if p.has_class(CredibilityClass::Low) {
            cell[1] += w;
        }
        if p.has_class(CredibilityClass::High) {
            cell[2] += w;
        }
    }
    let mut out = Vec::with_capacity(Platform::ALL.len() * window.len_days());
    for platform in Platform::ALL {
        for date in window.days() {
            let [volume, low_count, high_count] = cells.get(&(platform, date)).copied().unwrap_or_default();
            out.push(DailyStat {
                date,
                platform,
                volume,
                low_count,
                high_count,
            });
        }
    }
    out
}

/// First and last post date, if any.
pub fn corpus_span(posts: &[ClassifiedPost]) -> Option<DateWindow> {
    let mut dates = posts.iter().map(|p| p.post.date());
    let first = dates.next()?;
    let (lo, hi) = dates.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d)));
    Some(DateWindow { start: lo, end: hi })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionPoint {
    pub date: NaiveDate,
    pub low_fraction: f64,
    pub high_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionSeries {
    pub platform: Platform,
    pub points: Vec<FractionPoint>,
}

fn ratio(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

/// One fraction series per platform present in `stats`, in platform order.
/// Zero-volume days yield `(0, 0)`.
///
/// Errors if a platform's days are not strictly increasing or a class count
/// exceeds its day's volume.
pub fn credibility_fractions(stats: &[DailyStat]) -> Result<Vec<FractionSeries>> {
    let mut by_platform: BTreeMap<Platform, Vec<FractionPoint>> = BTreeMap::new();
    for s in stats {
        if s.low_count > s.volume || s.high_count > s.volume {
            return Err(Error::Argument(format!(
                "{} {}: class count exceeds volume",
                s.platform, s.date
            )));
        }
        let points = by_platform.entry(s.platform).or_default();
        if points.last().is_some_and(|last| last.date >= s.date) {
            return Err(Error::Argument(format!(
                "{} series is not strictly increasing at {}",
                s.platform, s.date
            )));
        }
        points.push(FractionPoint {
            date: s.date,
            low_fraction: ratio(s.low_count, s.volume),
            high_fraction: ratio(s.high_count, s.volume),
        });
    }
    Ok(by_platform
        .into_iter()
        .map(|(platform, points)| FractionSeries { platform, points })
        .collect())
}

/// Unweighted mean over days of the per-day fraction for `class`.
pub fn mean_daily_fraction(series: &FractionSeries, class: CredibilityClass) -> Result<f64> {
    let pick: fn(&FractionPoint) -> f64 = match class {
        CredibilityClass::Low => |p| p.low_fraction,
        CredibilityClass::High => |p| p.high_fraction,
        CredibilityClass::Unknown => return Err(Error::Argument("no fraction is tracked for unknown links".into())),
    };
    if series.points.is_empty() {
        return Err(Error::Undefined(format!("mean of an empty {} series", series.platform)));
    }
    Ok(series.points.iter().map(pick).sum::<f64>() / series.points.len() as f64)
}
