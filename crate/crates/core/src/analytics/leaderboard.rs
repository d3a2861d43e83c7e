//! Per-domain share tallies and the ranked source leaderboard.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stats::{spearman, Correlation};
use super::volume::post_weight;
use crate::credibility::{ClassifiedPost, SourceList};
use crate::error::{Error, Result};
use crate::model::{CredibilityClass, Platform};

/// Name of the row aggregating every low-credibility domain.
pub const ALL_LOW_CREDIBILITY: &str = "ALL_LOW_CREDIBILITY";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub rank: usize,
    pub name: String,
    pub class: CredibilityClass,
    pub twitter_shares: u64,
    pub facebook_shares: u64,
    pub is_pseudo: bool,
}

impl LeaderboardEntry {
    pub fn shares(&self, platform: Platform) -> u64 {
        match platform {
            Platform::Twitter => self.twitter_shares,
            Platform::Facebook => self.facebook_shares,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub twitter: u64,
    pub facebook: u64,
}

impl Tally {
    pub fn get(&self, platform: Platform) -> u64 {
        match platform {
            Platform::Twitter => self.twitter,
            Platform::Facebook => self.facebook,
        }
    }
}

/// Shares per listed domain, keyed by domain. A post counts once toward each
/// distinct domain it links, weighted as in the daily volume. Only domains
/// seen at least once appear.
pub fn domain_tallies(posts: &[ClassifiedPost]) -> BTreeMap<String, (CredibilityClass, Tally)> {
    let mut out: BTreeMap<String, (CredibilityClass, Tally)> = BTreeMap::new();
    for p in posts {
        let w = post_weight(p);
        for class in [CredibilityClass::Low, CredibilityClass::High] {
            for domain in p.domains_of(class) {
                let (_, t) = out.entry(domain.to_owned()).or_insert((class, Tally::default()));
                match p.post.platform {
                    Platform::Twitter => t.twitter += w,
                    Platform::Facebook => t.facebook += w,
                }
            }
        }
    }
    out
}

/// The top `k` domains by `platform` shares (ties by name), plus the
/// [`ALL_LOW_CREDIBILITY`] row placed at the rank its own total earns.
/// Pass `usize::MAX` for the full ranking.
pub fn build_leaderboard(posts: &[ClassifiedPost], k: usize, platform: Platform) -> Result<Vec<LeaderboardEntry>> {
    if k == 0 {
        return Err(Error::Argument("leaderboard size k must be at least 1".into()));
    }
    let tallies = domain_tallies(posts);
    let mut pseudo = Tally::default();
    for (class, t) in tallies.values() {
        if *class == CredibilityClass::Low {
            pseudo.twitter += t.twitter;
            pseudo.facebook += t.facebook;
        }
    }
    let entry = |name: &str, class, t: &Tally, is_pseudo| LeaderboardEntry {
        rank: 0,
        name: name.to_owned(),
        class,
        twitter_shares: t.twitter,
        facebook_shares: t.facebook,
        is_pseudo,
    };
    let mut rows: Vec<LeaderboardEntry> = tallies
        .iter()
        .map(|(name, (class, t))| entry(name, *class, t, false))
        .collect();
    rows.sort_by(|a, b| rank_key(a, platform).cmp(&rank_key(b, platform)));
    rows.truncate(k);

    let pseudo = entry(ALL_LOW_CREDIBILITY, CredibilityClass::Low, &pseudo, true);
    let at = rows.partition_point(|r| rank_key(r, platform) < rank_key(&pseudo, platform));
    rows.insert(at, pseudo);
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(rows)
}

fn rank_key(e: &LeaderboardEntry, platform: Platform) -> (Reverse<u64>, &str) {
    (Reverse(e.shares(platform)), e.name.as_str())
}

/// Cuts a full ranking down to `k` domain rows, keeping the pseudo-entry.
pub fn truncate_leaderboard(full: &[LeaderboardEntry], k: usize) -> Vec<LeaderboardEntry> {
    let mut domains = 0;
    let mut out: Vec<LeaderboardEntry> = full
        .iter()
        .filter(|e| {
            if e.is_pseudo {
                return true;
            }
            domains += 1;
            domains <= k
        })
        .cloned()
        .collect();
    for (i, r) in out.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    out
}

/// Spearman correlation between the Twitter and Facebook tallies of the
/// domains on `list`, over those seen on at least one platform.
pub fn cross_platform_source_correlation(posts: &[ClassifiedPost], list: &SourceList) -> Result<Correlation> {
    let tallies = domain_tallies(posts);
    let (tw, fb): (Vec<f64>, Vec<f64>) = tallies
        .iter()
        .filter(|(name, (_, t))| list.contains(name) && t.twitter + t.facebook > 0)
        .map(|(_, (_, t))| (t.twitter as f64, t.facebook as f64))
        .unzip();
    if tw.len() < 3 {
        return Err(Error::Argument(format!(
            "need at least 3 {} domains with shares, found {}",
            list.label(),
            tw.len()
        )));
    }
    spearman(&tw, &fb)
}
