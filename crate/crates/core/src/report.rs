//! Report snapshots: the set of aggregate files written by one aggregation
//! run, and their loading and verification.
//!
//! A snapshot directory holds one file per figure analogue plus
//! `manifest.json`, which is written last and records a SHA-256 digest of
//! every other file. A directory counts as complete only when its manifest
//! is present and every digest matches.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytics::{
    build_leaderboard, credibility_fractions, cross_platform_source_correlation, daily_volume, mean_daily_fraction,
    region_stats, users_vs_population_correlation, Correlation, FractionPoint, FractionSeries, LeaderboardEntry,
    RegionOptions, RegionStat,
};
use crate::credibility::{ClassifiedPost, SourceLists};
use crate::error::{Error, Result};
use crate::geolocate::{Gazetteer, GeoResolution};
use crate::model::{CredibilityClass, DailyStat, DateWindow, Platform, VaccineRecord};
use crate::videos::{read_videos_csv, write_videos_csv, VideoRecord};

pub const MANIFEST: &str = "manifest.json";
pub const VOLUME_CSV: &str = "volume.csv";
pub const CREDIBILITY_CSV: &str = "credibility.csv";
pub const LEADERBOARD_CSV: &str = "leaderboard.csv";
pub const REGIONS_CSV: &str = "regions.csv";
pub const USERS_CSV: &str = "users.csv";
pub const VIDEOS_CSV: &str = "videos.csv";
pub const CORRELATIONS_JSON: &str = "correlations.json";

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    /// Digest over the rest of the manifest, so it changes whenever any
    /// report file or the metadata changes.
    pub snapshot_id: String,
    pub generated_at: DateTime<Utc>,
    pub keyword_version: Option<NaiveDate>,
    pub window: Option<DateWindow>,
    pub posts: BTreeMap<Platform, u64>,
    /// File name to lowercase hex SHA-256.
    pub files: BTreeMap<String, String>,
}

/// A statistic that may be undefined on a given corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub result: Option<Correlation>,
    pub error: Option<String>,
}

impl From<Result<Correlation>> for Outcome {
    fn from(r: Result<Correlation>) -> Self {
        match r {
            Ok(c) => Outcome {
                result: Some(c),
                error: None,
            },
            Err(e) => Outcome {
                result: None,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFractions {
    pub low: Option<f64>,
    pub high: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlations {
    /// Spearman over low-credibility domain tallies, Twitter against Facebook.
    pub cross_platform_low_sources: Outcome,
    /// Pearson over located users against region population.
    pub users_vs_population: Outcome,
    pub mean_daily_fractions: BTreeMap<Platform, MeanFractions>,
    pub users_with_location: u64,
    pub users_geolocated: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub manifest: Manifest,
    pub volume: Vec<DailyStat>,
    pub fractions: Vec<FractionSeries>,
    /// Full ranking per platform, pseudo-entry included.
    pub leaderboards: BTreeMap<Platform, Vec<LeaderboardEntry>>,
    pub regions: Vec<RegionStat>,
    pub users: Vec<GeoResolution>,
    pub videos: Vec<VideoRecord>,
    pub correlations: Correlations,
}

pub struct ReportInputs<'a> {
    pub posts: &'a [ClassifiedPost],
    pub lists: &'a SourceLists,
    pub resolutions: &'a BTreeMap<String, GeoResolution>,
    pub gazetteer: &'a Gazetteer,
    pub doses: &'a [VaccineRecord],
    pub videos: &'a [VideoRecord],
    /// Analysis window; defaults to the span of the posts.
    pub window: Option<DateWindow>,
    pub keyword_version: Option<NaiveDate>,
    pub generated_at: DateTime<Utc>,
    pub pooled_regions: bool,
}

/// Runs every aggregate over the inputs. Posts outside the window are
/// ignored throughout, and dose totals cover the same window.
pub fn build_snapshot(inputs: &ReportInputs<'_>) -> Result<(Snapshot, Vec<String>)> {
    let window = inputs.window.or_else(|| crate::analytics::corpus_span(inputs.posts));
    let posts: Vec<ClassifiedPost> = inputs
        .posts
        .iter()
        .filter(|p| window.is_none_or(|w| w.contains(p.post.date())))
        .cloned()
        .collect();

    let volume = daily_volume(&posts, window);
    let fractions = credibility_fractions(&volume)?;
    let mut leaderboards = BTreeMap::new();
    for platform in Platform::ALL {
        leaderboards.insert(platform, build_leaderboard(&posts, usize::MAX, platform)?);
    }
    let region_report = region_stats(
        inputs.resolutions,
        &posts,
        inputs.doses,
        inputs.gazetteer,
        &RegionOptions {
            window,
            pooled: inputs.pooled_regions,
        },
    );

    let mean_daily_fractions = fractions
        .iter()
        .map(|s| {
            let m = MeanFractions {
                low: mean_daily_fraction(s, CredibilityClass::Low).ok(),
                high: mean_daily_fraction(s, CredibilityClass::High).ok(),
            };
            (s.platform, m)
        })
        .collect();
    let correlations = Correlations {
        cross_platform_low_sources: cross_platform_source_correlation(&posts, inputs.lists.low()).into(),
        users_vs_population: users_vs_population_correlation(inputs.resolutions, inputs.gazetteer).into(),
        mean_daily_fractions,
        users_with_location: inputs.resolutions.len() as u64,
        users_geolocated: inputs.resolutions.values().filter(|r| r.is_resolved()).count() as u64,
    };

    let mut counts: BTreeMap<Platform, u64> = Platform::ALL.iter().map(|&p| (p, 0)).collect();
    for p in &posts {
        *counts.entry(p.post.platform).or_default() += 1;
    }
    let mut videos = inputs.videos.to_vec();
    videos.sort_by(|a, b| a.video_id.cmp(&b.video_id));

    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        snapshot_id: String::new(),
        generated_at: inputs.generated_at,
        keyword_version: inputs.keyword_version,
        window,
        posts: counts,
        files: BTreeMap::new(),
    };
    let snapshot = Snapshot {
        manifest,
        volume,
        fractions,
        leaderboards,
        regions: region_report.stats,
        users: inputs.resolutions.values().cloned().collect(),
        videos,
        correlations,
    };
    Ok((snapshot, region_report.diagnostics))
}

#[derive(Serialize, Deserialize)]
struct FractionRow {
    date: NaiveDate,
    platform: Platform,
    low_fraction: f64,
    high_fraction: f64,
}

#[derive(Serialize, Deserialize)]
struct LeaderboardRow {
    platform: Platform,
    rank: usize,
    name: String,
    class: CredibilityClass,
    twitter_shares: u64,
    facebook_shares: u64,
    is_pseudo: bool,
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>, header: &[&str]) -> Result<Vec<u8>> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    wtr.write_record(header)?;
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.into_inner().map_err(|e| Error::Stream(e.into_error()))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Snapshot {
    /// Serialized report files, keyed by file name, excluding the manifest.
    pub fn render_files(&self) -> Result<BTreeMap<&'static str, Vec<u8>>> {
        let mut files = BTreeMap::new();
        files.insert(
            VOLUME_CSV,
            csv_bytes(&self.volume, &["date", "platform", "volume", "low_count", "high_count"])?,
        );
        let fraction_rows = self.fractions.iter().flat_map(|s| {
            s.points.iter().map(|p| FractionRow {
                date: p.date,
                platform: s.platform,
                low_fraction: p.low_fraction,
                high_fraction: p.high_fraction,
            })
        });
        files.insert(
            CREDIBILITY_CSV,
            csv_bytes(fraction_rows, &["date", "platform", "low_fraction", "high_fraction"])?,
        );
        let board_rows = self.leaderboards.iter().flat_map(|(platform, entries)| {
            entries.iter().map(|e| LeaderboardRow {
                platform: *platform,
                rank: e.rank,
                name: e.name.clone(),
                class: e.class,
                twitter_shares: e.twitter_shares,
                facebook_shares: e.facebook_shares,
                is_pseudo: e.is_pseudo,
            })
        });
        files.insert(
            LEADERBOARD_CSV,
            csv_bytes(
                board_rows,
                &[
                    "platform",
                    "rank",
                    "name",
                    "class",
                    "twitter_shares",
                    "facebook_shares",
                    "is_pseudo",
                ],
            )?,
        );
        files.insert(
            REGIONS_CSV,
            csv_bytes(
                &self.regions,
                &[
                    "region_code",
                    "users_located",
                    "mean_user_low_fraction",
                    "total_doses",
                    "population",
                    "doses_per_million",
                ],
            )?,
        );
        files.insert(
            USERS_CSV,
            csv_bytes(
                &self.users,
                &["user_id", "location", "matched_name", "matched_kind", "region_code"],
            )?,
        );
        let mut videos = Vec::new();
        write_videos_csv(&mut videos, &self.videos)?;
        files.insert(VIDEOS_CSV, videos);
        let mut corr = serde_json::to_vec_pretty(&self.correlations)?;
        corr.push(b'\n');
        files.insert(CORRELATIONS_JSON, corr);
        Ok(files)
    }

    /// Fills in file digests and the snapshot ID from the rendered files.
    fn seal(&mut self, files: &BTreeMap<&'static str, Vec<u8>>) -> Result<()> {
        self.manifest.files = files
            .iter()
            .map(|(name, bytes)| (name.to_string(), sha256_hex(bytes)))
            .collect();
        self.manifest.snapshot_id = String::new();
        self.manifest.snapshot_id = sha256_hex(&serde_json::to_vec(&self.manifest)?);
        Ok(())
    }

    /// Writes every report file into `dir`, then the manifest. Returns the
    /// snapshot ID.
    pub fn write_to(&mut self, dir: &Path) -> Result<String> {
        let files = self.render_files()?;
        self.seal(&files)?;
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let stale = dir.join(MANIFEST);
        if stale.exists() {
            fs::remove_file(&stale).map_err(|e| Error::io(&stale, e))?;
        }
        for (name, bytes) in &files {
            write_file(&dir.join(name), bytes)?;
        }
        let mut manifest = serde_json::to_vec_pretty(&self.manifest)?;
        manifest.push(b'\n');
        let tmp = dir.join(".manifest.json.tmp");
        write_file(&tmp, &manifest)?;
        fs::rename(&tmp, dir.join(MANIFEST)).map_err(|e| Error::io(dir, e))?;
        Ok(self.manifest.snapshot_id.clone())
    }

    /// Loads a snapshot directory, verifying every digest in its manifest.
    pub fn load(dir: &Path) -> Result<Snapshot> {
        let manifest = read_manifest(dir)?;
        let bad = |message: String| Error::Snapshot {
            path: dir.to_path_buf(),
            message,
        };
        if manifest.format_version != FORMAT_VERSION {
            return Err(bad(format!("unsupported format version {}", manifest.format_version)));
        }
        let mut sealed = manifest.clone();
        sealed.snapshot_id = String::new();
        if sha256_hex(&serde_json::to_vec(&sealed)?) != manifest.snapshot_id {
            return Err(bad("manifest does not match its snapshot id".into()));
        }
        let mut files = BTreeMap::new();
        for name in [
            VOLUME_CSV,
            CREDIBILITY_CSV,
            LEADERBOARD_CSV,
            REGIONS_CSV,
            USERS_CSV,
            VIDEOS_CSV,
            CORRELATIONS_JSON,
        ] {
            let expected = manifest
                .files
                .get(name)
                .ok_or_else(|| bad(format!("manifest lists no {name}")))?;
            let path = dir.join(name);
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            if &sha256_hex(&bytes) != expected {
                return Err(bad(format!("{name} does not match its manifest digest")));
            }
            files.insert(name, bytes);
        }

        let volume: Vec<DailyStat> = read_csv(&files[VOLUME_CSV])?;
        let mut fractions: BTreeMap<Platform, Vec<FractionPoint>> = BTreeMap::new();
        for row in read_csv::<FractionRow>(&files[CREDIBILITY_CSV])? {
            fractions.entry(row.platform).or_default().push(FractionPoint {
                date: row.date,
                low_fraction: row.low_fraction,
                high_fraction: row.high_fraction,
            });
        }
        let mut leaderboards: BTreeMap<Platform, Vec<LeaderboardEntry>> = BTreeMap::new();
        for row in read_csv::<LeaderboardRow>(&files[LEADERBOARD_CSV])? {
            leaderboards.entry(row.platform).or_default().push(LeaderboardEntry {
                rank: row.rank,
                name: row.name,
                class: row.class,
                twitter_shares: row.twitter_shares,
                facebook_shares: row.facebook_shares,
                is_pseudo: row.is_pseudo,
            });
        }
        Ok(Snapshot {
            manifest,
            volume,
            fractions: fractions
                .into_iter()
                .map(|(platform, points)| FractionSeries { platform, points })
                .collect(),
            leaderboards,
            regions: read_csv(&files[REGIONS_CSV])?,
            users: read_csv(&files[USERS_CSV])?,
            videos: read_videos_csv(files[VIDEOS_CSV].as_slice())?,
            correlations: serde_json::from_slice(&files[CORRELATIONS_JSON])?,
        })
    }

    pub fn id(&self) -> &str {
        &self.manifest.snapshot_id
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))?;
    f.sync_all().map_err(|e| Error::io(path, e))
}

fn read_csv<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<Vec<T>> {
    csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(Error::from)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Snapshot {
        path: dir.to_path_buf(),
        message: format!("unreadable manifest: {e}"),
    })
}

/// Snapshot directories under `root`, newest first by `generated_at` then
/// directory name. `root` itself is the only candidate if it holds a
/// manifest. Directories without a readable manifest are skipped.
pub fn snapshot_candidates(root: &Path) -> Result<Vec<(PathBuf, Manifest)>> {
    if root.join(MANIFEST).is_file() {
        return Ok(read_manifest(root)
            .map(|m| vec![(root.to_path_buf(), m)])
            .unwrap_or_default());
    }
    let mut out = Vec::new();
    for entry in fs::read_dir(root).map_err(|e| Error::io(root, e))? {
        let path = entry.map_err(|e| Error::io(root, e))?.path();
        if path.is_dir() {
            if let Ok(m) = read_manifest(&path) {
                out.push((path, m));
            }
        }
    }
    out.sort_by(|a, b| (b.1.generated_at, &b.0).cmp(&(a.1.generated_at, &a.0)));
    Ok(out)
}

/// The newest snapshot under `root` that verifies completely.
pub fn load_latest_snapshot(root: &Path) -> Result<Snapshot> {
    let mut last_err = None;
    for (dir, _) in snapshot_candidates(root)? {
        match Snapshot::load(&dir) {
            Ok(s) => return Ok(s),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Snapshot {
        path: root.to_path_buf(),
        message: "no snapshot with a manifest found".into(),
    }))
}
