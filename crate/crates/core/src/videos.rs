//! Video link enrichment: share counts per video, metadata lookup through a
//! pluggable provider, and top-k ranking.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::credibility::{ClassifiedPost, VideoId};
use crate::error::{Error, Result};
use crate::model::Platform;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoShares {
    pub tweet_shares: u64,
    pub facebook_shares: u64,
}

/// Tweets count once each; Facebook posts contribute their share weight. A
/// post linking the same video several times counts once.
pub fn collect_video_shares<'p>(posts: impl IntoIterator<Item = &'p ClassifiedPost>) -> BTreeMap<VideoId, VideoShares> {
    let mut out: BTreeMap<VideoId, VideoShares> = BTreeMap::new();
    for cp in posts {
        for id in cp.video_ids() {
            let entry = out.entry(id.clone()).or_default();
            match cp.post.platform {
                Platform::Twitter => entry.tweet_shares += 1,
                Platform::Facebook => entry.facebook_shares += cp.post.share_weight,
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoMetadata {
    pub video_id: VideoId,
    pub title: Option<String>,
    pub channel_id: Option<String>,
    pub view_count: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    /// Transport-level failure; the batch may be retried.
    #[error("metadata provider unavailable: {0}")]
    Transport(String),
}

/// Source of video metadata. A successful response that omits a requested
/// ID means the video no longer exists.
pub trait MetadataProvider: Sync {
    fn fetch_batch(&self, ids: &[VideoId]) -> std::result::Result<Vec<VideoMetadata>, ProviderError>;
}

/// Offline provider backed by a `video_id,title,channel_id,view_count` CSV.
#[derive(Debug, Clone, Default)]
pub struct FixtureProvider {
    known: HashMap<VideoId, VideoMetadata>,
}

impl FixtureProvider {
    pub fn new(records: impl IntoIterator<Item = VideoMetadata>) -> Self {
        FixtureProvider {
            known: records.into_iter().map(|m| (m.video_id.clone(), m)).collect(),
        }
    }

    pub fn from_reader(reader: impl Read, source: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            video_id: String,
            title: Option<String>,
            channel_id: Option<String>,
            view_count: Option<String>,
        }
        let mut records = Vec::new();
        for (idx, row) in csv::Reader::from_reader(reader).deserialize::<Row>().enumerate() {
            let line = idx + 2;
            let row = row.map_err(|e| Error::parse(source, line, e.to_string()))?;
            let video_id = row
                .video_id
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(source, line, e.to_string()))?;
            let view_count = match row.view_count.as_deref().map(str::trim) {
                None | Some("") => None,
                Some(v) => Some(
                    v.parse()
                        .map_err(|_| Error::parse(source, line, format!("invalid view_count {v:?}")))?,
                ),
            };
            records.push(VideoMetadata {
                video_id,
                title: row.title.filter(|s| !s.is_empty()),
                channel_id: row.channel_id.filter(|s| !s.is_empty()),
                view_count,
            });
        }
        Ok(FixtureProvider::new(records))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        FixtureProvider::from_reader(file, path)
    }

    pub fn len(&self) -> usize {
        self.known.len()
    }

    pub fn is_empty(&self) -> bool {
        self.known.is_empty()
    }
}

impl MetadataProvider for FixtureProvider {
    fn fetch_batch(&self, ids: &[VideoId]) -> std::result::Result<Vec<VideoMetadata>, ProviderError> {
        Ok(ids.iter().filter_map(|id| self.known.get(id).cloned()).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VideoStatus {
    Available,
    Removed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoRecord {
    pub video_id: VideoId,
    pub status: VideoStatus,
    pub title: Option<String>,
    pub channel_id: Option<String>,
    pub view_count: Option<u64>,
    pub tweet_shares: u64,
    pub facebook_shares: u64,
    /// When the metadata snapshot was taken; view counts drift over time.
    pub fetched_at: DateTime<Utc>,
}

impl VideoRecord {
    pub fn shares(&self, platform: Platform) -> u64 {
        match platform {
            Platform::Twitter => self.tweet_shares,
            Platform::Facebook => self.facebook_shares,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub batch_size: usize,
    pub parallelism: usize,
    pub max_attempts: u32,
    /// Base delay between retries; attempt `n` waits `n * retry_backoff`.
    pub retry_backoff: Duration,
    pub fetched_at: DateTime<Utc>,
}

impl FetchOptions {
    pub fn new(fetched_at: DateTime<Utc>) -> Self {
        FetchOptions {
            batch_size: 50,
            parallelism: 4,
            max_attempts: 3,
            retry_backoff: Duration::from_millis(200),
            fetched_at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("metadata fetch failed for {} video(s) after retries: {last_error}", failed.len())]
pub struct FetchError {
    pub failed: Vec<VideoId>,
    pub last_error: ProviderError,
}

/// Looks up every requested ID. IDs missing from a successful provider
/// response come back as [`VideoStatus::Removed`]; a batch that keeps failing
/// at the transport level fails the whole call rather than being dropped.
/// Share counts in the returned records are zero.
pub fn fetch_metadata(
    ids: &BTreeSet<VideoId>,
    provider: &dyn MetadataProvider,
    options: &FetchOptions,
) -> std::result::Result<BTreeMap<VideoId, VideoRecord>, FetchError> {
    let all: Vec<VideoId> = ids.iter().cloned().collect();
    let batches: Vec<&[VideoId]> = all.chunks(options.batch_size.max(1)).collect();
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();

    std::thread::scope(|s| {
        for _ in 0..options.parallelism.clamp(1, batches.len().max(1)) {
            let tx = tx.clone();
            let (next, batches) = (&next, &batches);
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(batch) = batches.get(i) else { break };
                let result = fetch_with_retry(batch, provider, options);
                if tx.send((i, result)).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);

    let mut found: HashMap<VideoId, VideoMetadata> = HashMap::new();
    let mut failed = Vec::new();
    let mut last_error = None;
    for (i, result) in rx {
        match result {
            Ok(meta) => {
                let requested: BTreeSet<&VideoId> = batches[i].iter().collect();
                found.extend(
                    meta.into_iter()
                        .filter(|m| requested.contains(&m.video_id))
                        .map(|m| (m.video_id.clone(), m)),
                );
            }
            Err(e) => {
                failed.extend(batches[i].iter().cloned());
                last_error = Some(e);
            }
        }
    }
    if let Some(last_error) = last_error {
        failed.sort();
        return Err(FetchError { failed, last_error });
    }

    Ok(all
        .into_iter()
        .map(|id| {
            let record = match found.remove(&id) {
                Some(m) => VideoRecord {
                    video_id: id.clone(),
                    status: VideoStatus::Available,
                    title: m.title,
                    channel_id: m.channel_id,
                    view_count: m.view_count,
                    tweet_shares: 0,
                    facebook_shares: 0,
                    fetched_at: options.fetched_at,
                },
                None => VideoRecord {
                    video_id: id.clone(),
                    status: VideoStatus::Removed,
                    title: None,
                    channel_id: None,
                    view_count: None,
                    tweet_shares: 0,
                    facebook_shares: 0,
                    fetched_at: options.fetched_at,
                },
            };
            (id, record)
        })
        .collect())
}

fn fetch_with_retry(
    batch: &[VideoId],
    provider: &dyn MetadataProvider,
    options: &FetchOptions,
) -> std::result::Result<Vec<VideoMetadata>, ProviderError> {
    let mut attempt = 1;
    loop {
        match provider.fetch_batch(batch) {
            Ok(m) => return Ok(m),
            Err(e) if attempt >= options.max_attempts.max(1) => return Err(e),
            Err(_) => {
                std::thread::sleep(options.retry_backoff * attempt);
                attempt += 1;
            }
        }
    }
}

/// Share counts joined with fetched metadata.
pub fn enrich_videos(
    shares: &BTreeMap<VideoId, VideoShares>,
    provider: &dyn MetadataProvider,
    options: &FetchOptions,
) -> std::result::Result<Vec<VideoRecord>, FetchError> {
    let ids = shares.keys().cloned().collect();
    let mut records = fetch_metadata(&ids, provider, options)?;
    Ok(shares
        .iter()
        .map(|(id, s)| {
            let mut r = records.remove(id).expect("fetch returns every requested id");
            r.tweet_shares = s.tweet_shares;
            r.facebook_shares = s.facebook_shares;
            r
        })
        .collect())
}

/// Top `k` videos by the platform's share count, ties by ascending ID.
pub fn top_videos(records: &[VideoRecord], k: usize, platform: Platform) -> Result<Vec<&VideoRecord>> {
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    let mut ranked: Vec<&VideoRecord> = records.iter().collect();
    ranked.sort_by(|a, b| {
        b.shares(platform)
            .cmp(&a.shares(platform))
            .then_with(|| a.video_id.cmp(&b.video_id))
    });
    ranked.truncate(k);
    Ok(ranked)
}

#[derive(Serialize, Deserialize)]
struct VideoRow {
    video_id: VideoId,
    status: VideoStatus,
    title: Option<String>,
    channel_id: Option<String>,
    view_count: Option<u64>,
    tweet_shares: u64,
    facebook_shares: u64,
    fetched_at: DateTime<Utc>,
}

/// Writes records as CSV, sorted by video ID.
pub fn write_videos_csv(w: impl Write, records: &[VideoRecord]) -> Result<()> {
    let mut sorted: Vec<&VideoRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.video_id.cmp(&b.video_id));
    let mut wtr = csv::Writer::from_writer(w);
    for r in sorted {
        wtr.serialize(VideoRow {
            video_id: r.video_id.clone(),
            status: r.status,
            title: r.title.clone(),
            channel_id: r.channel_id.clone(),
            view_count: r.view_count,
            tweet_shares: r.tweet_shares,
            facebook_shares: r.facebook_shares,
            fetched_at: r.fetched_at,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_videos_csv(r: impl Read) -> Result<Vec<VideoRecord>> {
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(r).deserialize::<VideoRow>() {
        let row = row?;
        if row.status == VideoStatus::Removed
            && (row.title.is_some() || row.channel_id.is_some() || row.view_count.is_some())
        {
            return Err(Error::Argument(format!(
                "removed video {} carries metadata",
                row.video_id
            )));
        }
        out.push(VideoRecord {
            video_id: row.video_id,
            status: row.status,
            title: row.title,
            channel_id: row.channel_id,
            view_count: row.view_count,
            tweet_shares: row.tweet_shares,
            facebook_shares: row.facebook_shares,
            fetched_at: row.fetched_at,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credibility::{Classifier, SourceLists};
    use crate::model::Post;
    use std::sync::atomic::AtomicU32;

    fn vid(s: &str) -> VideoId {
        s.parse().unwrap()
    }

    fn ts() -> DateTime<Utc> {
        "2021-03-18T00:00:00Z".parse().unwrap()
    }

    fn opts() -> FetchOptions {
        FetchOptions {
            retry_backoff: Duration::ZERO,
            batch_size: 2,
            ..FetchOptions::new(ts())
        }
    }

    fn post(platform: Platform, id: &str, weight: u64, urls: &[&str]) -> ClassifiedPost {
        Classifier::new(SourceLists::empty()).classify_post(Post {
            platform,
            post_id: id.into(),
            timestamp: "2021-01-01T00:00:00Z".parse().unwrap(),
            text: String::new(),
            author_id: "a".into(),
            author_location: None,
            share_weight: weight,
            urls: urls.iter().map(|s| s.to_string()).collect(),
        })
    }

    #[test]
    fn shares_per_platform() {
        let posts = [
            post(Platform::Twitter, "1", 1, &["https://youtu.be/kHGtn_vnrJ8"]),
            post(
                Platform::Facebook,
                "2",
                10,
                &[
                    "https://www.youtube.com/watch?v=kHGtn_vnrJ8",
                    "https://youtu.be/kHGtn_vnrJ8",
                ],
            ),
        ];
        let shares = collect_video_shares(&posts);
        assert_eq!(
            shares[&vid("kHGtn_vnrJ8")],
            VideoShares {
                tweet_shares: 1,
                facebook_shares: 10
            }
        );
        assert!(collect_video_shares(&[post(Platform::Twitter, "3", 1, &["https://ansa.it"])]).is_empty());
    }

    fn fixture() -> FixtureProvider {
        FixtureProvider::from_reader(
            "video_id,title,channel_id,view_count\nkHGtn_vnrJ8,Intervista,UC1,450000\nAAAAAAAAAAA,,,\n".as_bytes(),
            Path::new("m.csv"),
        )
        .unwrap()
    }

    #[test]
    fn available_and_removed() {
        let ids: BTreeSet<_> = [vid("kHGtn_vnrJ8"), vid("BBBBBBBBBBB"), vid("AAAAAAAAAAA")].into();
        let got = fetch_metadata(&ids, &fixture(), &opts()).unwrap();
        assert_eq!(got.keys().cloned().collect::<BTreeSet<_>>(), ids);
        let k = &got[&vid("kHGtn_vnrJ8")];
        assert_eq!(k.status, VideoStatus::Available);
        assert_eq!(k.view_count, Some(450_000));
        assert_eq!(k.title.as_deref(), Some("Intervista"));
        assert_eq!(k.fetched_at, ts());
        let gone = &got[&vid("BBBBBBBBBBB")];
        assert_eq!(gone.status, VideoStatus::Removed);
        assert_eq!((gone.title.as_ref(), gone.view_count), (None, None));
        assert_eq!(got[&vid("AAAAAAAAAAA")].status, VideoStatus::Available);
    }

    #[test]
    fn empty_request() {
        assert!(fetch_metadata(&BTreeSet::new(), &fixture(), &opts())
            .unwrap()
            .is_empty());
    }

    struct Flaky {
        failures_left: AtomicU32,
        inner: FixtureProvider,
    }

    impl MetadataProvider for Flaky {
        fn fetch_batch(&self, ids: &[VideoId]) -> std::result::Result<Vec<VideoMetadata>, ProviderError> {
            let left = self.failures_left.load(Ordering::SeqCst);
            if left > 0 {
                self.failures_left.store(left - 1, Ordering::SeqCst);
                return Err(ProviderError::Transport("timeout".into()));
            }
            self.inner.fetch_batch(ids)
        }
    }

    #[test]
    fn transient_failures_are_retried() {
        let p = Flaky {
            failures_left: AtomicU32::new(1),
            inner: fixture(),
        };
        let ids: BTreeSet<_> = [vid("kHGtn_vnrJ8")].into();
        let o = FetchOptions {
            parallelism: 1,
            ..opts()
        };
        let got = fetch_metadata(&ids, &p, &o).unwrap();
        assert_eq!(got[&vid("kHGtn_vnrJ8")].status, VideoStatus::Available);
    }

    #[test]
    fn persistent_failure_is_an_error_not_removed() {
        let p = Flaky {
            failures_left: AtomicU32::new(u32::MAX),
            inner: fixture(),
        };
        let ids: BTreeSet<_> = [vid("kHGtn_vnrJ8"), vid("BBBBBBBBBBB"), vid("CCCCCCCCCCC")].into();
        let err = fetch_metadata(&ids, &p, &opts()).unwrap_err();
        assert_eq!(err.failed.into_iter().collect::<BTreeSet<_>>(), ids);
    }

    struct Chatty;
    impl MetadataProvider for Chatty {
        fn fetch_batch(&self, _: &[VideoId]) -> std::result::Result<Vec<VideoMetadata>, ProviderError> {
            Ok(vec![VideoMetadata {
                video_id: "ZZZZZZZZZZZ".parse().unwrap(),
                title: None,
                channel_id: None,
                view_count: None,
            }])
        }
    }

    #[test]
    fn unrequested_ids_are_ignored() {
        let ids: BTreeSet<_> = [vid("kHGtn_vnrJ8")].into();
        let got = fetch_metadata(&ids, &Chatty, &opts()).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[&vid("kHGtn_vnrJ8")].status, VideoStatus::Removed);
    }

    fn record(id: &str, tw: u64, fb: u64) -> VideoRecord {
        VideoRecord {
            video_id: vid(id),
            status: VideoStatus::Available,
            title: None,
            channel_id: None,
            view_count: None,
            tweet_shares: tw,
            facebook_shares: fb,
            fetched_at: ts(),
        }
    }

    #[test]
    fn ranking() {
        let recs = vec![
            record("AAAAAAAAAAA", 5, 1),
            record("BBBBBBBBBBB", 3, 9),
            record("CCCCCCCCCCC", 5, 0),
        ];
        let ids = |v: Vec<&VideoRecord>| v.iter().map(|r| r.video_id.to_string()).collect::<Vec<_>>();
        assert_eq!(ids(top_videos(&recs, 1, Platform::Twitter).unwrap()), ["AAAAAAAAAAA"]);
        assert_eq!(
            ids(top_videos(&recs, 20, Platform::Twitter).unwrap()),
            ["AAAAAAAAAAA", "CCCCCCCCCCC", "BBBBBBBBBBB"]
        );
        assert_eq!(
            ids(top_videos(&recs, 2, Platform::Facebook).unwrap()),
            ["BBBBBBBBBBB", "AAAAAAAAAAA"]
        );
        assert!(top_videos(&recs, 0, Platform::Twitter).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let mut removed = record("BBBBBBBBBBB", 3, 9);
        removed.status = VideoStatus::Removed;
        let mut available = record("AAAAAAAAAAA", 1, 2);
        available.title = Some("Titolo, con virgola".into());
        available.view_count = Some(7);
        let recs = vec![removed, available];
        let mut buf = Vec::new();
        write_videos_csv(&mut buf, &recs).unwrap();
        let back = read_videos_csv(buf.as_slice()).unwrap();
        assert_eq!(back, vec![recs[1].clone(), recs[0].clone()]);
    }
}
