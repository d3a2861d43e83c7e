//! Pipeline stages behind the `infodemic` command, usable from tests and
//! other binaries.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{DateTime, NaiveDate, NaiveTime, Utc};
use infodemic_core::analytics::{corpus_span, load_vaccine_records};
use infodemic_core::ingest::{run_ingest, store, FeedOptions, IngestSummary};
use infodemic_core::report::{build_snapshot, ReportInputs};
use infodemic_core::videos::{
    collect_video_shares, enrich_videos, read_videos_csv, write_videos_csv, FetchOptions, FixtureProvider, VideoStatus,
};
use infodemic_core::{
    geolocate_users, Classifier, DateWindow, Gazetteer, KeywordSet, KeywordTimeline, Platform, RedirectMap, SourceLists,
};
use serde::Serialize;

pub fn load_keywords(path: Option<&Path>) -> Result<KeywordTimeline> {
    Ok(match path {
        Some(p) => KeywordTimeline::load(p)?,
        None => KeywordTimeline::single(KeywordSet::vaccine_defaults()),
    })
}

fn keyword_version(timeline: &KeywordTimeline) -> Option<NaiveDate> {
    Some(timeline.latest().version_date()).filter(|d| *d != NaiveDate::MIN)
}

fn classifier(lists: SourceLists, redirects: Option<&Path>) -> Result<Classifier> {
    let c = Classifier::new(lists);
    Ok(match redirects {
        Some(p) => c.with_redirects(RedirectMap::load(p)?),
        None => c,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Parses one platform feed, keeps keyword matches and writes them as NDJSON.
pub fn ingest(
    platform: Platform,
    input: &Path,
    keywords: &KeywordTimeline,
    window: Option<DateWindow>,
    out: &Path,
) -> Result<IngestSummary> {
    let file = File::open(input).with_context(|| format!("opening {}", input.display()))?;
    let summary = run_ingest(platform, file, keywords, FeedOptions { window }, create(out)?)
        .with_context(|| format!("ingesting {}", input.display()))?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct EnrichSummary {
    pub videos: usize,
    pub available: usize,
    pub removed: usize,
}

/// Collects YouTube links from stored posts, looks them up in a metadata
/// fixture and writes the video table.
pub fn enrich(
    posts: &[PathBuf],
    metadata: &Path,
    redirects: Option<&Path>,
    fetched_at: DateTime<Utc>,
    out: &Path,
) -> Result<EnrichSummary> {
    let corpus = store::load_corpus(posts)?;
    let c = classifier(SourceLists::empty(), redirects)?;
    let classified: Vec<_> = corpus.into_iter().map(|p| c.classify_post(p)).collect();
    let shares = collect_video_shares(&classified);
    let provider = FixtureProvider::load(metadata)?;
    let records = enrich_videos(&shares, &provider, &FetchOptions::new(fetched_at))?;
    let mut w = create(out)?;
    write_videos_csv(&mut w, &records)?;
    let removed = records.iter().filter(|r| r.status == VideoStatus::Removed).count();
    Ok(EnrichSummary {
        videos: records.len(),
        available: records.len() - removed,
        removed,
    })
}

#[derive(Debug, Clone)]
pub struct AggregateConfig {
    pub posts: Vec<PathBuf>,
    pub low: PathBuf,
    pub high: PathBuf,
    pub gazetteer: PathBuf,
    pub doses: PathBuf,
    pub videos: Option<PathBuf>,
    pub redirects: Option<PathBuf>,
    pub keywords: Option<PathBuf>,
    pub window: Option<DateWindow>,
    /// Report timestamp; defaults to the last second of the analysis window.
    pub as_of: Option<DateTime<Utc>>,
    pub pooled_regions: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateSummary {
    pub snapshot_id: String,
    pub out: PathBuf,
    pub posts: usize,
    pub users_with_location: usize,
    pub users_geolocated: usize,
    pub diagnostics: Vec<String>,
}

pub fn end_of_day(d: NaiveDate) -> DateTime<Utc> {
    d.and_time(NaiveTime::from_hms_opt(23, 59, 59).expect("valid time"))
        .and_utc()
}

/// Classifies, geolocates and aggregates stored posts into a report
/// snapshot in `out`.
pub fn aggregate(cfg: &AggregateConfig, out: &Path) -> Result<AggregateSummary> {
    let lists = SourceLists::load(&cfg.low, &cfg.high)?;
    let c = classifier(lists.clone(), cfg.redirects.as_deref())?;
    let corpus = store::load_corpus(&cfg.posts)?;
    let gazetteer = Gazetteer::load(&cfg.gazetteer)?;
    let resolutions = geolocate_users(&corpus, &gazetteer);
    let classified: Vec<_> = corpus.into_iter().map(|p| c.classify_post(p)).collect();
    let doses = load_vaccine_records(&cfg.doses)?;
    let videos = match &cfg.videos {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            read_videos_csv(f).with_context(|| format!("reading {}", p.display()))?
        }
        None => Vec::new(),
    };
    let keyword_version = match &cfg.keywords {
        Some(p) => keyword_version(&KeywordTimeline::load(p)?),
        None => None,
    };
    let window = cfg.window.or_else(|| corpus_span(&classified));
    let generated_at = cfg
        .as_of
        .or_else(|| window.map(|w| end_of_day(w.end)))
        .unwrap_or(DateTime::UNIX_EPOCH);

    let (mut snapshot, diagnostics) = build_snapshot(&ReportInputs {
        posts: &classified,
        lists: &lists,
        resolutions: &resolutions,
        gazetteer: &gazetteer,
        doses: &doses,
        videos: &videos,
        window,
        keyword_version,
        generated_at,
        pooled_regions: cfg.pooled_regions,
    })?;
    for d in &diagnostics {
        tracing::warn!("{d}");
    }
    let snapshot_id = snapshot.write_to(out)?;
    Ok(AggregateSummary {
        snapshot_id,
        out: out.to_path_buf(),
        posts: classified.len(),
        users_with_location: resolutions.len(),
        users_geolocated: resolutions.values().filter(|r| r.is_resolved()).count(),
        diagnostics,
    })
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub twitter: PathBuf,
    pub facebook: PathBuf,
    pub keywords: Option<PathBuf>,
    pub low: PathBuf,
    pub high: PathBuf,
    pub gazetteer: PathBuf,
    pub doses: PathBuf,
    pub metadata: PathBuf,
    pub redirects: Option<PathBuf>,
    pub window: Option<DateWindow>,
    pub as_of: Option<DateTime<Utc>>,
    /// Directory for intermediate post and video files.
    pub work: PathBuf,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub twitter: IngestSummary,
    pub facebook: IngestSummary,
    pub videos: EnrichSummary,
    pub aggregate: AggregateSummary,
}

/// Ingest both feeds, enrich videos, aggregate. Every timestamp written
/// derives from `as_of` or the data, so reruns are byte-identical.
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    let keywords = load_keywords(cfg.keywords.as_deref())?;
    let tw_posts = cfg.work.join("twitter.ndjson");
    let fb_posts = cfg.work.join("facebook.ndjson");
    let twitter = ingest(Platform::Twitter, &cfg.twitter, &keywords, cfg.window, &tw_posts)?;
    let facebook = ingest(Platform::Facebook, &cfg.facebook, &keywords, cfg.window, &fb_posts)?;

    let posts = vec![tw_posts, fb_posts];
    let corpus_end = {
        let corpus = store::load_corpus(&posts)?;
        corpus.iter().map(|p| p.date()).max()
    };
    let as_of = cfg
        .as_of
        .or_else(|| cfg.window.map(|w| end_of_day(w.end)))
        .or_else(|| corpus_end.map(end_of_day))
        .unwrap_or(DateTime::UNIX_EPOCH);

    let videos_csv = cfg.work.join("videos.csv");
    let videos = enrich(&posts, &cfg.metadata, cfg.redirects.as_deref(), as_of, &videos_csv)?;
    let aggregate = aggregate(
        &AggregateConfig {
            posts,
            low: cfg.low.clone(),
            high: cfg.high.clone(),
            gazetteer: cfg.gazetteer.clone(),
            doses: cfg.doses.clone(),
            videos: Some(videos_csv),
            redirects: cfg.redirects.clone(),
            keywords: cfg.keywords.clone(),
            window: cfg.window,
            as_of: Some(as_of),
            pooled_regions: false,
        },
        &cfg.out,
    )?;
    Ok(RunSummary {
        twitter,
        facebook,
        videos,
        aggregate,
    })
}
