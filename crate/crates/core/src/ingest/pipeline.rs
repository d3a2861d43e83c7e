use std::io::{BufReader, Read, Write};
use std::sync::mpsc::{sync_channel, Receiver, SyncSender};
use std::thread;

use serde::Serialize;

use super::filter::{filter_stream, FilterStats};
use super::keywords::KeywordTimeline;
use super::{store, FacebookFeed, FeedOptions, Reject, Rejects, TwitterFeed};
use crate::error::{Error, Result};
use crate::model::{Platform, Post};

const CHANNEL_DEPTH: usize = 1024;

#[derive(Debug, Clone, Serialize)]
pub struct IngestSummary {
    pub platform: Platform,
    pub parsed: u64,
    pub rejected: u64,
    pub passed: u64,
    pub dropped: u64,
    pub reject_samples: Vec<Reject>,
}

/// Parses a feed, filters it by keyword and writes the passing posts as
/// NDJSON to `out`.
///
/// Parsing and filtering run on their own threads, connected to the writer
/// by bounded channels so order is preserved end to end.
pub fn run_ingest<R, W>(
    platform: Platform,
    input: R,
    keywords: &KeywordTimeline,
    options: FeedOptions,
    out: W,
) -> Result<IngestSummary>
where
    R: Read + Send,
    W: Write,
{
    let (parsed_tx, parsed_rx) = sync_channel::<Result<Post>>(CHANNEL_DEPTH);
    let (kept_tx, kept_rx) = sync_channel::<Result<Post>>(CHANNEL_DEPTH);

    thread::scope(|s| {
        let parser = s.spawn(move || parse_stage(platform, input, options, parsed_tx));
        let filter = s.spawn(move || filter_stage(parsed_rx, keywords, kept_tx));
        let written = write_stage(kept_rx, out);

        let (parsed, rejects) = parser.join().expect("parser thread panicked");
        let stats = filter.join().expect("filter thread panicked");
        written?;
        Ok(IngestSummary {
            platform,
            parsed,
            rejected: rejects.count(),
            passed: stats.passed,
            dropped: stats.dropped,
            reject_samples: rejects.samples().to_vec(),
        })
    })
}

fn parse_stage<R: Read>(
    platform: Platform,
    input: R,
    options: FeedOptions,
    tx: SyncSender<Result<Post>>,
) -> (u64, Rejects) {
    let mut parsed = 0;
    macro_rules! drain {
        ($feed:expr) => {{
            let mut feed = $feed;
            for item in feed.by_ref() {
                parsed += item.is_ok() as u64;
                if tx.send(item).is_err() {
                    break;
                }
            }
            feed.rejects().clone()
        }};
    }
    let rejects = match platform {
        Platform::Twitter => drain!(TwitterFeed::new(BufReader::new(input), options)),
        Platform::Facebook => drain!(FacebookFeed::new(input, options)),
    };
    (parsed, rejects)
}

fn filter_stage(rx: Receiver<Result<Post>>, keywords: &KeywordTimeline, tx: SyncSender<Result<Post>>) -> FilterStats {
    let mut failure: Option<Error> = None;
    let posts = rx.iter().map_while(|item| match item {
        Ok(p) => Some(p),
        Err(e) => {
            failure = Some(e);
            None
        }
    });
    let mut filtered = filter_stream(posts, keywords);
    for post in filtered.by_ref() {
        if tx.send(Ok(post)).is_err() {
            break;
        }
    }
    let stats = filtered.stats();
    if let Some(e) = failure {
        let _ = tx.send(Err(e));
    }
    stats
}

fn write_stage<W: Write>(rx: Receiver<Result<Post>>, out: W) -> Result<()> {
    let mut out = std::io::BufWriter::new(out);
    for item in rx {
        store::write_post(&mut out, &item?)?;
    }
    out.flush()?;
    Ok(())
}
