use std::collections::HashSet;
use std::io::BufRead;

use serde::Deserialize;

use super::{parse_timestamp, FeedOptions, Rejects};
use crate::credibility::extract_urls;
use crate::error::Result;
use crate::model::{Platform, Post};

#[derive(Deserialize)]
#[serde(untagged)]
enum Id {
    Str(String),
    Num(u64),
}

impl Id {
    fn into_string(self) -> String {
        match self {
            Id::Str(s) => s,
            Id::Num(n) => n.to_string(),
        }
    }
}

#[derive(Deserialize)]
struct User {
    id: Option<Id>,
    id_str: Option<String>,
    location: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum UrlEntity {
    Plain(String),
    Entity {
        url: Option<String>,
        expanded_url: Option<String>,
    },
}

impl UrlEntity {
    fn into_url(self) -> Option<String> {
        match self {
            UrlEntity::Plain(s) => Some(s),
            UrlEntity::Entity { url, expanded_url } => expanded_url.or(url),
        }
    }
}

#[derive(Deserialize)]
struct Entities {
    #[serde(default)]
    urls: Vec<UrlEntity>,
}

#[derive(Deserialize)]
struct Record {
    id: Option<Id>,
    id_str: Option<String>,
    created_at: Option<String>,
    text: Option<String>,
    full_text: Option<String>,
    user: Option<User>,
    entities: Option<Entities>,
    urls: Option<Vec<UrlEntity>>,
}

/// Newline-delimited JSON tweets (filter-stream records or the fixture
/// schema) as a stream of posts. Malformed lines are counted in
/// [`TwitterFeed::rejects`]; only I/O failures end the stream with an error.
pub struct TwitterFeed<R> {
    reader: R,
    options: FeedOptions,
    line: usize,
    buf: String,
    seen: HashSet<String>,
    rejects: Rejects,
    failed: bool,
}

impl<R: BufRead> TwitterFeed<R> {
    pub fn new(reader: R, options: FeedOptions) -> Self {
        TwitterFeed {
            reader,
            options,
            line: 0,
            buf: String::new(),
            seen: HashSet::new(),
            rejects: Rejects::default(),
            failed: false,
        }
    }

    pub fn rejects(&self) -> &Rejects {
        &self.rejects
    }

    fn convert(&mut self, raw: &str) -> std::result::Result<Post, String> {
        let record: Record = serde_json::from_str(raw).map_err(|e| format!("invalid record: {e}"))?;
        let post_id = record
            .id_str
            .or_else(|| record.id.map(Id::into_string))
            .filter(|id| !id.trim().is_empty())
            .ok_or("missing id")?;
        let created_at = record.created_at.ok_or("missing created_at")?;
        let timestamp = parse_timestamp(&created_at).ok_or_else(|| format!("unparseable created_at {created_at:?}"))?;
        let text = record.full_text.or(record.text).ok_or("missing text")?;
        let user = record.user.ok_or("missing user")?;
        let author_id = user
            .id_str
            .or_else(|| user.id.map(Id::into_string))
            .filter(|id| !id.trim().is_empty())
            .ok_or("missing user.id")?;
        if let Some(window) = &self.options.window {
            if !window.contains(timestamp.date_naive()) {
                return Err(format!("created_at {created_at} outside collection window"));
            }
        }

        let entity_urls = record
            .entities
            .map(|e| e.urls)
            .or(record.urls)
            .map(|urls| urls.into_iter().filter_map(UrlEntity::into_url).collect());
        let urls = entity_urls.unwrap_or_else(|| extract_urls(&text));

        if !self.seen.insert(post_id.clone()) {
            return Err(format!("duplicate id {post_id}"));
        }
        Ok(Post {
            platform: Platform::Twitter,
            post_id,
            timestamp,
            text,
            author_id,
            author_location: user.location,
            share_weight: 1,
            urls,
        })
    }
}

impl<R: BufRead> Iterator for TwitterFeed<R> {
    type Item = Result<Post>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e.into()));
                }
            }
            self.line += 1;
            let raw = std::mem::take(&mut self.buf);
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            let result = self.convert(trimmed);
            self.buf = raw;
            match result {
                Ok(post) => return Some(Ok(post)),
                Err(reason) => self.rejects.record(self.line, reason),
            }
        }
    }
}
