use std::collections::HashSet;
use std::io::Read;

use csv::StringRecord;

use super::{parse_timestamp, FeedOptions, Rejects};
use crate::credibility::extract_urls;
use crate::error::{Error, Result};
use crate::model::{Platform, Post};

const REQUIRED: [&str; 5] = ["date", "message", "link", "share_count", "account_id"];

struct Columns {
    date: usize,
    message: usize,
    link: usize,
    share_count: usize,
    account_id: usize,
    post_id: Option<usize>,
}

impl Columns {
    fn from_headers(headers: &StringRecord) -> Result<Self> {
        let find = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
        let mut idx = [0usize; 5];
        for (slot, name) in idx.iter_mut().zip(REQUIRED) {
            *slot = find(name).ok_or_else(|| Error::Argument(format!("facebook feed lacks a {name:?} column")))?;
        }
        Ok(Columns {
            date: idx[0],
            message: idx[1],
            link: idx[2],
            share_count: idx[3],
            account_id: idx[4],
            post_id: find("post_id"),
        })
    }
}

/// CSV exports of page/group posts (header row required) as a stream of
/// posts weighted by their share count.
///
/// Columns: `date, message, link, share_count, account_id` and an optional
/// `post_id`; without it the id is `<account_id>#<row>`.
pub struct FacebookFeed<R> {
    reader: csv::Reader<R>,
    columns: Option<Columns>,
    options: FeedOptions,
    row: usize,
    seen: HashSet<String>,
    rejects: Rejects,
    done: bool,
}

impl<R: Read> FacebookFeed<R> {
    pub fn new(reader: R, options: FeedOptions) -> Self {
        FacebookFeed {
            reader: csv::ReaderBuilder::new().flexible(false).from_reader(reader),
            columns: None,
            options,
            row: 0,
            seen: HashSet::new(),
            rejects: Rejects::default(),
            done: false,
        }
    }

    pub fn rejects(&self) -> &Rejects {
        &self.rejects
    }

    fn convert(&mut self, rec: &StringRecord) -> std::result::Result<Post, String> {
        let cols = self.columns.as_ref().expect("headers read");
        let field = |i: usize| rec.get(i).map(str::trim).unwrap_or("");

        let date = field(cols.date);
        let timestamp = parse_timestamp(date).ok_or_else(|| format!("unparseable date {date:?}"))?;
        let account_id = field(cols.account_id);
        if account_id.is_empty() {
            return Err("missing account_id".into());
        }
        let shares = field(cols.share_count);
        let share_weight = if shares.is_empty() {
            0
        } else {
            shares
                .replace([',', '_'], "")
                .parse::<u64>()
                .map_err(|_| format!("invalid share_count {shares:?}"))?
        };
        if let Some(window) = &self.options.window {
            if !window.contains(timestamp.date_naive()) {
                return Err(format!("date {date} outside collection window"));
            }
        }
        let post_id = match cols.post_id.map(field).filter(|s| !s.is_empty()) {
            Some(id) => id.to_owned(),
            None => format!("{account_id}#{}", self.row),
        };
        let message = field(cols.message).to_owned();
        let link = field(cols.link);

        let mut urls: Vec<String> = Vec::new();
        if !link.is_empty() {
            urls.push(link.to_owned());
        }
        for u in extract_urls(&message) {
            if !urls.contains(&u) {
                urls.push(u);
            }
        }

        if !self.seen.insert(post_id.clone()) {
            return Err(format!("duplicate post_id {post_id}"));
        }
        Ok(Post {
            platform: Platform::Facebook,
            post_id,
            timestamp,
            text: message,
            author_id: account_id.to_owned(),
            author_location: None,
            share_weight,
            urls,
        })
    }
}

impl<R: Read> Iterator for FacebookFeed<R> {
    type Item = Result<Post>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.columns.is_none() {
            let columns = self
                .reader
                .headers()
                .map_err(Error::from)
                .and_then(Columns::from_headers);
            match columns {
                Ok(c) => self.columns = Some(c),
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
        let mut rec = StringRecord::new();
        loop {
            match self.reader.read_record(&mut rec) {
                Ok(false) => {
                    self.done = true;
                    return None;
                }
                Ok(true) => {}
                Err(e) if e.is_io_error() => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
                Err(e) => {
                    self.row += 1;
                    let line = e.position().map_or(self.row + 1, |p| p.line() as usize);
                    self.rejects.record(line, format!("malformed row: {e}"));
                    continue;
                }
            }
            self.row += 1;
            let line = rec.position().map_or(self.row + 1, |p| p.line() as usize);
            match self.convert(&rec) {
                Ok(post) => return Some(Ok(post)),
                Err(reason) => self.rejects.record(line, reason),
            }
        }
    }
}
