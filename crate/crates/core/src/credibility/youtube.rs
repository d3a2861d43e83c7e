use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use url::Url;

use super::domain::registrable_domain;
use crate::error::Error;

/// An 11-character YouTube video identifier (`[A-Za-z0-9_-]{11}`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VideoId(String);

impl VideoId {
    pub const LEN: usize = 11;

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn is_valid(s: &str) -> bool {
        s.len() == Self::LEN && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
    }
}

impl FromStr for VideoId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if VideoId::is_valid(s) {
            Ok(VideoId(s.to_owned()))
        } else {
            Err(Error::Argument(format!("invalid video id {s:?}")))
        }
    }
}

impl TryFrom<String> for VideoId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        if VideoId::is_valid(&s) {
            Ok(VideoId(s))
        } else {
            Err(Error::Argument(format!("invalid video id {s:?}")))
        }
    }
}

impl From<VideoId> for String {
    fn from(id: VideoId) -> String {
        id.0
    }
}

impl fmt::Display for VideoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

const YOUTUBE_DOMAINS: &[&str] = &["youtube.com", "youtu.be", "youtube-nocookie.com"];

fn parse_lenient(url: &str) -> Option<Url> {
    let url = url.trim();
    Url::parse(url)
        .ok()
        .or_else(|| Url::parse(&format!("https://{url}")).ok())
        .filter(|u| matches!(u.scheme(), "http" | "https"))
}

pub fn is_youtube_host(host: &str) -> bool {
    YOUTUBE_DOMAINS.contains(&registrable_domain(&host.to_ascii_lowercase()).as_str())
}

/// Extracts the video ID from `watch?v=`, `youtu.be/`, `/embed/` and
/// `/shorts/` URL shapes. Scheme-less URLs (`www.youtube.com/watch?v=...`)
/// are accepted.
pub fn extract_youtube_id(url: &str) -> Option<VideoId> {
    let url = parse_lenient(url)?;
    let host = registrable_domain(&url.host_str()?.to_ascii_lowercase());
    let mut segments = url.path_segments()?.filter(|s| !s.is_empty());
    let candidate = match host.as_str() {
        "youtu.be" => segments.next()?.to_owned(),
        "youtube.com" | "youtube-nocookie.com" => match segments.next()? {
            "watch" => url.query_pairs().find(|(k, _)| k == "v").map(|(_, v)| v.into_owned())?,
            "embed" | "shorts" => segments.next()?.to_owned(),
            _ => return None,
        },
        _ => return None,
    };
    candidate.parse().ok()
}
