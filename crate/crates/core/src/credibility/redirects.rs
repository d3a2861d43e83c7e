use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use super::domain::parse_http;
use crate::error::{Error, Result};

const MAX_HOPS: usize = 5;

/// Offline expansion of shortened links (t.co, bit.ly, ...).
#[derive(Debug, Clone, Default)]
pub struct RedirectMap {
    map: HashMap<String, String>,
}

#[derive(Deserialize)]
struct Row {
    short_url: String,
    expanded_url: String,
}

fn key(url: &str) -> String {
    parse_http(url)
        .map(|u| u.to_string())
        .unwrap_or_else(|_| url.trim().to_owned())
}

impl RedirectMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, short: &str, expanded: &str) {
        self.map.insert(key(short), expanded.trim().to_owned());
    }

    /// Two-column CSV with a `short_url,expanded_url` header.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut out = RedirectMap::new();
        for row in csv::Reader::from_reader(reader).deserialize::<Row>() {
            let row = row?;
            out.insert(&row.short_url, &row.expanded_url);
        }
        Ok(out)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }

    /// Follows mappings (at most a few hops) and returns the final URL, or
    /// `None` when `url` has no mapping.
    pub fn expand(&self, url: &str) -> Option<&str> {
        let mut current = self.map.get(&key(url))?;
        for _ in 1..MAX_HOPS {
            match self.map.get(&key(current)) {
                Some(next) if next != current => current = next,
                _ => break,
            }
        }
        Some(current)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_and_expands() {
        let csv = "short_url,expanded_url\nhttps://t.co/abc,https://www.ansa.it/x\nhttps://bit.ly/q,https://t.co/abc\n";
        let m = RedirectMap::from_reader(csv.as_bytes()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.expand("https://t.co/abc"), Some("https://www.ansa.it/x"));
        assert_eq!(m.expand("HTTPS://T.CO/abc"), Some("https://www.ansa.it/x"));
        assert_eq!(m.expand("https://bit.ly/q"), Some("https://www.ansa.it/x"));
        assert_eq!(m.expand("https://bit.ly/other"), None);
    }

    #[test]
    fn cycles_terminate() {
        let mut m = RedirectMap::new();
        m.insert("https://a.it/1", "https://b.it/1");
        m.insert("https://b.it/1", "https://a.it/1");
        assert!(m.expand("https://a.it/1").is_some());
    }
}
