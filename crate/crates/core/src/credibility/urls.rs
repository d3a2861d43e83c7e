use std::sync::LazyLock;

use regex::Regex;

use super::domain::parse_http;

static CANDIDATE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r#"(?i)\bhttps?://[^\s<>"]+"#).unwrap());

const TRAILING: &[char] = &['.', ',', ';', ':', '!', '?', '\'', '"', '»', '…', '*'];

/// Returns every http(s) URL in `text`, in order, duplicates preserved.
///
/// A candidate runs from the scheme to the next whitespace; sentence
/// punctuation and unbalanced closing brackets are trimmed from its end.
/// Candidates that do not parse with a host are dropped.
pub fn extract_urls(text: &str) -> Vec<String> {
    CANDIDATE
        .find_iter(text)
        .filter_map(|m| {
            let candidate = trim_candidate(m.as_str());
            parse_http(candidate)
                .ok()
                .filter(|u| u.host_str().is_some_and(|h| !h.is_empty()))
                .map(|_| candidate.to_owned())
        })
        .collect()
}

fn trim_candidate(mut s: &str) -> &str {
    loop {
        let before = s.len();
        s = s.trim_end_matches(TRAILING);
        for (open, close) in [('(', ')'), ('[', ']'), ('{', '}')] {
            if s.ends_with(close) && s.matches(close).count() > s.matches(open).count() {
                s = &s[..s.len() - close.len_utf8()];
            }
        }
        if s.len() == before {
            return s;
        }
    }
}
