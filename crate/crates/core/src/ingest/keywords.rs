use std::collections::HashMap;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::text::{normalize_text, tokens};

/// A normalized keyword, matched as a contiguous token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Keyword {
    text: String,
    tokens: Vec<String>,
}

impl Keyword {
    pub fn new(raw: &str) -> Option<Self> {
        let toks: Vec<String> = tokens(&normalize_text(raw)).map(str::to_owned).collect();
        if toks.is_empty() {
            return None;
        }
        Some(Keyword {
            text: toks.join(" "),
            tokens: toks,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// The keyword set in force from `version_date` onwards.
#[derive(Debug, Clone)]
pub struct KeywordSet {
    version_date: NaiveDate,
    keywords: Vec<Keyword>,
    by_first_token: HashMap<String, Vec<usize>>,
}

impl KeywordSet {
    pub fn new<I, S>(version_date: NaiveDate, keywords: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = KeywordSet {
            version_date,
            keywords: Vec::new(),
            by_first_token: HashMap::new(),
        };
        for raw in keywords {
            let raw = raw.as_ref();
            let kw = Keyword::new(raw)
                .ok_or_else(|| Error::Argument(format!("keyword {raw:?} is empty after normalization")))?;
            set.push(kw);
        }
        if set.keywords.is_empty() {
            return Err(Error::Argument("keyword set is empty".into()));
        }
        Ok(set)
    }

    /// The standard vaccine keyword list, active from the start of collection.
    pub fn vaccine_defaults() -> Self {
        KeywordSet::new(NaiveDate::MIN, DEFAULT_KEYWORDS).expect("default keywords are valid")
    }

    fn push(&mut self, kw: Keyword) {
        if self.keywords.iter().any(|k| k.text == kw.text) {
            return;
        }
        self.by_first_token
            .entry(kw.tokens[0].clone())
            .or_default()
            .push(self.keywords.len());
        self.keywords.push(kw);
    }

    pub fn version_date(&self) -> NaiveDate {
        self.version_date
    }

    pub fn keywords(&self) -> impl Iterator<Item = &str> {
        self.keywords.iter().map(Keyword::as_str)
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    /// Keywords occurring in `text` as whole tokens (or contiguous token runs),
    /// in order of first occurrence, without duplicates.
    pub fn matches(&self, text: &str) -> Vec<&str> {
        let normalized = normalize_text(text);
        let toks: Vec<&str> = tokens(&normalized).collect();
        let mut hits: Vec<usize> = Vec::new();
        for (i, tok) in toks.iter().enumerate() {
            let Some(candidates) = self.by_first_token.get(*tok) else {
                continue;
            };
            for &k in candidates {
                let kw = &self.keywords[k].tokens;
                let fits = toks.len() - i >= kw.len() && kw.iter().zip(&toks[i..]).all(|(a, b)| a == b);
                if fits && !hits.contains(&k) {
                    hits.push(k);
                }
            }
        }
        hits.into_iter().map(|k| self.keywords[k].as_str()).collect()
    }
}

pub fn match_keywords<'k>(text: &str, ks: &'k KeywordSet) -> Vec<&'k str> {
    ks.matches(text)
}

/// Keyword sets over time. Versions are cumulative: each section of the file
/// adds keywords to everything declared before it.
#[derive(Debug, Clone)]
pub struct KeywordTimeline {
    versions: Vec<KeywordSet>,
}

impl KeywordTimeline {
    pub fn single(set: KeywordSet) -> Self {
        KeywordTimeline { versions: vec![set] }
    }

    /// Parses a keyword file: one keyword per line, `[YYYY-MM-DD]` opens a new
    /// version, a line that is `#` followed by whitespace (or nothing) is a
    /// comment. Keywords before the first header are active from the start
    /// of time. `#hashtag` lines are keywords.
    pub fn parse(text: &str) -> Result<Self> {
        let src = Path::new("<keywords>");
        let mut sections: Vec<(NaiveDate, Vec<String>)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || is_comment(line) {
                continue;
            }
            if let Some(date) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let date: NaiveDate = date
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(src, idx + 1, format!("bad version date {date:?}")))?;
                if let Some((last, _)) = sections.last() {
                    if date <= *last {
                        return Err(Error::parse(
                            src,
                            idx + 1,
                            format!("version {date} does not follow {last}"),
                        ));
                    }
                }
                sections.push((date, Vec::new()));
                continue;
            }
            if sections.is_empty() {
                sections.push((NaiveDate::MIN, Vec::new()));
            }
            sections.last_mut().unwrap().1.push(line.to_owned());
        }
        if sections.is_empty() {
            return Err(Error::Argument("keyword file declares no keywords".into()));
        }

        let mut versions = Vec::with_capacity(sections.len());
        let mut cumulative: Vec<String> = Vec::new();
        for (date, added) in sections {
            cumulative.extend(added);
            versions.push(KeywordSet::new(date, &cumulative)?);
        }
        Ok(KeywordTimeline { versions })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        KeywordTimeline::parse(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::parse(path, line, message),
            other => other,
        })
    }

    /// The version in force on `date`, if collection had started.
    pub fn active_at(&self, date: NaiveDate) -> Option<&KeywordSet> {
        self.versions.iter().rev().find(|v| v.version_date <= date)
    }

    pub fn latest(&self) -> &KeywordSet {
        self.versions.last().expect("timeline is non-empty")
    }

    pub fn versions(&self) -> &[KeywordSet] {
        &self.versions
    }
}

fn is_comment(line: &str) -> bool {
    line.strip_prefix('#')
        .is_some_and(|rest| rest.is_empty() || rest.starts_with(char::is_whitespace))
}

pub const DEFAULT_KEYWORDS: &[&str] = &[
    "vaccini",
    "vaccino",
    "vaccinazioni",
    "iononmivaccino",
    "vaccinazione",
    "vaccinocovid",
    "vaccinarsi",
    "vaccinare",
    "vacciniamoci",
    "vaccinareh24",
    "vaccinerò",
    "vaccinoanticovid",
    "vaccinerai",
    "vaccineremo",
    "vaccinerete",
    "iononmivaccinero",
    "novaccinoainovax",
    "iononsonounacavia",
];
