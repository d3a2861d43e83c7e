use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;

use super::domain::is_registrable;
use crate::error::{Error, Result};
use crate::model::CredibilityClass;

/// A labeled set of registrable news domains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceList {
    label: CredibilityClass,
    domains: BTreeSet<String>,
}

impl SourceList {
    /// Builds a list from bare registrable domains. Entries are lowercased;
    /// anything carrying a scheme, path, port, leading `www.`, or that is not
    /// itself a registrable domain is rejected.
    pub fn new<I, S>(label: CredibilityClass, domains: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if label == CredibilityClass::Unknown {
            return Err(Error::Argument("a source list is either low or high".into()));
        }
        let domains = domains
            .into_iter()
            .map(|d| validate_entry(d.as_ref()))
            .collect::<Result<_>>()?;
        Ok(SourceList { label, domains })
    }

    /// One domain per line; `#` starts a comment; blank lines are ignored.
    pub fn parse(label: CredibilityClass, text: &str) -> Result<Self> {
        let entries = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        SourceList::new(label, entries)
    }

    pub fn load(label: CredibilityClass, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SourceList::parse(label, &text)
    }

    pub fn label(&self) -> CredibilityClass {
        self.label
    }

    pub fn contains(&self, domain: &str) -> bool {
        self.domains.contains(domain)
    }

    pub fn domains(&self) -> impl Iterator<Item = &str> {
        self.domains.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }
}

fn validate_entry(raw: &str) -> Result<String> {
    let entry = raw.trim().to_ascii_lowercase();
    let invalid = |reason| Error::InvalidSource {
        entry: raw.to_owned(),
        reason,
    };
    if entry.is_empty() {
        return Err(invalid("empty"));
    }
    if entry.contains("://") {
        return Err(invalid("has a scheme"));
    }
    if entry.contains(['/', '?', '#', ':', ' ']) {
        return Err(invalid("not a bare host name"));
    }
    if entry.starts_with("www.") {
        return Err(invalid("has a leading www."));
    }
    if !is_registrable(&entry) {
        return Err(invalid("not a registrable domain"));
    }
    Ok(entry)
}

/// The low/high pair, guaranteed disjoint.
#[derive(Debug, Clone)]
pub struct SourceLists {
    low: SourceList,
    high: SourceList,
}

impl SourceLists {
    pub fn new(low: SourceList, high: SourceList) -> Result<Self> {
        if low.label != CredibilityClass::Low || high.label != CredibilityClass::High {
            return Err(Error::Argument("expected a low list and a high list".into()));
        }
        if let Some(domain) = low.domains.intersection(&high.domains).next() {
            return Err(Error::SourceOverlap { domain: domain.clone() });
        }
        Ok(SourceLists { low, high })
    }

    pub fn load(low: impl AsRef<Path>, high: impl AsRef<Path>) -> Result<Self> {
        SourceLists::new(
            SourceList::load(CredibilityClass::Low, low)?,
            SourceList::load(CredibilityClass::High, high)?,
        )
    }

    pub fn empty() -> Self {
        SourceLists {
            low: SourceList {
                label: CredibilityClass::Low,
                domains: BTreeSet::new(),
            },
            high: SourceList {
                label: CredibilityClass::High,
                domains: BTreeSet::new(),
            },
        }
    }

    pub fn low(&self) -> &SourceList {
        &self.low
    }

    pub fn high(&self) -> &SourceList {
        &self.high
    }

    pub fn class_of(&self, domain: &str) -> CredibilityClass {
        if self.low.contains(domain) {
            CredibilityClass::Low
        } else if self.high.contains(domain) {
            CredibilityClass::High
        } else {
            CredibilityClass::Unknown
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_case() {
        let l = SourceList::parse(
            CredibilityClass::Low,
            "# low credibility\nImolaOggi.it\n\nbyoblu.it  # blog\n",
        )
        .unwrap();
        assert_eq!(l.domains().collect::<Vec<_>>(), ["byoblu.it", "imolaoggi.it"]);
    }

    #[test]
    fn rejects_non_bare_entries() {
        for bad in [
            "https://imolaoggi.it",
            "imolaoggi.it/path",
            "www.imolaoggi.it",
            "imolaoggi.it:80",
            "blog.imolaoggi.it",
            "co.uk",
        ] {
            assert!(
                matches!(
                    SourceList::new(CredibilityClass::Low, [bad]),
                    Err(Error::InvalidSource { .. })
                ),
                "{bad}"
            );
        }
        assert!(SourceList::new(CredibilityClass::Low, ["news.blogspot.com"]).is_ok());
    }

    #[test]
    fn overlap_is_a_load_error_naming_the_domain() {
        let low = SourceList::new(CredibilityClass::Low, ["b.it", "z.it", "a.it"]).unwrap();
        let high = SourceList::new(CredibilityClass::High, ["z.it", "c.it", "b.it"]).unwrap();
        match SourceLists::new(low, high) {
            Err(Error::SourceOverlap { domain }) => assert_eq!(domain, "b.it"),
            other => panic!("expected overlap error, got {other:?}"),
        }
    }

    #[test]
    fn labels_must_match_slots() {
        let low = SourceList::new(CredibilityClass::Low, ["a.it"]).unwrap();
        let high = SourceList::new(CredibilityClass::High, ["b.it"]).unwrap();
        assert!(SourceLists::new(high.clone(), low.clone()).is_err());
        let lists = SourceLists::new(low, high).unwrap();
        assert_eq!(lists.class_of("a.it"), CredibilityClass::Low);
        assert_eq!(lists.class_of("b.it"), CredibilityClass::High);
        assert_eq!(lists.class_of("c.it"), CredibilityClass::Unknown);
    }
}
