//! Source-based credibility labeling: URLs are reduced to their registrable
//! domain and looked up in a low- and a high-credibility list.

mod domain;
mod redirects;
mod sources;
mod urls;
mod youtube;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use domain::{canonical_domain, registrable_domain, UrlError};
pub use redirects::RedirectMap;
pub use sources::{SourceList, SourceLists};
pub use urls::extract_urls;
pub use youtube::{extract_youtube_id, is_youtube_host, VideoId};

use crate::model::{CredibilityClass, Post};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedUrl {
    pub raw_url: String,
    /// Set when the redirect map expanded `raw_url`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expanded_url: Option<String>,
    /// `None` only when the URL could not be parsed (see `parse_error`).
    pub canonical_domain: Option<String>,
    pub class: CredibilityClass,
    pub is_youtube: bool,
    pub youtube_id: Option<VideoId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parse_error: Option<String>,
}

/// Classifies a URL against a disjoint low/high pair, without redirect
/// expansion.
pub fn classify_url(url: &str, lists: &SourceLists) -> ClassifiedUrl {
    classify_resolved(url, None, lists)
}

fn classify_resolved(raw: &str, expanded: Option<&str>, lists: &SourceLists) -> ClassifiedUrl {
    let effective = expanded.unwrap_or(raw);
    let (canonical, parse_error) = match canonical_domain(effective) {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let class = canonical
        .as_deref()
        .map_or(CredibilityClass::Unknown, |d| lists.class_of(d));
    let is_youtube = canonical.as_deref().is_some_and(youtube::is_youtube_host);
    let youtube_id = if is_youtube {
        extract_youtube_id(effective)
    } else {
        None
    };
    ClassifiedUrl {
        raw_url: raw.to_owned(),
        expanded_url: expanded.map(str::to_owned),
        canonical_domain: canonical,
        class,
        is_youtube,
        youtube_id,
        parse_error,
    }
}

/// Source lists plus the optional redirect map consulted before
/// canonicalization.
#[derive(Debug, Clone)]
pub struct Classifier {
    lists: SourceLists,
    redirects: RedirectMap,
}

impl Classifier {
    pub fn new(lists: SourceLists) -> Self {
        Classifier {
            lists,
            redirects: RedirectMap::new(),
        }
    }

    pub fn with_redirects(mut self, redirects: RedirectMap) -> Self {
        self.redirects = redirects;
        self
    }

    pub fn lists(&self) -> &SourceLists {
        &self.lists
    }

    pub fn classify(&self, url: &str) -> ClassifiedUrl {
        classify_resolved(url, self.redirects.expand(url), &self.lists)
    }

    pub fn classify_post(&self, post: Post) -> ClassifiedPost {
        let urls = post.urls.iter().map(|u| self.classify(u)).collect();
        ClassifiedPost { post, urls }
    }
}

/// A post together with the classification of each of its URLs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedPost {
    pub post: Post,
    pub urls: Vec<ClassifiedUrl>,
}

impl ClassifiedPost {
    pub fn has_class(&self, class: CredibilityClass) -> bool {
        self.urls.iter().any(|u| u.class == class)
    }

    /// Distinct domains of the given class linked by this post.
    pub fn domains_of(&self, class: CredibilityClass) -> BTreeSet<&str> {
        self.urls
            .iter()
            .filter(|u| u.class == class)
            .filter_map(|u| u.canonical_domain.as_deref())
            .collect()
    }

    /// Distinct video IDs linked by this post.
    pub fn video_ids(&self) -> BTreeSet<&VideoId> {
        self.urls.iter().filter_map(|u| u.youtube_id.as_ref()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lists() -> SourceLists {
        SourceLists::new(
            SourceList::new(CredibilityClass::Low, ["imolaoggi.it", "byoblu.it"]).unwrap(),
            SourceList::new(CredibilityClass::High, ["ansa.it", "corriere.it"]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn low_high_unknown() {
        let l = lists();
        assert_eq!(
            classify_url("https://www.imolaoggi.it/x", &l).class,
            CredibilityClass::Low
        );
        assert_eq!(
            classify_url("https://blog.imolaoggi.it/x", &l).class,
            CredibilityClass::Low
        );
        assert_eq!(
            classify_url("https://m.corriere.it/x", &l).class,
            CredibilityClass::High
        );
        let u = classify_url("https://example.org/x", &l);
        assert_eq!(u.class, CredibilityClass::Unknown);
        assert_eq!(u.canonical_domain.as_deref(), Some("example.org"));
        assert!(!u.is_youtube);
    }

    #[test]
    fn youtube_urls() {
        let u = classify_url("https://www.youtube.com/watch?v=kHGtn_vnrJ8", &lists());
        assert!(u.is_youtube);
        assert_eq!(u.youtube_id.as_ref().map(VideoId::as_str), Some("kHGtn_vnrJ8"));
        assert_eq!(u.class, CredibilityClass::Unknown);

        let channel = classify_url("https://www.youtube.com/channel/UCx", &lists());
        assert!(channel.is_youtube);
        assert_eq!(channel.youtube_id, None);
    }

    #[test]
    fn parse_failure_is_unknown() {
        let u = classify_url("https://", &lists());
        assert_eq!(u.class, CredibilityClass::Unknown);
        assert_eq!(u.canonical_domain, None);
        assert!(u.parse_error.is_some());
    }

    #[test]
    fn redirects_are_followed_before_lookup() {
        let mut r = RedirectMap::new();
        r.insert("https://bit.ly/abc", "https://www.byoblu.it/video");
        r.insert("https://t.co/yt", "https://youtu.be/kHGtn_vnrJ8");
        let c = Classifier::new(lists()).with_redirects(r);

        let mapped = c.classify("https://bit.ly/abc");
        assert_eq!(mapped.class, CredibilityClass::Low);
        assert_eq!(mapped.raw_url, "https://bit.ly/abc");
        assert_eq!(mapped.expanded_url.as_deref(), Some("https://www.byoblu.it/video"));

        let unmapped = c.classify("https://bit.ly/zzz");
        assert_eq!(unmapped.class, CredibilityClass::Unknown);
        assert_eq!(unmapped.canonical_domain.as_deref(), Some("bit.ly"));

        let video = c.classify("https://t.co/yt");
        assert_eq!(video.youtube_id.map(String::from).as_deref(), Some("kHGtn_vnrJ8"));
    }

    #[test]
    fn post_helpers_dedupe() {
        let c = Classifier::new(lists());
        let post = Post {
            platform: crate::model::Platform::Facebook,
            post_id: "p".into(),
            timestamp: "2021-01-02T00:00:00Z".parse().unwrap(),
            text: String::new(),
            author_id: "a".into(),
            author_location: None,
            share_weight: 3,
            urls: vec![
                "https://imolaoggi.it/1".into(),
                "https://www.imolaoggi.it/2".into(),
                "https://ansa.it/3".into(),
                "https://youtu.be/kHGtn_vnrJ8".into(),
                "https://www.youtube.com/watch?v=kHGtn_vnrJ8".into(),
            ],
        };
        let cp = c.classify_post(post);
        assert!(cp.has_class(CredibilityClass::Low));
        assert!(cp.has_class(CredibilityClass::High));
        assert_eq!(cp.domains_of(CredibilityClass::Low).len(), 1);
        assert_eq!(cp.video_ids().len(), 1);
    }
}
