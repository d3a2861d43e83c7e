use serde::Serialize;

use super::keywords::KeywordTimeline;
use crate::model::Post;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FilterStats {
    pub passed: u64,
    pub dropped: u64,
}

/// Passes posts whose text matches the keyword set active on the post's
/// day; order is preserved.
pub struct FilterStream<'k, I> {
    inner: I,
    keywords: &'k KeywordTimeline,
    stats: FilterStats,
}

impl<I> FilterStream<'_, I> {
    pub fn stats(&self) -> FilterStats {
        self.stats
    }
}

impl<I: Iterator<Item = Post>> Iterator for FilterStream<'_, I> {
    type Item = Post;

    fn next(&mut self) -> Option<Post> {
        for post in self.inner.by_ref() {
            let hit = self
                .keywords
                .active_at(post.date())
                .is_some_and(|ks| !ks.matches(&post.text).is_empty());
            if hit {
                self.stats.passed += 1;
                return Some(post);
            }
            self.stats.dropped += 1;
        }
        None
    }
}

pub fn filter_stream<I>(posts: I, keywords: &KeywordTimeline) -> FilterStream<'_, I::IntoIter>
where
    I: IntoIterator<Item = Post>,
{
    FilterStream {
        inner: posts.into_iter(),
        keywords,
        stats: FilterStats::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::KeywordSet;
    use crate::model::Platform;

    fn post(id: &str, day: &str, text: &str) -> Post {
        Post {
            platform: Platform::Twitter,
            post_id: id.into(),
            timestamp: format!("{day}T12:00:00Z").parse().unwrap(),
            text: text.into(),
            author_id: "u".into(),
            author_location: None,
            share_weight: 1,
            urls: vec![],
        }
    }

    #[test]
    fn passes_only_matching_posts() {
        let kw = KeywordTimeline::single(KeywordSet::vaccine_defaults());
        let posts = vec![
            post("1", "2021-01-01", "buongiorno"),
            post("2", "2021-01-01", "i vaccini funzionano"),
            post("3", "2021-01-01", "il vaccinista"),
        ];
        let mut f = filter_stream(posts, &kw);
        let out: Vec<_> = f.by_ref().map(|p| p.post_id).collect();
        assert_eq!(out, ["2"]);
        assert_eq!(f.stats(), FilterStats { passed: 1, dropped: 2 });
    }

    #[test]
    fn empty_stream() {
        let kw = KeywordTimeline::single(KeywordSet::vaccine_defaults());
        let mut f = filter_stream(Vec::new(), &kw);
        assert!(f.next().is_none());
        assert_eq!(f.stats(), FilterStats::default());
    }

    #[test]
    fn uses_version_active_on_post_day() {
        let kw = KeywordTimeline::parse("[2020-12-20]\nvaccino\n[2021-01-10]\nastrazeneca\n").unwrap();
        let posts = vec![
            post("1", "2020-12-19", "vaccino"),
            post("2", "2021-01-09", "astrazeneca"),
            post("3", "2021-01-10", "astrazeneca"),
            post("4", "2021-01-10", "vaccino"),
        ];
        let out: Vec<_> = filter_stream(posts, &kw).map(|p| p.post_id).collect();
        assert_eq!(out, ["3", "4"]);
    }
}
