//! Newline-delimited JSON storage of [`Post`]s between pipeline stages.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Post;

pub fn write_post(mut w: impl Write, post: &Post) -> Result<()> {
    serde_json::to_writer(&mut w, post)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn write_posts<'a>(mut w: impl Write, posts: impl IntoIterator<Item = &'a Post>) -> Result<()> {
    for p in posts {
        write_post(&mut w, p)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a stored corpus, checking post invariants and
/// `(platform, post_id)` uniqueness.
pub fn read_posts(reader: impl BufRead, source: &Path) -> Result<Vec<Post>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let post: Post = serde_json::from_str(&line).map_err(|e| Error::parse(source, idx + 1, e.to_string()))?;
        post.validate()
            .map_err(|e| Error::parse(source, idx + 1, e.to_string()))?;
        if !seen.insert((post.platform, post.post_id.clone())) {
            return Err(Error::parse(
                source,
                idx + 1,
                format!("duplicate {} post {}", post.platform, post.post_id),
            ));
        }
        out.push(post);
    }
    Ok(out)
}

pub fn load_posts(path: impl AsRef<Path>) -> Result<Vec<Post>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_posts(BufReader::new(file), path)
}

/// Loads several corpora into one, rejecting duplicates across files.
pub fn load_corpus<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<Post>> {
    let mut seen = HashSet::new();
    let mut all = Vec::new();
    for path in paths {
        for post in load_posts(path)? {
            if !seen.insert((post.platform, post.post_id.clone())) {
                return Err(Error::Argument(format!(
                    "{} post {} appears in more than one corpus file",
                    post.platform, post.post_id
                )));
            }
            all.push(post);
        }
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Platform;
    use chrono::{TimeZone, Utc};
    use proptest::prelude::*;

    fn arb_post() -> impl Strategy<Value = Post> {
        (
            prop_oneof![Just(Platform::Twitter), Just(Platform::Facebook)],
            "[a-z0-9]{1,12}",
            0i64..2_000_000_000,
            0u32..1_000_000_000,
            "\\PC{0,60}",
            "[a-z0-9]{1,8}",
            proptest::option::of("\\PC{0,20}"),
            1u64..100_000,
            proptest::collection::vec("https://[a-z]{1,8}\\.it/[a-z0-9]{0,6}", 0..3),
        )
            .prop_map(
                |(platform, post_id, secs, nanos, text, author_id, loc, weight, urls)| Post {
                    platform,
                    post_id,
                    timestamp: Utc.timestamp_opt(secs, nanos).unwrap(),
                    text,
                    author_id,
                    author_location: loc,
                    share_weight: weight,
                    urls,
                },
            )
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(post in arb_post()) {
            let mut buf = Vec::new();
            write_post(&mut buf, &post).unwrap();
            let back = read_posts(buf.as_slice(), Path::new("mem")).unwrap();
            prop_assert_eq!(back, vec![post]);
        }
    }

    #[test]
    fn duplicates_and_invalid_posts_are_rejected() {
        let line = r#"{"platform":"twitter","post_id":"1","timestamp":"2021-01-01T00:00:00Z","text":"","author_id":"a","share_weight":1}"#;
        let dup = format!("{line}\n{line}\n");
        assert!(matches!(
            read_posts(dup.as_bytes(), Path::new("mem")),
            Err(Error::Parse { line: 2, .. })
        ));
        let zero = line.replace("\"share_weight\":1", "\"share_weight\":0");
        assert!(read_posts(zero.as_bytes(), Path::new("mem")).is_err());
    }
}
