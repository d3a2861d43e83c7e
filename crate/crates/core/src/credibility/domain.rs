//! Host to registrable-domain reduction backed by a bundled public-suffix
//! list snapshot (`data/public_suffix_list.dat`).

use std::sync::LazyLock;

use publicsuffix::{List, Psl};
use url::{Host, Url};

static SUFFIXES: LazyLock<List> = LazyLock::new(|| {
    include_str!("../../data/public_suffix_list.dat")
        .parse()
        .expect("bundled public suffix list parses")
});

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UrlError {
    #[error("unparseable url: {0}")]
    Parse(#[from] url::ParseError),
    #[error("unsupported scheme {0:?}")]
    Scheme(String),
    #[error("url has no host")]
    NoHost,
}

pub(crate) fn parse_http(url: &str) -> Result<Url, UrlError> {
    let parsed = Url::parse(url.trim())?;
    match parsed.scheme() {
        "http" | "https" => Ok(parsed),
        other => Err(UrlError::Scheme(other.to_owned())),
    }
}

/// Reduces an http(s) URL to its lowercase registrable domain. Path, query,
/// fragment, port and a single leading `www.` are ignored.
///
/// Hosts that are themselves public suffixes, and IP literals, are returned
/// unchanged.
pub fn canonical_domain(url: &str) -> Result<String, UrlError> {
    let parsed = parse_http(url)?;
    let host = match parsed.host().ok_or(UrlError::NoHost)? {
        Host::Domain(d) => d.trim_end_matches('.').to_ascii_lowercase(),
        Host::Ipv4(ip) => return Ok(ip.to_string()),
        Host::Ipv6(ip) => return Ok(ip.to_string()),
    };
    if host.is_empty() {
        return Err(UrlError::NoHost);
    }
    Ok(registrable_domain(&host))
}

/// Registrable domain of a bare host name, after stripping one leading `www.`.
///
/// The `www.` label is only dropped when what remains still has a registrable
/// domain, so `www.it` stays `www.it` and the reduction is idempotent.
pub fn registrable_domain(host: &str) -> String {
    let host = match host.strip_prefix("www.") {
        Some(rest) if lookup(rest).is_some() => rest,
        _ => host,
    };
    lookup(host).unwrap_or_else(|| host.to_owned())
}

/// True when `host` is exactly a registrable domain (public suffix plus one label).
pub(crate) fn is_registrable(host: &str) -> bool {
    lookup(host).as_deref() == Some(host)
}

fn lookup(host: &str) -> Option<String> {
    SUFFIXES
        .domain(host.as_bytes())
        .map(|d| String::from_utf8_lossy(d.as_bytes()).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_www_path_and_query() {
        assert_eq!(
            canonical_domain("https://www.imolaoggi.it/2021/01/x").unwrap(),
            "imolaoggi.it"
        );
        assert_eq!(
            canonical_domain("https://www.byoblu.it/a?x=1#frag").unwrap(),
            "byoblu.it"
        );
    }

    #[test]
    fn case_and_port() {
        assert_eq!(
            canonical_domain("HTTP://Example.COM:8080/p?q=1").unwrap(),
            "example.com"
        );
    }

    #[test]
    fn private_suffix_keeps_left_label() {
        assert_eq!(
            canonical_domain("https://news.blogspot.com/x").unwrap(),
            "news.blogspot.com"
        );
        assert_eq!(
            canonical_domain("https://a.b.news.blogspot.com/x").unwrap(),
            "news.blogspot.com"
        );
    }

    #[test]
    fn multi_label_suffixes() {
        assert_eq!(canonical_domain("https://www.bbc.co.uk/news").unwrap(), "bbc.co.uk");
        assert_eq!(
            canonical_domain("https://tgcom24.mediaset.it/x").unwrap(),
            "mediaset.it"
        );
        assert_eq!(canonical_domain("https://m.corriere.it").unwrap(), "corriere.it");
    }

    #[test]
    fn subdomain_reduces_to_registrable() {
        assert_eq!(canonical_domain("https://blog.imolaoggi.it/").unwrap(), "imolaoggi.it");
    }

    #[test]
    fn only_one_www_is_stripped() {
        assert_eq!(canonical_domain("https://www.www.it/").unwrap(), "www.it");
        assert_eq!(canonical_domain("https://www.it/").unwrap(), "www.it");
        assert_eq!(canonical_domain("https://blogspot.com/").unwrap(), "blogspot.com");
    }

    #[test]
    fn ip_hosts_pass_through() {
        assert_eq!(canonical_domain("http://127.0.0.1:80/x").unwrap(), "127.0.0.1");
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(canonical_domain("not a url"), Err(UrlError::Parse(_))));
        assert!(matches!(
            canonical_domain("ftp://example.com/x"),
            Err(UrlError::Scheme(_))
        ));
    }

    #[test]
    fn idempotent_on_own_output() {
        for u in [
            "https://www.imolaoggi.it/x",
            "https://news.blogspot.com/x",
            "https://www.bbc.co.uk/",
            "https://www.www.it/",
            "https://www.blogspot.com/",
            "http://sub.example.org:81/",
        ] {
            let d = canonical_domain(u).unwrap();
            assert_eq!(canonical_domain(&format!("https://{d}")).unwrap(), d, "{u}");
        }
    }
}
