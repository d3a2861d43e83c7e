//! Naive gazetteer geolocation of profile locations.
//!
//! A location string is normalized and tokenized; every gazetteer name that
//! occurs as a contiguous token run is a match, and the longest match (in
//! characters) wins. Equal lengths fall back to Region > Province >
//! Municipality, then to the lexicographically smaller name.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GazetteerEntry, PlaceKind, Platform, Post, RegionCode};
use crate::text::{normalize_text, tokens};

#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
    by_key: HashMap<String, Vec<usize>>,
    max_tokens: usize,
}

fn token_key(normalized: &str) -> (String, usize) {
    let toks: Vec<&str> = tokens(normalized).collect();
    (toks.join(" "), toks.len())
}

impl Gazetteer {
    pub fn build(entries: impl IntoIterator<Item = GazetteerEntry>) -> Result<Self> {
        let mut g = Gazetteer::default();
        let mut seen = HashSet::new();
        for entry in entries {
            if entry.name_normalized.is_empty() {
                return Err(Error::Argument("gazetteer entry with empty name".into()));
            }
            if !seen.insert((entry.name_normalized.clone(), entry.kind)) {
                return Err(Error::DuplicatePlace {
                    name: entry.name_normalized,
                    kind: entry.kind,
                });
            }
            let (key, n) = token_key(&entry.name_normalized);
            if n == 0 {
                return Err(Error::Argument(format!(
                    "gazetteer name {:?} has no alphanumeric tokens",
                    entry.name_normalized
                )));
            }
            g.max_tokens = g.max_tokens.max(n);
            g.by_key.entry(key).or_default().push(g.entries.len());
            g.entries.push(entry);
        }
        Ok(g)
    }

    /// CSV with a `name,kind,region_code,population` header; population may be
    /// empty.
    pub fn from_reader(reader: impl Read, source: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            name: String,
            kind: String,
            region_code: String,
            #[serde(default)]
            population: Option<String>,
        }
        let mut rdr = csv::Reader::from_reader(reader);
        let mut entries = Vec::new();
        for (idx, row) in rdr.deserialize::<Row>().enumerate() {
            let line = idx + 2;
            let row = row.map_err(|e| Error::parse(source, line, e.to_string()))?;
            let err = |e: Error| Error::parse(source, line, e.to_string());
            let kind: PlaceKind = row.kind.parse().map_err(err)?;
            let region: RegionCode = row.region_code.parse().map_err(err)?;
            let population = match row.population.as_deref().map(str::trim) {
                None | Some("") => None,
                Some(p) => Some(
                    p.parse::<u64>()
                        .map_err(|_| Error::parse(source, line, format!("invalid population {p:?}")))?,
                ),
            };
            entries.push(GazetteerEntry::new(&row.name, kind, region, population).map_err(err)?);
        }
        Gazetteer::build(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Gazetteer::from_reader(file, path)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    /// Population per region, taken from region-kind entries.
    pub fn region_populations(&self) -> BTreeMap<RegionCode, u64> {
        let mut out = BTreeMap::new();
        for e in self.entries.iter().filter(|e| e.kind == PlaceKind::Region) {
            if let Some(p) = e.population {
                out.entry(e.region_code).or_insert(p);
            }
        }
        out
    }

    /// Every entry whose name occurs in `location` as a contiguous token run.
    pub fn find_all(&self, location: &str) -> Vec<&GazetteerEntry> {
        let normalized = normalize_text(location);
        let toks: Vec<&str> = tokens(&normalized).collect();
        let mut out = Vec::new();
        let mut key = String::new();
        for start in 0..toks.len() {
            key.clear();
            for (n, tok) in toks[start..].iter().take(self.max_tokens).enumerate() {
                if n > 0 {
                    key.push(' ');
                }
                key.push_str(tok);
                if let Some(ids) = self.by_key.get(&key) {
                    out.extend(ids.iter().map(|&i| &self.entries[i]));
                }
            }
        }
        out
    }

    /// The longest match, with the kind/name tie-break.
    pub fn resolve(&self, location: &str) -> Option<&GazetteerEntry> {
        self.find_all(location).into_iter().min_by(|a, b| {
            let key = |e: &GazetteerEntry| (Reverse(e.name_normalized.chars().count()), e.kind);
            key(a)
                .cmp(&key(b))
                .then_with(|| a.name_normalized.cmp(&b.name_normalized))
        })
    }
}

pub fn build_gazetteer(entries: impl IntoIterator<Item = GazetteerEntry>) -> Result<Gazetteer> {
    Gazetteer::build(entries)
}

pub fn resolve_location<'g>(location: &str, g: &'g Gazetteer) -> Option<&'g GazetteerEntry> {
    g.resolve(location)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeoResolution {
    pub user_id: String,
    pub location: String,
    pub matched_name: Option<String>,
    pub matched_kind: Option<PlaceKind>,
    pub region_code: Option<RegionCode>,
}

impl GeoResolution {
    pub fn is_resolved(&self) -> bool {
        self.region_code.is_some()
    }
}

/// Resolves each Twitter author once, from the profile location carried by
/// their most recent post. Authors whose latest location is blank are
/// skipped.
pub fn geolocate_users<'p>(
    posts: impl IntoIterator<Item = &'p Post>,
    g: &Gazetteer,
) -> BTreeMap<String, GeoResolution> {
    let mut latest: HashMap<&str, &Post> = HashMap::new();
    for p in posts.into_iter().filter(|p| p.platform == Platform::Twitter) {
        latest
            .entry(p.author_id.as_str())
            .and_modify(|cur| {
                if (p.timestamp, &p.post_id) > (cur.timestamp, &cur.post_id) {
                    *cur = p;
                }
            })
            .or_insert(p);
    }
    latest
        .into_iter()
        .filter_map(|(user, post)| {
            let location = post.location()?;
            let hit = g.resolve(location);
            Some((
                user.to_owned(),
                GeoResolution {
                    user_id: user.to_owned(),
                    location: location.to_owned(),
                    matched_name: hit.map(|e| e.name_normalized.clone()),
                    matched_kind: hit.map(|e| e.kind),
                    region_code: hit.map(|e| e.region_code),
                },
            ))
        })
        .collect()
}
