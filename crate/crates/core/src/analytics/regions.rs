//! Per-region user statistics joined with vaccine administration data.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::stats::{pearson, Correlation};
use crate::credibility::ClassifiedPost;
use crate::error::{Error, Result};
use crate::geolocate::{Gazetteer, GeoResolution};
use crate::model::{CredibilityClass, DateWindow, Platform, RegionCode, VaccineRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionStat {
    pub region_code: RegionCode,
    pub users_located: u64,
    /// Mean over located users with at least one tweet; absent when there
    /// are none.
    pub mean_user_low_fraction: Option<f64>,
    pub total_doses: u64,
    pub population: u64,
    pub doses_per_million: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RegionOptions {
    /// Restricts both tweets and dose records to these days.
    pub window: Option<DateWindow>,
    /// Divide the region's Low-link tweets by all its tweets instead of
    /// averaging per-user fractions.
    pub pooled: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RegionReport {
    pub stats: Vec<RegionStat>,
    pub diagnostics: Vec<String>,
}

pub fn region_stats(
    resolutions: &BTreeMap<String, GeoResolution>,
    posts: &[ClassifiedPost],
    records: &[VaccineRecord],
    gazetteer: &Gazetteer,
    options: &RegionOptions,
) -> RegionReport {
    let in_window = |d: NaiveDate| options.window.is_none_or(|w| w.contains(d));

    // (tweets, low-link tweets) per author
    let mut per_user: HashMap<&str, (u64, u64)> = HashMap::new();
    for p in posts {
        if p.post.platform == Platform::Twitter && in_window(p.post.date()) {
            let c = per_user.entry(p.post.author_id.as_str()).or_default();
            c.0 += 1;
            c.1 += p.has_class(CredibilityClass::Low) as u64;
        }
    }

    let mut users: BTreeMap<RegionCode, Vec<(u64, u64)>> = BTreeMap::new();
    for r in resolutions.values() {
        if let Some(code) = r.region_code {
            let counts = per_user.get(r.user_id.as_str()).copied().unwrap_or_default();
            users.entry(code).or_default().push(counts);
        }
    }

    let mut doses: BTreeMap<RegionCode, u64> = BTreeMap::new();
    for rec in records.iter().filter(|r| in_window(r.date)) {
        *doses.entry(rec.region_code).or_default() += rec.doses_administered;
    }

    let populations = gazetteer.region_populations();
    let mut report = RegionReport::default();
    for code in RegionCode::ALL {
        let population = match populations.get(&code) {
            Some(&p) if p > 0 => p,
            _ => {
                report.diagnostics.push(format!(
                    "region {code} ({}) has no population in the gazetteer and is left out",
                    code.name()
                ));
                continue;
            }
        };
        let located = users.get(&code).map(Vec::as_slice).unwrap_or_default();
        let active: Vec<(u64, u64)> = located.iter().copied().filter(|c| c.0 > 0).collect();
        let mean_user_low_fraction = if active.is_empty() {
            None
        } else if options.pooled {
            let (n, low) = active.iter().fold((0, 0), |a, c| (a.0 + c.0, a.1 + c.1));
            Some(low as f64 / n as f64)
        } else {
            let sum: f64 = active.iter().map(|&(n, low)| low as f64 / n as f64).sum();
            Some(sum / active.len() as f64)
        };
        let total_doses = doses.get(&code).copied().unwrap_or(0);
        report.stats.push(RegionStat {
            region_code: code,
            users_located: located.len() as u64,
            mean_user_low_fraction,
            total_doses,
            population,
            doses_per_million: total_doses as f64 * 1e6 / population as f64,
        });
    }
    report
}

/// Pearson correlation between located users and population, over every
/// region with a known population.
pub fn users_vs_population_correlation(
    resolutions: &BTreeMap<String, GeoResolution>,
    gazetteer: &Gazetteer,
) -> Result<Correlation> {
    let mut counts: BTreeMap<RegionCode, u64> = BTreeMap::new();
    for code in resolutions.values().filter_map(|r| r.region_code) {
        *counts.entry(code).or_default() += 1;
    }
    let populations = gazetteer.region_populations();
    let with_users = populations.keys().filter(|c| counts.contains_key(c)).count();
    if with_users < 3 {
        return Err(Error::Argument(format!(
            "need at least 3 regions with located users, found {with_users}"
        )));
    }
    let (users, pops): (Vec<f64>, Vec<f64>) = populations
        .iter()
        .map(|(code, &pop)| (counts.get(code).copied().unwrap_or(0) as f64, pop as f64))
        .unzip();
    pearson(&users, &pops)
}

#[derive(Deserialize)]
struct DoseRow {
    date: NaiveDate,
    region_code: String,
    doses_administered: u64,
}

/// Reads `date,region_code,doses_administered` rows, rejecting unknown
/// regions and repeated (date, region) pairs.
pub fn read_vaccine_records(reader: impl Read, source: &Path) -> Result<Vec<VaccineRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<DoseRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::parse(source, line, e.to_string()))?;
        let region_code: RegionCode = row
            .region_code
            .parse()
            .map_err(|e: Error| Error::parse(source, line, e.to_string()))?;
        if !seen.insert((row.date, region_code)) {
            return Err(Error::DuplicateDoses {
                date: row.date,
                region: region_code.code().to_owned(),
            });
        }
        out.push(VaccineRecord {
            date: row.date,
            region_code,
            doses_administered: row.doses_administered,
        });
    }
    Ok(out)
}

pub fn load_vaccine_records(path: impl AsRef<Path>) -> Result<Vec<VaccineRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_vaccine_records(file, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credibility::{Classifier, SourceList, SourceLists};
    use crate::model::{GazetteerEntry, PlaceKind, Post};

    fn gazetteer(regions: &[(RegionCode, Option<u64>)]) -> Gazetteer {
        Gazetteer::build(
            regions
                .iter()
                .map(|(code, pop)| GazetteerEntry::new(code.name(), PlaceKind::Region, *code, *pop).unwrap()),
        )
        .unwrap()
    }

    fn tweets(author: &str, total: usize, low: usize) -> Vec<ClassifiedPost> {
        let low_list = SourceList::new(CredibilityClass::Low, ["byoblu.it"]).unwrap();
        let high_list = SourceList::new(CredibilityClass::High, ["ansa.it"]).unwrap();
        let c = Classifier::new(SourceLists::new(low_list, high_list).unwrap());
        (0..total)
            .map(|i| {
                c.classify_post(Post {
                    platform: Platform::Twitter,
                    post_id: format!("{author}-{i}"),
                    timestamp: "2021-01-05T08:00:00Z".parse().unwrap(),
                    text: String::new(),
                    author_id: author.into(),
                    author_location: None,
                    share_weight: 1,
                    urls: if i < low {
                        vec!["https://byoblu.it/x".into()]
                    } else {
                        vec![]
                    },
                })
            })
            .collect()
    }

    fn located(user: &str, code: Option<RegionCode>) -> (String, GeoResolution) {
        (
            user.to_owned(),
            GeoResolution {
                user_id: user.into(),
                location: "somewhere".into(),
                matched_name: None,
                matched_kind: None,
                region_code: code,
            },
        )
    }

    #[test]
    fn per_user_mean_and_doses() {
        let g = gazetteer(&[
            (RegionCode::Lazio, Some(1_000_000)),
            (RegionCode::Veneto, Some(500)),
            (RegionCode::Sardegna, None),
        ]);
        let res: BTreeMap<_, _> = [
            located("u1", Some(RegionCode::Lazio)),
            located("u2", Some(RegionCode::Lazio)),
            located("u3", Some(RegionCode::Veneto)),
            located("u4", None),
        ]
        .into();
        let mut posts = tweets("u1", 100, 1);
        posts.extend(tweets("u2", 4, 2));
        let records = vec![VaccineRecord {
            date: "2021-01-05".parse().unwrap(),
            region_code: RegionCode::Lazio,
            doses_administered: 1000,
        }];
        let report = region_stats(&res, &posts, &records, &g, &RegionOptions::default());
        assert_eq!(report.stats.len(), 2);
        assert_eq!(report.diagnostics.len(), 18);
        let laz = report
            .stats
            .iter()
            .find(|s| s.region_code == RegionCode::Lazio)
            .unwrap();
        assert_eq!(laz.users_located, 2);
        assert!((laz.mean_user_low_fraction.unwrap() - (0.01 + 0.5) / 2.0).abs() < 1e-15);
        assert_eq!(laz.doses_per_million, 1000.0);
        let ven = report
            .stats
            .iter()
            .find(|s| s.region_code == RegionCode::Veneto)
            .unwrap();
        assert_eq!((ven.users_located, ven.mean_user_low_fraction), (1, None));

        let pooled = region_stats(
            &res,
            &posts,
            &records,
            &g,
            &RegionOptions {
                pooled: true,
                ..Default::default()
            },
        );
        let laz = &pooled.stats[0];
        assert!((laz.mean_user_low_fraction.unwrap() - 3.0 / 104.0).abs() < 1e-15);
    }

    #[test]
    fn single_user_fraction() {
        let g = gazetteer(&[(RegionCode::Lazio, Some(10))]);
        let res: BTreeMap<_, _> = [located("u", Some(RegionCode::Lazio))].into();
        let report = region_stats(&res, &tweets("u", 100, 1), &[], &g, &RegionOptions::default());
        assert_eq!(report.stats[0].mean_user_low_fraction, Some(0.01));
    }

    #[test]
    fn population_correlation() {
        let g = gazetteer(&[
            (RegionCode::Lazio, Some(100)),
            (RegionCode::Veneto, Some(200)),
            (RegionCode::Lombardia, Some(300)),
        ]);
        let mut res = BTreeMap::new();
        let mut n = 0;
        for (code, k) in [
            (RegionCode::Lazio, 1),
            (RegionCode::Veneto, 2),
            (RegionCode::Lombardia, 3),
        ] {
            for _ in 0..k {
                let (id, r) = located(&format!("u{n}"), Some(code));
                res.insert(id, r);
                n += 1;
            }
        }
        let c = users_vs_population_correlation(&res, &g).unwrap();
        assert!((c.coefficient - 1.0).abs() < 1e-12);

        res.retain(|_, r| r.region_code != Some(RegionCode::Lombardia));
        assert!(users_vs_population_correlation(&res, &g).is_err());
    }

    #[test]
    fn doses_loader_rejects_duplicates() {
        let ok = "date,region_code,doses_administered\n2021-01-01,LAZ,10\n2021-01-01,ven,5\n";
        let recs = read_vaccine_records(ok.as_bytes(), Path::new("mem")).unwrap();
        assert_eq!(recs[1].region_code, RegionCode::Veneto);
        let dup = format!("{ok}2021-01-01,LAZ,3\n");
        assert!(matches!(
            read_vaccine_records(dup.as_bytes(), Path::new("mem")),
            Err(Error::DuplicateDoses { .. })
        ));
        let bad = "date,region_code,doses_administered\n2021-01-01,XXX,1\n";
        assert!(read_vaccine_records(bad.as_bytes(), Path::new("mem")).is_err());
    }
}
