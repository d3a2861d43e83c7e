//! Domain types shared across the pipeline.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Days, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::normalize_text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platform {
    Twitter,
    Facebook,
}

impl Platform {
    pub const ALL: [Platform; 2] = [Platform::Twitter, Platform::Facebook];

    pub fn as_str(self) -> &'static str {
        match self {
            Platform::Twitter => "twitter",
            Platform::Facebook => "facebook",
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Platform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "twitter" => Ok(Platform::Twitter),
            "facebook" => Ok(Platform::Facebook),
            other => Err(Error::Argument(format!("unknown platform {other:?}"))),
        }
    }
}

/// One collected item: a tweet (including retweets) or a public page/group post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub platform: Platform,
    pub post_id: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
    pub author_id: String,
    #[serde(default)]
    pub author_location: Option<String>,
    /// 1 for a tweet, the share count for a Facebook post.
    pub share_weight: u64,
    #[serde(default)]
    pub urls: Vec<String>,
}

impl Post {
    pub fn validate(&self) -> Result<()> {
        if self.post_id.trim().is_empty() {
            return Err(Error::Argument("post_id is empty".into()));
        }
        if self.platform == Platform::Twitter && self.share_weight < 1 {
            return Err(Error::Argument(format!("tweet {} has share_weight 0", self.post_id)));
        }
        Ok(())
    }

    pub fn date(&self) -> NaiveDate {
        self.timestamp.date_naive()
    }

    /// Profile location, if present and not blank.
    pub fn location(&self) -> Option<&str> {
        self.author_location.as_deref().map(str::trim).filter(|l| !l.is_empty())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CredibilityClass {
    Low,
    High,
    Unknown,
}

impl CredibilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CredibilityClass::Low => "low",
            CredibilityClass::High => "high",
            CredibilityClass::Unknown => "unknown",
        }
    }
}

impl fmt::Display for CredibilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CredibilityClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Ok(CredibilityClass::Low),
            "high" => Ok(CredibilityClass::High),
            "unknown" => Ok(CredibilityClass::Unknown),
            other => Err(Error::Argument(format!("unknown credibility class {other:?}"))),
        }
    }
}

macro_rules! regions {
    ($($variant:ident => $code:literal, $name:literal;)+) => {
        /// The 20 Italian regions, keyed by the short codes used in the
        /// vaccine open-data releases (Trentino-Alto Adige as a single unit).
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum RegionCode {
            $($variant,)+
        }

        impl RegionCode {
            pub const ALL: [RegionCode; 20] = [$(RegionCode::$variant,)+];

            pub fn code(self) -> &'static str {
                match self {
                    $(RegionCode::$variant => $code,)+
                }
            }

            pub fn name(self) -> &'static str {
                match self {
                    $(RegionCode::$variant => $name,)+
                }
            }
        }

        impl FromStr for RegionCode {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_uppercase().as_str() {
                    $($code => Ok(RegionCode::$variant),)+
                    _ => Err(Error::UnknownRegion(s.to_owned())),
                }
            }
        }
    };
}

regions! {
    Abruzzo => "ABR", "Abruzzo";
    Basilicata => "BAS", "Basilicata";
    Calabria => "CAL", "Calabria";
    Campania => "CAM", "Campania";
    EmiliaRomagna => "EMR", "Emilia-Romagna";
    FriuliVeneziaGiulia => "FVG", "Friuli-Venezia Giulia";
    Lazio => "LAZ", "Lazio";
    Liguria => "LIG", "Liguria";
    Lombardia => "LOM", "Lombardia";
    Marche => "MAR", "Marche";
    Molise => "MOL", "Molise";
    Piemonte => "PIE", "Piemonte";
    Puglia => "PUG", "Puglia";
    Sardegna => "SAR", "Sardegna";
    Sicilia => "SIC", "Sicilia";
    Toscana => "TOS", "Toscana";
    TrentinoAltoAdige => "TAA", "Trentino-Alto Adige";
    Umbria => "UMB", "Umbria";
    ValleDAosta => "VDA", "Valle d'Aosta";
    Veneto => "VEN", "Veneto";
}

impl fmt::Display for RegionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for RegionCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for RegionCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Administrative level of a gazetteer name. The declaration order is the
/// tie-break priority used by geolocation (regions first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceKind {
    Region,
    Province,
    Municipality,
}

impl fmt::Display for PlaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlaceKind::Region => "region",
            PlaceKind::Province => "province",
            PlaceKind::Municipality => "municipality",
        })
    }
}

impl FromStr for PlaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "region" => Ok(PlaceKind::Region),
            "province" => Ok(PlaceKind::Province),
            "municipality" => Ok(PlaceKind::Municipality),
            other => Err(Error::Argument(format!("unknown place kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GazetteerEntry {
    pub name_normalized: String,
    pub kind: PlaceKind,
    pub region_code: RegionCode,
    /// Resident population; only meaningful on region entries.
    pub population: Option<u64>,
}

impl GazetteerEntry {
    pub fn new(name: &str, kind: PlaceKind, region_code: RegionCode, population: Option<u64>) -> Result<Self> {
        let name_normalized = normalize_text(name);
        if name_normalized.is_empty() {
            return Err(Error::Argument(format!("empty place name {name:?}")));
        }
        Ok(GazetteerEntry {
            name_normalized,
            kind,
            region_code,
            population,
        })
    }
}

/// Per-day, per-platform aggregate. Counts are weighted: one per tweet, the
/// share count per Facebook post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyStat {
    pub date: NaiveDate,
    pub platform: Platform,
    pub volume: u64,
    pub low_count: u64,
    pub high_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VaccineRecord {
    pub date: NaiveDate,
    pub region_code: RegionCode,
    pub doses_administered: u64,
}

/// Inclusive calendar-day range, used for the collection and analysis windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start > end {
            return Err(Error::Argument(format!("window start {start} is after end {end}")));
        }
        Ok(DateWindow { start, end })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        let end = self.end;
        std::iter::successors(Some(self.start), |d| d.checked_add_days(Days::new(1))).take_while(move |d| *d <= end)
    }

    pub fn len_days(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tweet() -> Post {
        Post {
            platform: Platform::Twitter,
            post_id: "1".into(),
            timestamp: "2020-12-27T10:00:00Z".parse().unwrap(),
            text: "Il vaccino è qui".into(),
            author_id: "u1".into(),
            author_location: Some("Milano".into()),
            share_weight: 1,
            urls: vec![],
        }
    }

    #[test]
    fn post_invariants() {
        assert!(tweet().validate().is_ok());
        let mut p = tweet();
        p.share_weight = 0;
        assert!(p.validate().is_err());
        p.platform = Platform::Facebook;
        assert!(p.validate().is_ok());
        p.post_id = " ".into();
        assert!(p.validate().is_err());
    }

    #[test]
    fn post_json_shape() {
        let json = serde_json::to_value(tweet()).unwrap();
        assert_eq!(json["platform"], "twitter");
        assert_eq!(json["timestamp"], "2020-12-27T10:00:00Z");
        assert_eq!(json["share_weight"], 1);
    }

    #[test]
    fn region_codes_round_trip() {
        assert_eq!(RegionCode::ALL.len(), 20);
        for r in RegionCode::ALL {
            assert_eq!(r.code().parse::<RegionCode>().unwrap(), r);
        }
        assert_eq!("lom".parse::<RegionCode>().unwrap(), RegionCode::Lombardia);
        assert!(matches!("XYZ".parse::<RegionCode>(), Err(Error::UnknownRegion(_))));
    }

    #[test]
    fn place_kind_priority() {
        assert!(PlaceKind::Region < PlaceKind::Province);
        assert!(PlaceKind::Province < PlaceKind::Municipality);
    }

    #[test]
    fn gazetteer_entry_normalizes() {
        let e = GazetteerEntry::new("  Forlì ", PlaceKind::Municipality, RegionCode::EmiliaRomagna, None).unwrap();
        assert_eq!(e.name_normalized, "forli");
        assert!(GazetteerEntry::new(" ", PlaceKind::Region, RegionCode::Lazio, None).is_err());
    }

    #[test]
    fn window_days() {
        let w = DateWindow::new(
            NaiveDate::from_ymd_opt(2020, 12, 30).unwrap(),
            NaiveDate::from_ymd_opt(2021, 1, 2).unwrap(),
        )
        .unwrap();
        assert_eq!(w.days().count(), 4);
        assert_eq!(w.len_days(), 4);
        assert!(DateWindow::new(w.end, w.start).is_err());
    }
}
