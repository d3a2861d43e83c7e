//! HTTP handlers. Every response body is `{"snapshot_id", "data"}`, built
//! from a single snapshot loaded once per request.

use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use chrono::NaiveDate;
use infodemic_core::analytics::{truncate_leaderboard, FractionSeries, RegionStat};
use infodemic_core::videos::top_videos;
use infodemic_core::{Platform, RegionCode, Snapshot};
use serde::{Deserialize, Serialize};

use crate::range::filter_range;
use crate::store::SnapshotStore;

pub const DEFAULT_LEADERBOARD_K: usize = 20;
pub const DEFAULT_VIDEOS_K: usize = 10;
pub const MAX_K: usize = 1000;

pub fn router(store: Arc<SnapshotStore>) -> Router {
    Router::new()
        .route("/api/timeseries/volume", get(volume))
        .route("/api/timeseries/credibility", get(credibility))
        .route("/api/leaderboard", get(leaderboard))
        .route("/api/regions", get(regions))
        .route("/api/videos/top", get(videos_top))
        .route("/api/correlations", get(correlations))
        .route("/api/meta", get(meta))
        .fallback(not_found)
        .with_state(store)
}

#[derive(Debug, Serialize)]
struct Envelope<T> {
    snapshot_id: String,
    data: T,
}

fn reply<T: Serialize>(snapshot: &Snapshot, data: T) -> Response {
    Json(Envelope {
        snapshot_id: snapshot.id().to_owned(),
        data,
    })
    .into_response()
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn bad_param(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: "invalid_parameter",
            message: message.into(),
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    status: u16,
    code: &'a str,
    message: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: ErrorDetail {
                status: self.status.as_u16(),
                code: self.code,
                message: &self.message,
            },
        };
        (self.status, Json(body)).into_response()
    }
}

async fn not_found() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        code: "not_found",
        message: "no such endpoint".into(),
    }
}

#[derive(Debug, Default, Deserialize)]
struct Params {
    platform: Option<String>,
    from: Option<String>,
    to: Option<String>,
    k: Option<String>,
    region: Option<String>,
}

type ParamsResult = Result<Query<Params>, QueryRejection>;

fn params(q: ParamsResult) -> Result<Params, ApiError> {
    q.map(|Query(p)| p).map_err(|e| ApiError::bad_param(e.body_text()))
}

impl Params {
    fn platform(&self) -> Result<Option<Platform>, ApiError> {
        self.platform
            .as_deref()
            .map(|s| {
                s.parse()
                    .map_err(|_| ApiError::bad_param(format!("platform must be twitter or facebook, got {s:?}")))
            })
            .transpose()
    }

    fn date(name: &str, value: Option<&str>) -> Result<Option<NaiveDate>, ApiError> {
        value
            .map(|s| {
                NaiveDate::parse_from_str(s, "%Y-%m-%d")
                    .map_err(|_| ApiError::bad_param(format!("{name} must be a YYYY-MM-DD date, got {s:?}")))
            })
            .transpose()
    }

    fn range(&self) -> Result<(NaiveDate, NaiveDate), ApiError> {
        let from = Self::date("from", self.from.as_deref())?.unwrap_or(NaiveDate::MIN);
        let to = Self::date("to", self.to.as_deref())?.unwrap_or(NaiveDate::MAX);
        if from > to {
            return Err(ApiError::bad_param(format!("from {from} is after to {to}")));
        }
        Ok((from, to))
    }

    fn k(&self, default: usize) -> Result<usize, ApiError> {
        match self.k.as_deref() {
            None => Ok(default),
            Some(s) => match s.parse::<usize>() {
                Ok(k) if (1..=MAX_K).contains(&k) => Ok(k),
                _ => Err(ApiError::bad_param(format!(
                    "k must be an integer in 1..={MAX_K}, got {s:?}"
                ))),
            },
        }
    }

    fn region(&self) -> Result<Option<RegionCode>, ApiError> {
        self.region
            .as_deref()
            .map(|s| {
                s.parse()
                    .map_err(|_| ApiError::bad_param(format!("unknown region code {s:?}")))
            })
            .transpose()
    }
}

fn bad_range(e: infodemic_core::Error) -> ApiError {
    ApiError::bad_param(e.to_string())
}

async fn volume(State(store): State<Arc<SnapshotStore>>, q: ParamsResult) -> Result<Response, ApiError> {
    let p = params(q)?;
    let platform = p.platform()?;
    let (from, to) = p.range()?;
    let snap = store.current();
    let mut rows = filter_range(&snap.volume, from, to).map_err(bad_range)?;
    rows.retain(|r| platform.is_none_or(|pl| r.platform == pl));
    Ok(reply(&snap, rows))
}

async fn credibility(State(store): State<Arc<SnapshotStore>>, q: ParamsResult) -> Result<Response, ApiError> {
    let p = params(q)?;
    let platform = p.platform()?;
    let (from, to) = p.range()?;
    let snap = store.current();
    let series = snap
        .fractions
        .iter()
        .filter(|s| platform.is_none_or(|pl| s.platform == pl))
        .map(|s| {
            Ok(FractionSeries {
                platform: s.platform,
                points: filter_range(&s.points, from, to).map_err(bad_range)?,
            })
        })
        .collect::<Result<Vec<_>, ApiError>>()?;
    Ok(reply(&snap, series))
}

#[derive(Serialize)]
struct Ranked<T> {
    platform: Platform,
    k: usize,
    entries: Vec<T>,
}

async fn leaderboard(State(store): State<Arc<SnapshotStore>>, q: ParamsResult) -> Result<Response, ApiError> {
    let p = params(q)?;
    let platform = p.platform()?.unwrap_or(Platform::Twitter);
    let k = p.k(DEFAULT_LEADERBOARD_K)?;
    let snap = store.current();
    let full = snap.leaderboards.get(&platform).map(Vec::as_slice).unwrap_or_default();
    Ok(reply(
        &snap,
        Ranked {
            platform,
            k,
            entries: truncate_leaderboard(full, k),
        },
    ))
}

#[derive(Serialize)]
struct RegionView<'a> {
    region_name: &'static str,
    #[serde(flatten)]
    stat: &'a RegionStat,
}

async fn regions(State(store): State<Arc<SnapshotStore>>, q: ParamsResult) -> Result<Response, ApiError> {
    let p = params(q)?;
    let region = p.region()?;
    let snap = store.current();
    let rows: Vec<RegionView> = snap
        .regions
        .iter()
        .filter(|r| region.is_none_or(|c| r.region_code == c))
        .map(|stat| RegionView {
            region_name: stat.region_code.name(),
            stat,
        })
        .collect();
    Ok(reply(&snap, rows))
}

async fn videos_top(State(store): State<Arc<SnapshotStore>>, q: ParamsResult) -> Result<Response, ApiError> {
    let p = params(q)?;
    let platform = p.platform()?.unwrap_or(Platform::Twitter);
    let k = p.k(DEFAULT_VIDEOS_K)?;
    let snap = store.current();
    let entries = top_videos(&snap.videos, k, platform).map_err(|e| ApiError::bad_param(e.to_string()))?;
    Ok(reply(&snap, Ranked { platform, k, entries }))
}

async fn correlations(State(store): State<Arc<SnapshotStore>>, q: ParamsResult) -> Result<Response, ApiError> {
    params(q)?;
    let snap = store.current();
    Ok(reply(&snap, &snap.correlations))
}

async fn meta(State(store): State<Arc<SnapshotStore>>, q: ParamsResult) -> Result<Response, ApiError> {
    params(q)?;
    let snap = store.current();
    Ok(reply(&snap, &snap.manifest))
}
