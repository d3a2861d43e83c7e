//! Read-only JSON API over the aggregate report snapshots.
//!
//! The service publishes the newest complete snapshot found under a root
//! directory and swaps in newer ones as they appear. Handlers take one
//! reference to the published snapshot per request, so a response never
//! mixes two snapshots.

mod api;
mod range;
mod store;

use std::future::Future;
use std::sync::Arc;
use std::time::Duration;

pub use api::{router, ApiError, DEFAULT_LEADERBOARD_K, DEFAULT_VIDEOS_K, MAX_K};
pub use range::{filter_range, Dated};
pub use store::SnapshotStore;

/// JSON Schema for every response body, keyed under `$defs` by endpoint.
pub const API_SCHEMA: &str = include_str!("../../../schema/api.schema.json");

/// Serves `store` on `listener`, polling for new snapshots every `poll`
/// until `shutdown` resolves.
pub async fn serve(
    store: Arc<SnapshotStore>,
    listener: tokio::net::TcpListener,
    poll: Duration,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let watcher = store.spawn_watcher(poll);
    let result = axum::serve(listener, router(store))
        .with_graceful_shutdown(shutdown)
        .await;
    watcher.abort();
    result
}
