use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use arc_swap::ArcSwap;
use infodemic_core::report::{snapshot_candidates, Snapshot};
use infodemic_core::Result;

/// The published snapshot, replaced whole when a newer complete snapshot
/// appears under the root directory.
pub struct SnapshotStore {
    root: PathBuf,
    current: ArcSwap<Snapshot>,
}

impl SnapshotStore {
    /// Loads the newest complete snapshot under `root`, failing if there is
    /// none.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        let snapshot = infodemic_core::load_latest_snapshot(&root)?;
        Ok(SnapshotStore {
            root,
            current: ArcSwap::from_pointee(snapshot),
        })
    }

    /// A store serving a fixed snapshot, with reloads reading from `root`.
    pub fn with_snapshot(root: impl Into<PathBuf>, snapshot: Snapshot) -> Self {
        SnapshotStore {
            root: root.into(),
            current: ArcSwap::from_pointee(snapshot),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn current(&self) -> Arc<Snapshot> {
        self.current.load_full()
    }

    /// Publishes the newest snapshot that verifies, if it differs from the
    /// current one. Incomplete directories are skipped; nothing older than
    /// the current snapshot is ever published.
    pub fn reload(&self) -> Result<bool> {
        let current = self.current();
        for (dir, manifest) in snapshot_candidates(&self.root)? {
            if manifest.snapshot_id == current.manifest.snapshot_id
                || manifest.generated_at < current.manifest.generated_at
            {
                return Ok(false);
            }
            match Snapshot::load(&dir) {
                Ok(s) => {
                    tracing::info!(snapshot = %s.id(), dir = %dir.display(), "publishing snapshot");
                    self.current.store(Arc::new(s));
                    return Ok(true);
                }
                Err(e) => tracing::debug!(dir = %dir.display(), error = %e, "skipping snapshot"),
            }
        }
        Ok(false)
    }

    /// Polls for new snapshots every `every` until the task is dropped.
    pub fn spawn_watcher(self: &Arc<Self>, every: Duration) -> tokio::task::JoinHandle<()> {
        let store = Arc::clone(self);
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(every);
            tick.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
            loop {
                tick.tick().await;
                let s = Arc::clone(&store);
                match tokio::task::spawn_blocking(move || s.reload()).await {
                    Ok(Err(e)) => tracing::warn!(error = %e, "snapshot reload failed"),
                    Err(e) => tracing::warn!(error = %e, "snapshot reload panicked"),
                    Ok(Ok(_)) => {}
                }
            }
        })
    }
}
