use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{Context, Result};
use chrono::{DateTime, NaiveDate, Utc};
use clap::{Args, Parser, Subcommand};
use infodemic_cli::{AggregateConfig, RunConfig};
use infodemic_core::{DateWindow, Platform};
use infodemic_service::SnapshotStore;
use serde::Serialize;

/// Vaccine-conversation monitoring pipeline.
#[derive(Parser)]
#[command(name = "infodemic", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a platform feed and keep keyword-matching posts as NDJSON.
    Ingest {
        #[arg(long)]
        platform: Platform,
        #[arg(long)]
        input: PathBuf,
        /// Keyword file; defaults to the built-in vaccine keywords.
        #[arg(long)]
        keywords: Option<PathBuf>,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Look up YouTube videos linked from stored posts.
    EnrichVideos {
        #[arg(long = "posts", required = true)]
        posts: Vec<PathBuf>,
        /// Metadata CSV: video_id,title,channel_id,view_count.
        #[arg(long)]
        metadata: PathBuf,
        #[arg(long)]
        redirects: Option<PathBuf>,
        /// Fetch timestamp recorded on each video (RFC 3339); defaults to now.
        #[arg(long)]
        as_of: Option<DateTime<Utc>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a report snapshot from stored posts.
    Aggregate {
        #[command(flatten)]
        inputs: AggregateArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ingest, enrich and aggregate in one go.
    Run {
        #[arg(long)]
        twitter: PathBuf,
        #[arg(long)]
        facebook: PathBuf,
        #[arg(long)]
        keywords: Option<PathBuf>,
        #[arg(long)]
        low: PathBuf,
        #[arg(long)]
        high: PathBuf,
        #[arg(long)]
        gazetteer: PathBuf,
        #[arg(long)]
        doses: PathBuf,
        #[arg(long)]
        metadata: PathBuf,
        #[arg(long)]
        redirects: Option<PathBuf>,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        as_of: Option<DateTime<Utc>>,
        /// Directory for intermediate files.
        #[arg(long)]
        work: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve report snapshots over HTTP.
    Serve {
        /// A snapshot directory, or a directory of snapshot directories.
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Seconds between checks for a newer snapshot.
        #[arg(long, default_value_t = 2.0)]
        poll: f64,
    },
}

#[derive(Args)]
struct WindowArgs {
    /// First day to keep (YYYY-MM-DD).
    #[arg(long)]
    from: Option<NaiveDate>,
    /// Last day to keep (YYYY-MM-DD).
    #[arg(long, requires = "from")]
    to: Option<NaiveDate>,
}

impl WindowArgs {
    fn window(&self) -> Result<Option<DateWindow>> {
        match (self.from, self.to) {
            (Some(from), Some(to)) => Ok(Some(DateWindow::new(from, to)?)),
            (Some(_), None) => anyhow::bail!("--from needs --to"),
            _ => Ok(None),
        }
    }
}

#[derive(Args)]
struct AggregateArgs {
    #[arg(long = "posts", required = true)]
    posts: Vec<PathBuf>,
    #[arg(long)]
    low: PathBuf,
    #[arg(long)]
    high: PathBuf,
    #[arg(long)]
    gazetteer: PathBuf,
    #[arg(long)]
    doses: PathBuf,
    /// Video table written by enrich-videos.
    #[arg(long)]
    videos: Option<PathBuf>,
    #[arg(long)]
    redirects: Option<PathBuf>,
    /// Keyword file, recorded as the snapshot's keyword version.
    #[arg(long)]
    keywords: Option<PathBuf>,
    #[command(flatten)]
    window: WindowArgs,
    /// Report timestamp (RFC 3339); defaults to the end of the window.
    #[arg(long)]
    as_of: Option<DateTime<Utc>>,
    /// Pool tweets per region instead of averaging per-user fractions.
    #[arg(long)]
    pooled: bool,
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();

    match Cli::parse().command {
        Command::Ingest {
            platform,
            input,
            keywords,
            window,
            out,
        } => {
            let kw = infodemic_cli::load_keywords(keywords.as_deref())?;
            print_json(&infodemic_cli::ingest(platform, &input, &kw, window.window()?, &out)?)
        }
        Command::EnrichVideos {
            posts,
            metadata,
            redirects,
            as_of,
            out,
        } => {
            let at = as_of.unwrap_or_else(Utc::now);
            print_json(&infodemic_cli::enrich(
                &posts,
                &metadata,
                redirects.as_deref(),
                at,
                &out,
            )?)
        }
        Command::Aggregate { inputs, out } => {
            let cfg = AggregateConfig {
                window: inputs.window.window()?,
                posts: inputs.posts,
                low: inputs.low,
                high: inputs.high,
                gazetteer: inputs.gazetteer,
                doses: inputs.doses,
                videos: inputs.videos,
                redirects: inputs.redirects,
                keywords: inputs.keywords,
                as_of: inputs.as_of,
                pooled_regions: inputs.pooled,
            };
            print_json(&infodemic_cli::aggregate(&cfg, &out)?)
        }
        Command::Run {
            twitter,
            facebook,
            keywords,
            low,
            high,
            gazetteer,
            doses,
            metadata,
            redirects,
            window,
            as_of,
            work,
            out,
        } => {
            let cfg = RunConfig {
                window: window.window()?,
                twitter,
                facebook,
                keywords,
                low,
                high,
                gazetteer,
                doses,
                metadata,
                redirects,
                as_of,
                work,
                out,
            };
            print_json(&infodemic_cli::run(&cfg)?)
        }
        Command::Serve { snapshot, bind, poll } => serve(snapshot, bind, poll),
    }
}

fn serve(root: PathBuf, bind: SocketAddr, poll: f64) -> Result<()> {
    let store = SnapshotStore::open(&root).with_context(|| format!("no usable snapshot under {}", root.display()))?;
    let store = Arc::new(store);
    tracing::info!(snapshot = %store.current().id(), "loaded snapshot");
    let poll = Duration::try_from_secs_f64(poll).context("--poll must be a positive number of seconds")?;
    tokio::runtime::Runtime::new()?.block_on(async move {
        let listener = tokio::net::TcpListener::bind(bind)
            .await
            .with_context(|| format!("binding {bind}"))?;
        tracing::info!("listening on http://{}", listener.local_addr()?);
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        infodemic_service::serve(store, listener, poll, shutdown).await?;
        Ok(())
    })
}
