#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use infodemic_core::credibility::{Classifier, SourceList, SourceLists};
use infodemic_core::report::{build_snapshot, ReportInputs};
use infodemic_core::videos::{VideoRecord, VideoStatus};
use infodemic_core::{
    geolocate_users, CredibilityClass, Gazetteer, GazetteerEntry, PlaceKind, Platform, Post, RegionCode, Snapshot,
    VaccineRecord,
};
use infodemic_service::SnapshotStore;

/// A small corpus whose counts scale with `variant`, so snapshots built
/// from different variants differ in every file.
pub fn snapshot(variant: u64, generated_at: &str) -> Snapshot {
    let low = SourceList::new(CredibilityClass::Low, ["byoblu.it", "imolaoggi.it", "voxnews.info"]).unwrap();
    let high = SourceList::new(CredibilityClass::High, ["ansa.it", "corriere.it"]).unwrap();
    let lists = SourceLists::new(low, high).unwrap();
    let c = Classifier::new(lists.clone());
    let domains = [
        "byoblu.it",
        "imolaoggi.it",
        "voxnews.info",
        "ansa.it",
        "corriere.it",
        "example.org",
    ];
    let places = ["Roma", "Milano", "Napoli, Campania", "Torino", "Venezia"];
    let mut posts = Vec::new();
    for i in 0..(60 + variant * 7) {
        let platform = if i % 4 == 0 {
            Platform::Facebook
        } else {
            Platform::Twitter
        };
        let domain = domains[(i * (variant + 1) % 6) as usize];
        posts.push(c.classify_post(Post {
            platform,
            post_id: format!("p{i}"),
            timestamp: format!("2021-01-{:02}T09:00:00Z", 1 + i % 5).parse().unwrap(),
            text: "vaccino".into(),
            author_id: format!("u{}", i % 9),
            author_location: Some(places[(i % 5) as usize].into()),
            share_weight: 1 + (i * 3 + variant) % 11,
            urls: vec![format!("https://{domain}/a{i}"), "https://youtu.be/kHGtn_vnrJ8".into()],
        }));
    }
    let g = Gazetteer::build([
        GazetteerEntry::new("Lazio", PlaceKind::Region, RegionCode::Lazio, Some(5_700_000)).unwrap(),
        GazetteerEntry::new("Lombardia", PlaceKind::Region, RegionCode::Lombardia, Some(10_000_000)).unwrap(),
        GazetteerEntry::new("Campania", PlaceKind::Region, RegionCode::Campania, Some(5_800_000)).unwrap(),
        GazetteerEntry::new("Piemonte", PlaceKind::Region, RegionCode::Piemonte, Some(4_300_000)).unwrap(),
        GazetteerEntry::new("Roma", PlaceKind::Municipality, RegionCode::Lazio, None).unwrap(),
        GazetteerEntry::new("Milano", PlaceKind::Municipality, RegionCode::Lombardia, None).unwrap(),
        GazetteerEntry::new("Napoli", PlaceKind::Municipality, RegionCode::Campania, None).unwrap(),
        GazetteerEntry::new("Torino", PlaceKind::Municipality, RegionCode::Piemonte, None).unwrap(),
    ])
    .unwrap();
    let raw: Vec<Post> = posts.iter().map(|p| p.post.clone()).collect();
    let resolutions = geolocate_users(&raw, &g);
    let doses = vec![VaccineRecord {
        date: "2021-01-03".parse().unwrap(),
        region_code: RegionCode::Lazio,
        doses_administered: 1000 * (variant + 1),
    }];
    let fetched_at = "2021-01-06T00:00:00Z".parse().unwrap();
    let videos = vec![
        VideoRecord {
            video_id: "kHGtn_vnrJ8".parse().unwrap(),
            status: VideoStatus::Available,
            title: Some("Intervista".into()),
            channel_id: Some("UCabc".into()),
            view_count: Some(1234 + variant),
            tweet_shares: 3,
            facebook_shares: 9,
            fetched_at,
        },
        VideoRecord {
            video_id: "AAAAAAAAAAA".parse().unwrap(),
            status: VideoStatus::Removed,
            title: None,
            channel_id: None,
            view_count: None,
            tweet_shares: 1,
            facebook_shares: 0,
            fetched_at,
        },
    ];
    let inputs = ReportInputs {
        posts: &posts,
        lists: &lists,
        resolutions: &resolutions,
        gazetteer: &g,
        doses: &doses,
        videos: &videos,
        window: None,
        keyword_version: Some("2020-12-01".parse().unwrap()),
        generated_at: generated_at.parse().unwrap(),
        pooled_regions: false,
    };
    build_snapshot(&inputs).unwrap().0
}

pub fn write(root: &Path, name: &str, variant: u64, generated_at: &str) -> String {
    snapshot(variant, generated_at).write_to(&root.join(name)).unwrap()
}

pub struct Server {
    pub base: String,
    pub store: Arc<SnapshotStore>,
    shutdown: Option<tokio::sync::oneshot::Sender<()>>,
    task: Option<tokio::task::JoinHandle<std::io::Result<()>>>,
}

impl Server {
    pub async fn start(root: &Path, poll: Duration) -> Server {
        let store = Arc::new(SnapshotStore::open(root).unwrap());
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let (tx, rx) = tokio::sync::oneshot::channel::<()>();
        let task = tokio::spawn(infodemic_service::serve(
            Arc::clone(&store),
            listener,
            poll,
            async move {
                let _ = rx.await;
            },
        ));
        Server {
            base,
            store,
            shutdown: Some(tx),
            task: Some(task),
        }
    }

    pub async fn stop(mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(task) = self.task.take() {
            task.await.unwrap().unwrap();
        }
    }
}

pub fn schema_for(def: &str) -> jsonschema::Validator {
    let mut root: serde_json::Value = serde_json::from_str(infodemic_service::API_SCHEMA).unwrap();
    root.as_object_mut()
        .unwrap()
        .insert("$ref".into(), format!("#/$defs/{def}").into());
    jsonschema::validator_for(&root).unwrap()
}

pub fn assert_valid(def: &str, body: &serde_json::Value) {
    let v = schema_for(def);
    let errors: Vec<String> = v
        .iter_errors(body)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{def}: {errors:#?}\n{body:#}");
}

pub const ENDPOINTS: [(&str, &str); 9] = [
    ("/api/timeseries/volume", "volume_response"),
    (
        "/api/timeseries/volume?platform=twitter&from=2021-01-02&to=2021-01-03",
        "volume_response",
    ),
    ("/api/timeseries/credibility?platform=facebook", "credibility_response"),
    ("/api/leaderboard?platform=facebook&k=2", "leaderboard_response"),
    ("/api/leaderboard", "leaderboard_response"),
    ("/api/regions", "regions_response"),
    ("/api/videos/top?platform=twitter&k=5", "videos_top_response"),
    ("/api/correlations", "correlations_response"),
    ("/api/meta", "meta_response"),
];
