mod common;

use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Duration;

use common::{assert_valid, write, Server, ENDPOINTS};
use infodemic_service::SnapshotStore;
use serde_json::Value;

async fn get(client: &reqwest::Client, url: &str) -> (u16, Value) {
    let resp = client.get(url).send().await.unwrap();
    let status = resp.status().as_u16();
    (status, resp.json().await.unwrap())
}

#[tokio::test]
async fn every_endpoint_matches_schema() {
    let root = tempfile::tempdir().unwrap();
    let id = write(root.path(), "s1", 0, "2021-01-06T00:00:00Z");
    let server = Server::start(root.path(), Duration::from_secs(3600)).await;
    let client = reqwest::Client::new();
    for (path, def) in ENDPOINTS {
        let (status, body) = get(&client, &format!("{}{path}", server.base)).await;
        assert_eq!(status, 200, "{path}: {body}");
        assert_eq!(body["snapshot_id"], id.as_str(), "{path}");
        assert_valid(def, &body);
    }
    server.stop().await;
}

#[tokio::test]
async fn query_filters() {
    let root = tempfile::tempdir().unwrap();
    write(root.path(), "s1", 0, "2021-01-06T00:00:00Z");
    let server = Server::start(root.path(), Duration::from_secs(3600)).await;
    let c = reqwest::Client::new();
    let url = |p: &str| format!("{}{p}", server.base);

    let (_, all) = get(&c, &url("/api/timeseries/volume")).await;
    assert_eq!(all["data"].as_array().unwrap().len(), 10);
    let (_, tw) = get(
        &c,
        &url("/api/timeseries/volume?platform=twitter&from=2021-01-02&to=2021-01-03"),
    )
    .await;
    let rows = tw["data"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["platform"] == "twitter"));
    let (_, none) = get(&c, &url("/api/timeseries/volume?from=2022-01-01")).await;
    assert!(none["data"].as_array().unwrap().is_empty());

    let (_, board) = get(&c, &url("/api/leaderboard?platform=facebook&k=2")).await;
    let entries = board["data"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 3);
    assert_eq!(entries.iter().filter(|e| e["is_pseudo"] == true).count(), 1);

    let (_, lazio) = get(&c, &url("/api/regions?region=LAZ")).await;
    let rows = lazio["data"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["region_name"], "Lazio");
    assert_eq!(rows[0]["total_doses"], 1000);

    let (_, vids) = get(&c, &url("/api/videos/top?platform=facebook&k=1")).await;
    assert_eq!(vids["data"]["entries"][0]["video_id"], "kHGtn_vnrJ8");
    server.stop().await;
}

#[tokio::test]
async fn malformed_queries_get_structured_errors() {
    let root = tempfile::tempdir().unwrap();
    write(root.path(), "s1", 0, "2021-01-06T00:00:00Z");
    let server = Server::start(root.path(), Duration::from_secs(3600)).await;
    let c = reqwest::Client::new();
    for (path, expected) in [
        ("/api/timeseries/volume?platform=myspace", 400),
        ("/api/timeseries/volume?from=2021-01-05&to=2021-01-01", 400),
        ("/api/timeseries/credibility?from=yesterday", 400),
        ("/api/leaderboard?k=0", 400),
        ("/api/leaderboard?k=twenty", 400),
        ("/api/videos/top?k=100000", 400),
        ("/api/regions?region=XYZ", 400),
        ("/api/nothing", 404),
    ] {
        let (status, body) = get(&c, &format!("{}{path}", server.base)).await;
        assert_eq!(status, expected, "{path}");
        assert_eq!(body["error"]["status"], expected, "{path}");
        assert_valid("error_response", &body);
    }
    server.stop().await;
}

#[tokio::test]
async fn refuses_to_start_without_a_snapshot() {
    let root = tempfile::tempdir().unwrap();
    assert!(SnapshotStore::open(root.path()).is_err());
    assert!(SnapshotStore::open(root.path().join("missing")).is_err());

    // a manifest whose files were never written does not count
    let dir = root.path().join("broken");
    write(root.path(), "broken", 0, "2021-01-06T00:00:00Z");
    std::fs::remove_file(dir.join("volume.csv")).unwrap();
    assert!(SnapshotStore::open(root.path()).is_err());
}

async fn record(client: &reqwest::Client, base: &str, id: &str) -> Vec<((String, &'static str), Value)> {
    let mut out = Vec::new();
    for (path, _) in ENDPOINTS {
        let (_, body) = get(client, &format!("{base}{path}")).await;
        assert_eq!(body["snapshot_id"], id);
        out.push(((id.to_owned(), path), body));
    }
    out
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn hot_swap_never_mixes_snapshots() {
    let root = tempfile::tempdir().unwrap();
    let first = write(root.path(), "s00", 0, "2021-01-06T00:00:00Z");
    let server = Server::start(root.path(), Duration::from_millis(20)).await;
    let client = reqwest::Client::new();

    // body expected for each (snapshot, endpoint), recorded from a quiet server
    let mut expected: BTreeMap<(String, &str), Value> = BTreeMap::new();
    expected.extend(record(&client, &server.base, &first).await);
    let mut ids = vec![first];
    for v in 1..=4u64 {
        let id = write(
            root.path(),
            &format!("s{v:02}"),
            v,
            &format!("2021-01-06T00:00:{v:02}Z"),
        );
        assert!(server.store.reload().unwrap());
        expected.extend(record(&client, &server.base, &id).await);
        ids.push(id);
    }
    assert_eq!(ids.iter().collect::<HashSet<_>>().len(), 5);
    // start over from the first snapshot, then let the watcher publish the others
    for entry in std::fs::read_dir(root.path()).unwrap() {
        std::fs::remove_dir_all(entry.unwrap().path()).unwrap();
    }
    write(root.path(), "s00", 0, "2021-01-06T00:00:00Z");
    let server_root = root.path().to_path_buf();
    let restarted = Server::start(&server_root, Duration::from_millis(10)).await;
    server.stop().await;
    let expected = Arc::new(expected);

    let done = Arc::new(AtomicBool::new(false));
    let mut readers = Vec::new();
    for r in 0..100 {
        let (c, base, expected, done) = (
            client.clone(),
            restarted.base.clone(),
            Arc::clone(&expected),
            Arc::clone(&done),
        );
        readers.push(tokio::spawn(async move {
            let mut seen = HashSet::new();
            let mut i = r;
            let mut checked = 0;
            while !done.load(Ordering::Relaxed) || checked < 5 {
                let (path, _) = ENDPOINTS[i % ENDPOINTS.len()];
                let (status, body) = get(&c, &format!("{base}{path}")).await;
                assert_eq!(status, 200);
                let id = body["snapshot_id"].as_str().unwrap().to_owned();
                let want = expected.get(&(id.clone(), path)).expect("known snapshot");
                assert_eq!(&body, want, "mixed response for {path}");
                seen.insert(id);
                i += 1;
                checked += 1;
            }
            (seen, checked)
        }));
    }

    for v in 1..=4u64 {
        tokio::time::sleep(Duration::from_millis(60)).await;
        write(
            &server_root,
            &format!("s{v:02}"),
            v,
            &format!("2021-01-06T00:00:{v:02}Z"),
        );
    }
    let deadline = tokio::time::Instant::now() + Duration::from_secs(10);
    while restarted.store.current().id() != ids[4] {
        assert!(
            tokio::time::Instant::now() < deadline,
            "watcher never published the newest snapshot"
        );
        tokio::time::sleep(Duration::from_millis(10)).await;
    }
    tokio::time::sleep(Duration::from_millis(50)).await;
    done.store(true, Ordering::Relaxed);

    let mut union = HashSet::new();
    let mut total = 0;
    for h in readers {
        let (seen, checked) = h.await.unwrap();
        union.extend(seen);
        total += checked;
    }
    assert!(total >= 500);
    assert!(union.len() >= 2, "readers only ever saw {union:?}");
    restarted.stop().await;
}
