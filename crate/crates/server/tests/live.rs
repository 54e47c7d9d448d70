use std::net::SocketAddr;

use csn_core::exports::{export_csv, render_view, ViewState};
use csn_core::filters::{filtered_histograms, RangeFilter};
use csn_core::ingest::{ingest, Atlas, IngestConfig};
use csn_core::model::Bundle;
use csn_core::selection::{select, FilterState};
use csn_core::SelectionMask;
use csn_server::{load_bundles, AppState, FilterResponse, RunningServer};
use csn_testkit::fixture;
use serde_json::{json, Value};

struct Live {
    _dir: tempfile::TempDir,
    bundle: Bundle,
    server: RunningServer,
    agent: ureq::Agent,
}

fn start() -> Live {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture::write_fixture(dir.path(), 60);
    let root = dir.path().join("bundles");
    ingest(&IngestConfig::read(&fx.config).unwrap(), &root.join("demo")).unwrap();
    let state = AppState::new(load_bundles(&root).unwrap());
    let server = RunningServer::start(state, SocketAddr::from(([127, 0, 0, 1], 0))).unwrap();
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .build()
        .into();
    Live {
        bundle: Bundle::open(&root.join("demo")).unwrap(),
        _dir: dir,
        server,
        agent,
    }
}

impl Live {
    fn get(&self, path: &str) -> (u16, Vec<u8>) {
        let mut r = self.agent.get(self.server.url(path)).call().unwrap();
        (r.status().as_u16(), r.body_mut().read_to_vec().unwrap())
    }

    fn post(&self, path: &str, body: &Value) -> (u16, Vec<u8>) {
        let mut r = self.agent.post(self.server.url(path)).send_json(body).unwrap();
        (
            r.status().as_u16(),
            r.body_mut().with_config().limit(64 << 20).read_to_vec().unwrap(),
        )
    }
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn read_endpoints() {
    let live = start();
    let n = live.bundle.object_count();

    let (s, body) = live.get("/api/datasets");
    assert_eq!(s, 200);
    let list = json(&body);
    assert_eq!(list.as_array().unwrap().len(), 1);
    assert_eq!(list[0]["id"], "demo");
    assert_eq!(list[0]["object_count"], n);

    let (s, body) = live.get("/api/datasets/demo/manifest");
    assert_eq!(s, 200);
    assert_eq!(json(&body), json(live.bundle.manifest.to_json().as_bytes()));

    let (s, body) = live.get("/api/datasets/demo/points/pca");
    assert_eq!(s, 200);
    assert_eq!(body.len(), 8 * n);
    let xs: Vec<f32> = body.chunks(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
    assert_eq!(xs, live.bundle.projection("pca").unwrap().coords());
    let (_, body) = live.get("/api/datasets/demo/points/pca?format=json");
    assert_eq!(json(&body).as_array().unwrap().len(), n);

    let (s, body) = live.get("/api/datasets/demo/columns/dim0");
    assert_eq!(s, 200);
    assert_eq!(body.len(), 4 * n);
    let (_, body) = live.get("/api/datasets/demo/columns/dim0?format=json");
    assert_eq!(json(&body).as_array().unwrap().len(), n);

    let (s, body) = live.get("/api/datasets/demo/atlas/0");
    assert_eq!(s, 200);
    assert_eq!(&body[..4], b"\x89PNG");

    let (s, body) = live.get("/api/datasets/demo/metadata");
    assert_eq!(s, 200);
    let text = String::from_utf8(body).unwrap();
    assert!(text.starts_with("title,style,year"));
    let (_, body) = live.get("/api/datasets/demo/metadata?format=json");
    assert_eq!(json(&body)[3]["style"], fixture::style_of(3));

    let (s, body) = live.get("/");
    assert_eq!(s, 200);
    assert!(String::from_utf8(body).unwrap().contains("<html"));
}

#[test]
fn gets_are_repeatable() {
    let live = start();
    for path in [
        "/api/datasets",
        "/api/datasets/demo/manifest",
        "/api/datasets/demo/points/tsne",
        "/api/datasets/demo/columns/dim3?format=json",
        "/api/datasets/demo/metadata",
    ] {
        assert_eq!(live.get(path), live.get(path), "{path}");
    }
}

#[test]
fn error_statuses() {
    let live = start();
    let (s, body) = live.get("/api/datasets/nope/manifest");
    assert_eq!(s, 404);
    assert!(json(&body)["error"].as_str().unwrap().contains("nope"));
    assert_eq!(live.get("/api/datasets/demo/points/nope").0, 404);
    assert_eq!(live.get("/api/datasets/demo/atlas/9").0, 404);
    assert_eq!(live.get("/api/datasets/demo/columns/nope").0, 400);
    assert_eq!(live.get("/api/datasets/demo/columns/dim0?format=xml").0, 400);

    let bad_dim = json!({"ranges": [{"dimension": "nope", "lo": 0, "hi": 1}]});
    assert_eq!(live.post("/api/datasets/demo/filter", &bad_dim).0, 400);
    let inverted = json!({"ranges": [{"dimension": "dim0", "lo": 1, "hi": 0}]});
    assert_eq!(live.post("/api/datasets/demo/filter", &inverted).0, 400);
    assert_eq!(live.post("/api/datasets/demo/filter", &json!([1])).0, 400);

    let bad_view = json!({"view": {"projection": "pca", "zoom": -1}});
    assert_eq!(live.post("/api/datasets/demo/export/png", &bad_view).0, 400);
    assert_eq!(live.post("/api/datasets/demo/export/png", &json!({})).0, 400);
    let unknown = json!({"view": {"projection": "nope"}});
    assert_eq!(live.post("/api/datasets/demo/export/png", &unknown).0, 400);
    assert_eq!(live.post("/api/datasets/demo/export/csv", &json!({"query": "style =="})).0, 400);
    assert_eq!(live.post("/api/datasets/demo/export/pdf", &json!({})).0, 404);
}

fn filter(live: &Live, state: &FilterState) -> FilterResponse {
    let (s, body) = live.post("/api/datasets/demo/filter", &serde_json::to_value(state).unwrap());
    assert_eq!(s, 200);
    serde_json::from_slice(&body).unwrap()
}

#[test]
fn filter_matches_library() {
    let live = start();
    let b = &live.bundle;
    let n = b.object_count();

    let all = filter(&live, &FilterState::default());
    assert_eq!(all.pass_count, n);
    assert!(all.query_errors.is_empty());

    let states = [
        FilterState {
            ranges: vec![RangeFilter::new("dim0", -0.2, 0.4)],
            query: String::new(),
        },
        FilterState {
            ranges: vec![RangeFilter::new("dim1", -1.0, 0.0), RangeFilter::new("dim2", -0.5, 2.0)],
            query: r#"style == "Cubism" OR year >= 1900"#.into(),
        },
        FilterState {
            ranges: vec![],
            query: "title ~ 7".into(),
        },
    ];
    for state in &states {
        let want = select(b, state).unwrap();
        // Twice, so the second answer comes from the mask cache.
        for _ in 0..2 {
            let got = filter(&live, state);
            assert_eq!(SelectionMask::from_rle(&got.mask), want.mask);
            assert_eq!(got.pass_count, want.mask.pass_count());
            assert_eq!(got.histograms, filtered_histograms(&b.columns, &want.mask));
        }
    }

    let broken = FilterState {
        ranges: vec![RangeFilter::new("dim0", -0.2, 0.4)],
        query: "style == ".into(),
    };
    let got = filter(&live, &broken);
    assert_eq!(got.query_errors.len(), 1);
    assert_eq!(got.query_errors[0].position, Some(9));
    assert_eq!(SelectionMask::from_rle(&got.mask), select(b, &broken).unwrap().range_mask);

    let unknown = filter(&live, &FilterState { ranges: vec![], query: "colour == red".into() });
    assert_eq!(unknown.query_errors[0].unknown_fields, ["colour"]);
    assert_eq!(unknown.pass_count, n);
}

#[test]
fn exports_match_library() {
    let live = start();
    let b = &live.bundle;
    let state = FilterState {
        ranges: vec![RangeFilter::new("dim0", -0.5, 0.5)],
        query: r#"style != "Cubism""#.into(),
    };
    let mask = select(b, &state).unwrap().mask;

    let body = json!({"ranges": state.ranges, "query": state.query});
    let (s, csv) = live.post("/api/datasets/demo/export/csv", &body);
    assert_eq!(s, 200);
    assert_eq!(csv, export_csv(&b.metadata, &mask).unwrap());

    let (_, all) = live.post("/api/datasets/demo/export/csv", &json!({}));
    let rows = csn_core::exports::read_csv_export(&all).unwrap();
    assert_eq!(rows.indices, (0..b.object_count()).collect::<Vec<_>>());

    let view = ViewState::new("pca");
    let body = json!({"ranges": state.ranges, "query": state.query, "view": view});
    let (s, png) = live.post("/api/datasets/demo/export/png", &body);
    assert_eq!(s, 200);
    assert_eq!(&png[..4], [0x89, 0x50, 0x4E, 0x47]);
    let atlas = Atlas {
        descriptor: b.manifest.atlas,
        pages: b.atlas_pages().unwrap(),
    };
    assert_eq!(png, render_view(b, &atlas, &mask, &view).unwrap().png);
    let img = image::load_from_memory(&png).unwrap();
    assert_eq!((img.width(), img.height()), (512, 512));
}

#[test]
fn concurrent_filters_agree() {
    let live = start();
    let want = select(
        &live.bundle,
        &FilterState {
            ranges: vec![RangeFilter::new("dim4", -0.3, 0.3)],
            query: String::new(),
        },
    )
    .unwrap()
    .mask;
    std::thread::scope(|s| {
        for _ in 0..8 {
            s.spawn(|| {
                for _ in 0..10 {
                    let got = filter(
                        &live,
                        &FilterState {
                            ranges: vec![RangeFilter::new("dim4", -0.3, 0.3)],
                            query: String::new(),
                        },
                    );
                    assert_eq!(SelectionMask::from_rle(&got.mask), want);
                }
            });
        }
    });
}

#[test]
fn startup_rejects_bad_bundles() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_bundles(dir.path()).is_err());
    let broken = dir.path().join("broken");
    std::fs::create_dir(&broken).unwrap();
    std::fs::write(broken.join("manifest.json"), "{}").unwrap();
    let err = load_bundles(dir.path()).unwrap_err().to_string();
    assert!(err.contains("broken"), "{err}");
}

#[test]
fn serves_a_ui_directory() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture::write_fixture(dir.path(), 40);
    let bundle = dir.path().join("demo");
    ingest(&IngestConfig::read(&fx.config).unwrap(), &bundle).unwrap();
    let ui = dir.path().join("ui");
    std::fs::create_dir(&ui).unwrap();
    std::fs::write(ui.join("index.html"), "<html>client</html>").unwrap();
    let state = AppState::new(load_bundles(&bundle).unwrap()).with_ui(Some(ui));
    let server = RunningServer::start(state, SocketAddr::from(([127, 0, 0, 1], 0))).unwrap();
    let body = ureq::get(server.url("/")).call().unwrap().body_mut().read_to_string().unwrap();
    assert_eq!(body, "<html>client</html>");
    let list = ureq::get(server.url("/api/datasets")).call().unwrap().body_mut().read_to_string().unwrap();
    assert!(list.contains("\"demo\""));
}
