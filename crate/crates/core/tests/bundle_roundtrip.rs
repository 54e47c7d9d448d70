use csn_core::exports::{export_csv, read_csv_export, render_view, ViewState};
use csn_core::filters::{apply_range_filters, RangeFilter, SelectionMask};
use csn_core::ingest::{ingest, make_thumbnail, Atlas, IngestConfig};
use csn_core::model::{load_manifest, Bundle, CollectionManifest, MetadataTable};
use csn_core::query::run_query;
use csn_testkit::fixture;

fn build(dir: &std::path::Path) -> Bundle {
    let fx = fixture::write_fixture(dir, 100);
    let config = IngestConfig::read(&fx.config).unwrap();
    ingest(&config, &dir.join("demo")).unwrap();
    Bundle::open(&dir.join("demo")).unwrap()
}

fn atlas(b: &Bundle) -> Atlas {
    Atlas {
        descriptor: b.manifest.atlas,
        pages: b.atlas_pages().unwrap(),
    }
}

#[test]
fn fixture_bundle_is_complete_and_stable() {
    let dir = tempfile::tempdir().unwrap();
    let b = build(dir.path());
    let m = load_manifest(&b.root).unwrap();
    assert_eq!(m.object_count, 100);
    assert_eq!(m.atlas.page_count, 1);
    assert_eq!(m.dimensions.len(), 8);
    assert_eq!(
        m.projections.iter().map(|p| p.name.as_str()).collect::<Vec<_>>(),
        ["pca", "tsne", "year_pc", "umap"]
    );
    let back: CollectionManifest = serde_json::from_str(&m.to_json()).unwrap();
    assert_eq!(back, m);
    assert_eq!(b.metadata.fields(), ["title", "style", "year"]);

    // Row i is object i in every projection: the axis projection orders
    // objects by year, and missing years sit on the left edge.
    let p = b.projection("year_pc").unwrap();
    for i in 0..100 {
        for j in 0..100 {
            if let (Some(a), Some(c)) = (fixture::year_of(i), fixture::year_of(j)) {
                if a < c {
                    assert!(p.xy(i)[0] < p.xy(j)[0]);
                }
            }
        }
        if fixture::year_of(i).is_none() {
            assert_eq!(p.xy(i)[0], -1.0);
        }
    }

    let a = atlas(&b);
    for i in 0..100 {
        let expected = make_thumbnail(&fixture::gradient_image(i).into(), 64);
        assert_eq!(a.read_cell(i), expected, "object {i}");
    }
}

#[test]
fn ingest_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture::write_fixture(dir.path(), 40);
    let config = IngestConfig::read(&fx.config).unwrap();
    ingest(&config, &dir.path().join("a")).unwrap();
    ingest(&config, &dir.path().join("b")).unwrap();
    let a = Bundle::open(&dir.path().join("a")).unwrap();
    let b = Bundle::open(&dir.path().join("b")).unwrap();
    for f in ["manifest.json", "metadata.csv", "points/tsne.bin", "points/pca.bin", "columns/dim3.bin"] {
        assert_eq!(std::fs::read(a.root.join(f)).unwrap(), std::fs::read(b.root.join(f)).unwrap());
    }
    assert_eq!(a.atlas_pages().unwrap(), b.atlas_pages().unwrap());
}

#[test]
fn csv_export_reimports_to_the_same_mask() {
    let dir = tempfile::tempdir().unwrap();
    let b = build(dir.path());
    let query = r#"style == "Cubism" OR title ~ "untitled""#;
    let ranges = [RangeFilter::new("dim0", -10.0, 2.5)];
    let mask = run_query(query, &b.metadata)
        .unwrap()
        .and(&apply_range_filters(100, &b.columns, &ranges).unwrap());
    assert!(mask.pass_count() > 0 && mask.pass_count() < 100);

    let bytes = export_csv(&b.metadata, &mask).unwrap();
    let path = dir.path().join("out.csv");
    std::fs::write(&path, &bytes).unwrap();
    let back = read_csv_export(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(back.indices.len(), mask.pass_count());
    assert_eq!(back.metadata, b.metadata.select_rows(&back.indices));
    assert_eq!(run_query(query, &back.metadata).unwrap().pass_count(), back.indices.len());
    assert_eq!(back.mask(100), mask);
    // The raw file parses as plain CSV too.
    let plain = MetadataTable::read(&path).unwrap();
    assert_eq!(plain.len(), mask.pass_count());
}

#[test]
fn png_export_greys_or_omits_filtered_objects() {
    let dir = tempfile::tempdir().unwrap();
    let b = build(dir.path());
    let a = atlas(&b);
    let view = ViewState {
        show_greyed: false,
        ..ViewState::new("pca")
    };
    let full = render_view(&b, &a, &SelectionMask::full(100), &view).unwrap();
    let half = render_view(&b, &a, &SelectionMask::from_bools((0..100).map(|i| i % 2 == 0)), &view).unwrap();
    let covered = |img: &image::RgbaImage| img.pixels().filter(|p| p[3] > 0).count();
    assert!(covered(&half.image) < covered(&full.image));
    let again = render_view(&b, &a, &SelectionMask::full(100), &view).unwrap();
    assert_eq!(again.png, full.png);
    assert!(render_view(&b, &a, &SelectionMask::full(100), &ViewState::new("nope")).is_err());
}
