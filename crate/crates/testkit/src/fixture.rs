//! The synthetic collection used by the end-to-end tests: gradient images,
//! a small metadata table and an 8-dimensional embedding.

use std::path::{Path, PathBuf};

use image::{Rgba, RgbaImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STYLES: [&str; 4] = ["Cubism", "Dada", "Impressionism", "Pop"];
pub const EMBEDDING_DIMS: usize = 8;

#[derive(Debug, Clone)]
pub struct Fixture {
    pub root: PathBuf,
    pub config: PathBuf,
    pub images: PathBuf,
    pub metadata: PathBuf,
    pub embeddings: PathBuf,
    /// Two-column CSV standing in for an externally computed projection.
    pub external: PathBuf,
    pub n: usize,
}

/// Object `i`'s source image: a two-axis colour gradient. Even objects are
/// landscape, odd ones portrait, so thumbnailing has to crop.
pub fn gradient_image(i: usize) -> RgbaImage {
    let (w, h) = if i % 2 == 0 { (96, 72) } else { (72, 96) };
    let hue = (i * 37 % 256) as u32;
    RgbaImage::from_fn(w, h, |x, y| {
        Rgba([
            ((x * 255 / (w - 1) + hue) % 256) as u8,
            (y * 255 / (h - 1)) as u8,
            (255 - hue) as u8,
            255,
        ])
    })
}

pub fn style_of(i: usize) -> &'static str {
    STYLES[(i * 7 + i / 5) % STYLES.len()]
}

/// Year of object `i`; every 17th object has none.
pub fn year_of(i: usize) -> Option<u32> {
    (i % 17 != 3).then(|| 1880 + ((i * 13) % 120) as u32)
}

fn title_of(i: usize) -> String {
    match i % 5 {
        0 => format!("Study No. {i}"),
        1 => format!("Composition, {i}"),
        2 => format!("\"Untitled\" {i}"),
        3 => format!("Portrait of a lady {i}"),
        _ => format!("Still life\nwith object {i}"),
    }
}

/// Writes `n` objects plus an ingest config under `dir`.
pub fn write_fixture(dir: &Path, n: usize) -> Fixture {
    let images = dir.join("images");
    std::fs::create_dir_all(&images).unwrap();
    for i in 0..n {
        gradient_image(i)
            .save(images.join(format!("object_{i:04}.png")))
            .unwrap();
    }

    let metadata = dir.join("metadata.csv");
    let mut w = csv::Writer::from_path(&metadata).unwrap();
    w.write_record(["title", "style", "year"]).unwrap();
    for i in 0..n {
        let year = year_of(i).map(|y| y.to_string()).unwrap_or_default();
        w.write_record([title_of(i).as_str(), style_of(i), year.as_str()])
            .unwrap();
    }
    w.flush().unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let embeddings = dir.join("embeddings.csv");
    let mut emb = String::new();
    let external = dir.join("external.csv");
    let mut ext = String::from("x,y\n");
    for i in 0..n {
        let s = STYLES.iter().position(|&s| s == style_of(i)).unwrap() as f64;
        let row: Vec<f64> = (0..EMBEDDING_DIMS)
            .map(|d| {
                let centre = if d % STYLES.len() == s as usize { 4.0 } else { 0.0 };
                centre + rng.random_range(-1.0..1.0) + 0.1 * d as f64
            })
            .collect();
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        emb.push_str(&cells.join(","));
        emb.push('\n');
        ext.push_str(&format!("{:.5},{:.5}\n", row[0] - row[2], row[1] - row[3]));
    }
    std::fs::write(&embeddings, emb).unwrap();
    std::fs::write(&external, ext).unwrap();

    let dims: Vec<String> = (0..EMBEDDING_DIMS)
        .map(|j| format!(r#"{{"embedding": {j}}}"#))
        .collect();
    let config = dir.join("ingest.json");
    std::fs::write(
        &config,
        format!(
            r#"{{
  "name": "demo",
  "metadata_path": "metadata.csv",
  "images": {{"directory": "images"}},
  "embeddings_path": "embeddings.csv",
  "dimension_columns": [{dims}],
  "field_kinds": {{"style": "categorical", "title": "freetext"}},
  "cluster_fields": ["style"],
  "projections": [
    {{"method": "pca"}},
    {{"method": "tsne", "perplexity": 15, "iterations": 400, "seed": 1}},
    {{"method": "axis", "name": "year_pc", "x": "year", "y": "dim0"}},
    {{"method": "import", "name": "umap", "path": "external.csv"}}
  ]
}}
"#,
            dims = dims.join(", ")
        ),
    )
    .unwrap();

    Fixture {
        root: dir.to_path_buf(),
        config,
        images,
        metadata,
        embeddings,
        external,
        n,
    }
}
