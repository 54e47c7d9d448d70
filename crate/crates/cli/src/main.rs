use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use csn_core::dimred::{EmbeddingMatrix, TsneParams};
use csn_core::exports::{export_csv, render_view, ViewState};
use csn_core::filters::{bench, RangeFilter};
use csn_core::ingest::{add_projection, ingest, Atlas, IngestConfig, ProjectionSpec};
use csn_core::model::Bundle;
use csn_core::selection::{select, FilterState};

mod failure;
use failure::Failure;

#[derive(Parser)]
#[command(name = "csn", version, about = "Explore image collections through their embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a bundle from metadata, embeddings and images.
    Ingest {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Shape of a raw float32 embedding file, as `N,D`.
        #[arg(long, value_parser = parse_shape)]
        embeddings_shape: Option<(usize, usize)>,
    },
    /// Compute a projection and add it to an existing bundle.
    Project {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Stored name; defaults to the method (or `<x>_vs_<y>` for axis).
        #[arg(long)]
        name: Option<String>,
        /// Embedding matrix (CSV, or raw float32 with --embeddings-shape).
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long, value_parser = parse_shape)]
        embeddings_shape: Option<(usize, usize)>,
        #[arg(long)]
        perplexity: Option<f64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Axis method: field or dimension for x.
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        /// Import method: coordinate table (CSV or raw float32).
        #[arg(long)]
        path: Option<PathBuf>,
        /// Import method: 2 or 3 columns in a raw file.
        #[arg(long)]
        dims: Option<usize>,
    },
    /// Print the indices of objects matching a query, one per line.
    Query {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, default_value = "")]
        q: String,
    },
    /// Write the filtered objects as CSV and/or a PNG of a view.
    Export {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, default_value = "")]
        q: String,
        /// JSON list of {"dimension", "lo", "hi"} ranges.
        #[arg(long)]
        ranges: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        png: Option<PathBuf>,
        /// JSON view state; required with --png.
        #[arg(long)]
        view: Option<String>,
    },
    /// Serve one bundle, or every bundle under a directory, over HTTP.
    Serve {
        #[arg(long)]
        bundles: PathBuf,
        #[arg(long, default_value_t = 8000)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Directory holding the web client.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
    /// Time filter evaluation on synthetic columns.
    Bench {
        #[arg(long, default_value_t = 100_000)]
        objects: usize,
        #[arg(long, default_value_t = 8)]
        dims: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Pca,
    Tsne,
    Axis,
    Import,
}

fn parse_shape(s: &str) -> Result<(usize, usize), String> {
    let (n, d) = s.split_once(',').ok_or("expected N,D")?;
    let n = n.trim().parse().map_err(|_| format!("bad row count {n:?}"))?;
    let d = d.trim().parse().map_err(|_| format!("bad column count {d:?}"))?;
    Ok((n, d))
}

fn parse_json<T: DeserializeOwned>(what: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::usage(format!("--{what}: {e}")))
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::new("io", e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Ingest {
            config,
            out,
            embeddings_shape,
        } => {
            let mut config = IngestConfig::read(&config)?;
            if embeddings_shape.is_some() {
                config.embeddings_shape = embeddings_shape;
            }
            print_json(&ingest(&config, &out)?)
        }
        Command::Project {
            bundle,
            method,
            name,
            embeddings,
            embeddings_shape,
            perplexity,
            iterations,
            learning_rate,
            seed,
            x,
            y,
            path,
            dims,
        } => {
            let spec = match method {
                Method::Pca => ProjectionSpec::Pca { name },
                Method::Tsne => {
                    let d = TsneParams::default();
                    ProjectionSpec::Tsne {
                        name,
                        params: TsneParams {
                            perplexity: perplexity.unwrap_or(d.perplexity),
                            iterations: iterations.unwrap_or(d.iterations),
                            learning_rate: learning_rate.unwrap_or(d.learning_rate),
                            seed: seed.unwrap_or(d.seed),
                            ..d
                        },
                    }
                }
                Method::Axis => ProjectionSpec::Axis {
                    name,
                    x: x.ok_or_else(|| Failure::usage("axis needs --x"))?,
                    y: y.ok_or_else(|| Failure::usage("axis needs --y"))?,
                },
                Method::Import => ProjectionSpec::Import {
                    name: name.ok_or_else(|| Failure::usage("import needs --name"))?,
                    path: path.ok_or_else(|| Failure::usage("import needs --path"))?,
                    dims,
                },
            };
            let needs = matches!(method, Method::Pca | Method::Tsne);
            let embeddings = match (embeddings, needs) {
                (Some(p), true) => Some(EmbeddingMatrix::load(&p, embeddings_shape)?),
                (None, true) => return Err(Failure::usage("pca and tsne need --embeddings")),
                (_, false) => None,
            };
            print_json(&add_projection(&bundle, &spec, embeddings)?)
        }
        Command::Query { bundle, q } => {
            let bundle = Bundle::open(&bundle)?;
            let mask = csn_core::query::run_query(&q, &bundle.metadata)?;
            let mut out = std::io::BufWriter::new(std::io::stdout().lock());
            for i in mask.ones() {
                writeln!(out, "{i}")?;
            }
            out.flush()?;
            Ok(())
        }
        Command::Export {
            bundle,
            q,
            ranges,
            csv,
            png,
            view,
        } => {
            if csv.is_none() && png.is_none() {
                return Err(Failure::usage("nothing to write: give --csv and/or --png"));
            }
            let view: Option<ViewState> = view.map(|v| parse_json("view", &v)).transpose()?;
            if png.is_some() && view.is_none() {
                return Err(Failure::usage("--png needs --view"));
            }
            let ranges: Vec<RangeFilter> = match ranges {
                Some(r) => parse_json("ranges", &r)?,
                None => Vec::new(),
            };
            let bundle = Bundle::open(&bundle)?;
            let sel = select(&bundle, &FilterState { ranges, query: q })?;
            if let Some(e) = sel.query_error {
                return Err(e.into());
            }
            if let Some(path) = csv {
                write_file(&path, &export_csv(&bundle.metadata, &sel.mask)?)?;
            }
            if let (Some(path), Some(view)) = (png, view) {
                let atlas = Atlas {
                    descriptor: bundle.manifest.atlas,
                    pages: bundle.atlas_pages()?,
                };
                write_file(&path, &render_view(&bundle, &atlas, &sel.mask, &view)?.png)?;
            }
            Ok(())
        }
        Command::Serve {
            bundles,
            port,
            host,
            ui,
        } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env()
                        .unwrap_or_else(|_| "info".into()),
                )
                .with_writer(std::io::stderr)
                .init();
            let state = csn_server::AppState::new(csn_server::load_bundles(&bundles)?).with_ui(ui);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(SocketAddr::new(host, port)).await?;
                let addr = listener.local_addr()?;
                tracing::info!(
                    datasets = ?state.datasets.keys().collect::<Vec<_>>(),
                    "listening on http://{addr}"
                );
                // Scripts read this line to find the port when --port 0 is used.
                println!("listening on http://{addr}");
                csn_server::serve(listener, state, async {
                    let _ = tokio::signal::ctrl_c().await;
                })
                .await
            })?;
            Ok(())
        }
        Command::Bench {
            objects,
            dims,
            samples,
            seed,
        } => {
            if objects == 0 || dims == 0 {
                return Err(Failure::usage("--objects and --dims must be positive"));
            }
            print_json(&bench::run(objects, dims, samples, seed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::FAILURE
        }
    }
}
