//! HTTP service over one or more bundles.
//!
//! ```text
//! GET  /api/datasets
//! GET  /api/datasets/{id}/manifest
//! GET  /api/datasets/{id}/points/{projection}   float32 LE, ?format=json
//! GET  /api/datasets/{id}/columns/{dimension}   float32 LE, ?format=json
//! GET  /api/datasets/{id}/atlas/{page}          PNG
//! GET  /api/datasets/{id}/metadata              CSV, ?format=json
//! POST /api/datasets/{id}/filter                FilterRequest -> FilterResponse
//! POST /api/datasets/{id}/export/{csv|png}
//! GET  /                                        the web client
//! ```

mod api;
mod cache;
mod error;
mod state;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use axum::Router;
use csn_core::model::{Bundle, ModelError, MANIFEST_FILE};

pub use api::{DatasetSummary, ExportRequest, FilterResponse, QueryErrorBody};
pub use error::ApiError;
pub use state::{AppState, Dataset};

#[derive(Debug, thiserror::Error)]
pub enum StartupError {
    #[error("bundle {}: {source}", path.display())]
    Bundle {
        path: PathBuf,
        #[source]
        source: ModelError,
    },
    #[error("no bundles found under {}", .0.display())]
    NoBundles(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Opens `root` itself when it is a bundle, otherwise every immediate
/// subdirectory holding a manifest. Any invalid bundle aborts the load.
pub fn load_bundles(root: &Path) -> Result<Vec<Bundle>, StartupError> {
    let open = |path: PathBuf| {
        Bundle::open(&path).map_err(|source| StartupError::Bundle { path, source })
    };
    if root.join(MANIFEST_FILE).is_file() {
        return Ok(vec![open(root.to_path_buf())?]);
    }
    let io = |source| StartupError::Io {
        path: root.to_path_buf(),
        source,
    };
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(root)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()).map_err(io))
        .collect::<Result<_, _>>()?;
    dirs.retain(|d| d.join(MANIFEST_FILE).is_file());
    dirs.sort();
    if dirs.is_empty() {
        return Err(StartupError::NoBundles(root.to_path_buf()));
    }
    dirs.into_iter().map(open).collect()
}

pub fn router(state: AppState) -> Router {
    api::router(state)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: AppState,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}

/// A server on its own runtime thread; dropping it shuts the server down.
pub struct RunningServer {
    pub addr: SocketAddr,
    stop: Option<tokio::sync::oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<std::io::Result<()>>>,
}

impl RunningServer {
    pub fn start(state: AppState, addr: SocketAddr) -> std::io::Result<Self> {
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()?;
        let listener = runtime.block_on(tokio::net::TcpListener::bind(addr))?;
        let addr = listener.local_addr()?;
        let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
        let thread = std::thread::spawn(move || {
            runtime.block_on(serve(listener, state, async {
                let _ = stopped.await;
            }))
        });
        Ok(RunningServer {
            addr,
            stop: Some(stop),
            thread: Some(thread),
        })
    }

    pub fn url(&self, path: &str) -> String {
        format!("http://{}{path}", self.addr)
    }
}

impl Drop for RunningServer {
    fn drop(&mut self) {
        if let Some(stop) = self.stop.take() {
            let _ = stop.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}
