//! HTTP analysis service over the phutball engine: game sessions with
//! revision checks, tactical analysis, the corpus and the verifier.

mod api;
mod error;
pub mod policy;
pub mod store;

use std::path::PathBuf;
use std::sync::Arc;

use axum::Router;
use tokio::net::TcpListener;

pub use api::AppState;
pub use error::ApiError;
pub use store::{Session, Store};

#[derive(Clone, Debug)]
pub struct Config {
    /// Sessions are loaded from here at start and written back on shutdown.
    pub snapshot: Option<PathBuf>,
    /// Deepest forced-win search the analysis and engine-move endpoints run.
    pub max_plies: u32,
    /// Node budget per search.
    pub node_limit: u64,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            snapshot: None,
            max_plies: 3,
            node_limit: 2_000_000,
        }
    }
}

/// Builds the router, restoring sessions from the snapshot file if one is set.
pub fn app(config: Config) -> Result<(Router, Arc<AppState>), String> {
    let store = match &config.snapshot {
        Some(path) => Store::load(path)?,
        None => Store::default(),
    };
    let state = Arc::new(AppState { store, config });
    Ok((api::router(state.clone()), state))
}

/// Serves until Ctrl-C or SIGTERM, then writes the snapshot.
pub async fn serve(listener: TcpListener, config: Config) -> std::io::Result<()> {
    let (router, state) = app(config).map_err(std::io::Error::other)?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router)
        .with_graceful_shutdown(shutdown())
        .await?;
    if let Some(path) = &state.config.snapshot {
        state.store.save(path)?;
        tracing::info!("sessions written to {}", path.display());
    }
    Ok(())
}

async fn shutdown() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}
