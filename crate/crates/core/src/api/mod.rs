//! HTTP/JSON service.
//!
//! Callers authenticate with `Authorization: Bearer <key>`; keys come from a
//! static file (see [`KeyRing`]). Without a header the caller is public.
//! Endpoint reference: `docs/api.md`.

mod auth;
mod error;
mod handlers;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;
use serde::Deserialize;
use thiserror::Error;

pub use auth::{ApiTier, KeyRing, Principal};
pub use error::{ApiError, ErrorBody, ERROR_CODES};
pub use handlers::{parse_submission, ReviewBody, PAGE_SIZE};

use crate::schema::SectorVocabulary;
use crate::store::{Store, StoreError, StoreOptions};
use crate::taxonomy::Taxonomy;

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub keys: Arc<KeyRing>,
}

impl AppState {
    pub fn new(store: Store, keys: KeyRing) -> Self {
        Self {
            store: Arc::new(store),
            keys: Arc::new(keys),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/incidents", post(handlers::submit).get(handlers::list))
        .route("/incidents/{id}", get(handlers::get_one))
        .route("/incidents/{id}/review", post(handlers::review))
        .route("/taxonomy", get(handlers::taxonomy))
        .route("/sectors", get(handlers::sectors))
        .route("/stats/{report}", get(handlers::stats))
        .route("/export", get(handlers::export))
        .route("/healthz", get(handlers::healthz))
        .fallback(handlers::not_found)
        .method_not_allowed_fallback(handlers::method_not_allowed)
        .with_state(state)
}

pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";

/// Service configuration, read from TOML. Relative paths are taken relative
/// to the working directory.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_addr")]
    pub addr: SocketAddr,
    pub data_dir: PathBuf,
    /// Key file; without one every caller is public.
    #[serde(default)]
    pub keys: Option<PathBuf>,
    /// Taxonomy JSON replacing the builtin one.
    #[serde(default)]
    pub taxonomy: Option<PathBuf>,
    /// Sector vocabulary replacing the default one.
    #[serde(default)]
    pub sectors: Option<Vec<String>>,
    #[serde(default = "default_checkpoint")]
    pub checkpoint_every: u64,
}

fn default_addr() -> SocketAddr {
    DEFAULT_ADDR.parse().expect("valid default")
}

fn default_checkpoint() -> u64 {
    StoreOptions::default().checkpoint_every
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("bad config: {0}")]
    Invalid(String),
}

impl Config {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        Self {
            addr: default_addr(),
            data_dir: data_dir.into(),
            keys: None,
            taxonomy: None,
            sectors: None,
            checkpoint_every: default_checkpoint(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Loads `path` if given, else starts from environment variables alone,
    /// then applies `REGISTRY_ADDR`, `REGISTRY_DATA_DIR` and `REGISTRY_KEYS`.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        Self::load_with_env(path, |k| std::env::var(k).ok())
    }

    pub fn load_with_env(path: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let mut config = match path {
            Some(p) => Self::from_file(p)?,
            None => {
                let dir = env("REGISTRY_DATA_DIR").ok_or_else(|| {
                    ConfigError::Invalid("no config file given and REGISTRY_DATA_DIR is not set".into())
                })?;
                Self::new(dir)
            }
        };
        if let Some(addr) = env("REGISTRY_ADDR") {
            config.addr = addr
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("REGISTRY_ADDR `{addr}` is not host:port")))?;
        }
        if let Some(dir) = env("REGISTRY_DATA_DIR") {
            config.data_dir = dir.into();
        }
        if let Some(keys) = env("REGISTRY_KEYS") {
            config.keys = Some(keys.into());
        }
        Ok(config)
    }

    pub fn store_options(&self) -> Result<StoreOptions, ConfigError> {
        let mut opts = StoreOptions {
            checkpoint_every: self.checkpoint_every,
            ..Default::default()
        };
        if let Some(path) = &self.taxonomy {
            let bytes = std::fs::read(path).map_err(|source| ConfigError::Read {
                path: path.clone(),
                source,
            })?;
            opts.taxonomy = Taxonomy::from_json(&bytes).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        if let Some(sectors) = &self.sectors {
            opts.sectors = SectorVocabulary::new(sectors.iter().cloned());
        }
        Ok(opts)
    }

    pub fn key_ring(&self) -> Result<KeyRing, ConfigError> {
        match &self.keys {
            None => Ok(KeyRing::default()),
            Some(p) => KeyRing::load(p).map_err(ConfigError::Invalid),
        }
    }
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot open data directory: {0}")]
    Store(#[from] StoreError),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// Opens the store, binds and serves until Ctrl-C.
pub async fn serve(config: Config) -> Result<(), ServeError> {
    let keys = config.key_ring()?;
    let store = Store::open_with(&config.data_dir, config.store_options()?)?;
    let listener = tokio::net::TcpListener::bind(config.addr)
        .await
        .map_err(|source| ServeError::Bind {
            addr: config.addr,
            source,
        })?;
    let state = AppState::new(store, keys);
    tracing::info!(
        addr = %listener.local_addr()?,
        data_dir = %config.data_dir.display(),
        keys = state.keys.len(),
        incidents = state.store.len(),
        "serving"
    );
    let store = state.store.clone();
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Err(e) = store.checkpoint() {
        tracing::warn!(error = %e, "checkpoint on shutdown failed");
    }
    Ok(())
}
