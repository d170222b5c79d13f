//! Startup: open the store, bootstrap, bind, serve.

use std::net::SocketAddr;
use std::sync::Arc;

use chrono::Duration;
use ideaforge_core::{Clock, SystemClock};
use tokio::net::TcpListener;

use crate::api::{self, AppState};
use crate::config::{BootstrapAdmin, ServiceConfig};
use crate::service::{AuthSettings, Service, ServiceError};

#[derive(Debug, thiserror::Error)]
pub enum StartError {
    #[error("could not bind {addr}: {source}")]
    BindFailure { addr: String, source: std::io::Error },
    #[error("refusing to start: {0}")]
    StoreCorruption(String),
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error("bootstrap administrator: environment variable {0} is not set")]
    MissingAdminPassword(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl StartError {
    fn from_service(e: ServiceError) -> Self {
        match e {
            ServiceError::Store(s @ crate::store::StoreError::Corruption { .. }) => StartError::StoreCorruption(s.to_string()),
            ServiceError::Domain(d @ ideaforge_core::Error::CorruptRecord(_)) => StartError::StoreCorruption(d.to_string()),
            other => StartError::Service(other),
        }
    }
}

pub fn auth_settings(cfg: &ServiceConfig) -> AuthSettings {
    AuthSettings {
        session_ttl: Duration::seconds(i64::try_from(cfg.session_ttl_secs).unwrap_or(i64::MAX / 1000)),
        password_rounds: cfg.password_rounds,
    }
}

/// Opens the service for `cfg` with the given clock, without bootstrapping.
pub fn open_service(cfg: &ServiceConfig, clock: Arc<dyn Clock>) -> Result<Service, StartError> {
    Service::open(cfg.data_dir(), cfg.platform.clone(), auth_settings(cfg), clock, cfg.secret_seed)
        .map_err(StartError::from_service)
}

/// Creates the configured Administrator if it does not exist yet.
pub fn bootstrap(svc: &mut Service, admin: &BootstrapAdmin) -> Result<bool, StartError> {
    if svc.platform().find_user_by_email(&admin.email).is_some() {
        return Ok(false);
    }
    let password =
        std::env::var(&admin.password_env).map_err(|_| StartError::MissingAdminPassword(admin.password_env.clone()))?;
    let (_, created) = svc.ensure_admin(&admin.email, &admin.display_name, &password)?;
    Ok(created)
}

/// A bound, ready-to-run server.
pub struct Server {
    listener: TcpListener,
    state: AppState,
}

impl Server {
    /// Opens the store, seeds groups and the bootstrap admin, and binds.
    pub async fn bind(cfg: &ServiceConfig) -> Result<Self, StartError> {
        Self::bind_with_clock(cfg, Arc::new(SystemClock)).await
    }

    pub async fn bind_with_clock(cfg: &ServiceConfig, clock: Arc<dyn Clock>) -> Result<Self, StartError> {
        let mut svc = open_service(cfg, clock)?;
        if let Some(admin) = &cfg.bootstrap_admin {
            if bootstrap(&mut svc, admin)? {
                tracing::info!(email = %admin.email, "created bootstrap administrator");
            }
        }
        svc.checkpoint().map_err(StartError::from_service)?;
        let addr = format!("{}:{}", cfg.host, cfg.port());
        let listener =
            TcpListener::bind(&addr).await.map_err(|source| StartError::BindFailure { addr: addr.clone(), source })?;
        Ok(Server { listener, state: AppState::new(svc) })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn state(&self) -> AppState {
        self.state.clone()
    }

    /// Serves until `shutdown` resolves.
    pub async fn run(self, shutdown: impl std::future::Future<Output = ()> + Send + 'static) -> std::io::Result<()> {
        axum::serve(self.listener, api::router(self.state)).with_graceful_shutdown(shutdown).await
    }
}

impl From<crate::store::StoreError> for StartError {
    fn from(e: crate::store::StoreError) -> Self {
        StartError::from_service(e.into())
    }
}
