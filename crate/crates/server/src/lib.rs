//! The ideaforge service: durable store, authentication, HTTP/JSON API and
//! startup logic around [`ideaforge_core::Platform`].
//!
//! ```no_run
//! # async fn run() -> anyhow::Result<()> {
//! let cfg = ideaforge::config::ServiceConfig::default();
//! let server = ideaforge::server::Server::bind(&cfg).await?;
//! println!("listening on {}", server.local_addr()?);
//! server.run(std::future::pending()).await?;
//! # Ok(()) }
//! ```

pub mod api;
pub mod auth;
pub mod config;
pub mod server;
pub mod service;
pub mod store;

pub use ideaforge_core as core;
