//! Service configuration, read from TOML.
//!
//! ```toml
//! host = "127.0.0.1"
//! port = 8080
//! data_dir = "./data"
//! session_ttl_secs = 86400
//! password_rounds = 100000
//!
//! [bootstrap_admin]
//! email = "admin@example.org"
//! display_name = "Administrator"
//! password_env = "IDEAFORGE_ADMIN_PASSWORD"
//!
//! [platform]
//! duplicate_threshold = 0.85
//! ```
//!
//! Port and data directory resolve as flag, then environment
//! (`IDEAFORGE_PORT`, `IDEAFORGE_DATA_DIR`), then file, then default.

use std::path::{Path, PathBuf};

use anyhow::Context;
use ideaforge_core::PlatformConfig;
use serde::{Deserialize, Serialize};

use crate::auth::DEFAULT_ROUNDS;

pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapAdmin {
    pub email: String,
    #[serde(default = "default_admin_name")]
    pub display_name: String,
    /// Environment variable holding the initial password.
    pub password_env: String,
}

fn default_admin_name() -> String {
    "Administrator".to_owned()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub host: String,
    pub port: Option<u16>,
    pub data_dir: Option<PathBuf>,
    pub session_ttl_secs: u64,
    pub password_rounds: u32,
    /// Fixed seed for salts and tokens; for reproducible test runs only.
    pub secret_seed: Option<u64>,
    pub bootstrap_admin: Option<BootstrapAdmin>,
    pub platform: PlatformConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            host: "127.0.0.1".to_owned(),
            port: None,
            data_dir: None,
            session_ttl_secs: 24 * 3600,
            password_rounds: DEFAULT_ROUNDS,
            secret_seed: None,
            bootstrap_admin: None,
            platform: PlatformConfig::default(),
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: ServiceConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(self.session_ttl_secs > 0, "session_ttl_secs must be positive");
        anyhow::ensure!(self.password_rounds > 0, "password_rounds must be positive");
        self.platform.validate()?;
        Ok(())
    }

    pub fn port(&self) -> u16 {
        self.port.unwrap_or(DEFAULT_PORT)
    }

    pub fn data_dir(&self) -> PathBuf {
        self.data_dir.clone().unwrap_or_else(|| PathBuf::from("data"))
    }

    /// Applies command-line or environment overrides.
    pub fn with_overrides(mut self, port: Option<u16>, data_dir: Option<PathBuf>) -> Self {
        if port.is_some() {
            self.port = port;
        }
        if data_dir.is_some() {
            self.data_dir = data_dir;
        }
        self
    }
}
