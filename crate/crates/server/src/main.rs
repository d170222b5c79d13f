use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use ideaforge::config::{BootstrapAdmin, ServiceConfig};
use ideaforge::server::{self, Server};
use ideaforge::store::Store;
use ideaforge_core::SystemClock;

#[derive(Parser)]
#[command(name = "ideaforge", version, about = "Idea management platform service")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "IDEAFORGE_PORT")]
        port: Option<u16>,
        #[arg(long, env = "IDEAFORGE_DATA_DIR")]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Create an Administrator account in the data directory.
    SeedAdmin {
        #[arg(long)]
        email: String,
        /// Name of the environment variable holding the password.
        #[arg(long)]
        password_env: String,
        #[arg(long, default_value = "Administrator")]
        display_name: String,
        #[arg(long, env = "IDEAFORGE_DATA_DIR")]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print every stored record as JSON lines.
    Export {
        #[arg(long, env = "IDEAFORGE_DATA_DIR")]
        data_dir: Option<PathBuf>,
    },
}

fn load_config(path: Option<&PathBuf>) -> anyhow::Result<ServiceConfig> {
    match path {
        Some(p) => ServiceConfig::load(p),
        None => Ok(ServiceConfig::default()),
    }
}

async fn shutdown_signal() {
    let _ = tokio::signal::ctrl_c().await;
}

fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Serve { port, data_dir, config } => {
            let cfg = load_config(config.as_ref())?.with_overrides(port, data_dir);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let server = Server::bind(&cfg).await?;
                let addr = server.local_addr()?;
                println!("ideaforge listening on http://{addr}");
                tracing::info!(%addr, data_dir = %cfg.data_dir().display(), "serving");
                server.run(shutdown_signal()).await?;
                anyhow::Ok(())
            })
        }
        Command::SeedAdmin { email, password_env, display_name, data_dir, config } => {
            let cfg = load_config(config.as_ref())?.with_overrides(None, data_dir);
            let mut svc = server::open_service(&cfg, Arc::new(SystemClock))?;
            let admin = BootstrapAdmin { email: email.clone(), display_name, password_env };
            if server::bootstrap(&mut svc, &admin)? {
                println!("created administrator {email}");
            } else {
                println!("account {email} already exists; unchanged");
            }
            Ok(())
        }
        Command::Export { data_dir } => {
            let dir = data_dir.unwrap_or_else(|| ServiceConfig::default().data_dir());
            anyhow::ensure!(dir.is_dir(), "no data directory at {}", dir.display());
            let store = Store::open_read_only(&dir).with_context(|| format!("opening {}", dir.display()))?;
            print!("{}", store.export());
            Ok(())
        }
    }
}
