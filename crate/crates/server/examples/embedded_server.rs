//! Runs the HTTP service in-process on an ephemeral port and talks to it.
//!
//!     cargo run -p ideaforge --example embedded_server

use ideaforge::config::ServiceConfig;
use ideaforge::server::Server;
use serde_json::{json, Value};

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let cfg = ServiceConfig { port: Some(0), data_dir: Some(dir.path().to_path_buf()), password_rounds: 1000, ..Default::default() };
    let server = Server::bind(&cfg).await?;
    let base = format!("http://{}/api/v1", server.local_addr()?);
    let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
    let running = tokio::spawn(server.run(async {
        let _ = stopped.await;
    }));
    println!("listening on {base}");

    let http = reqwest::Client::new();
    let signup = json!({"display_name": "Ana", "email": "ana@example.org", "password": "a long password"});
    let user: Value = http.post(format!("{base}/users")).json(&signup).send().await?.json().await?;
    println!("registered user {}", user["user_id"]);

    let login = json!({"email": "ana@example.org", "password": "a long password"});
    let session: Value = http.post(format!("{base}/sessions")).json(&login).send().await?.json().await?;
    let token = session["token"].as_str().unwrap_or_default().to_owned();

    let idea = json!({"title": "Free fruit map", "body": "Map public fruit trees so anyone can pick them.", "tags": ["food"]});
    let resp = http.post(format!("{base}/ideas")).bearer_auth(&token).json(&idea).send().await?;
    println!("submit -> {} {}", resp.status(), resp.text().await?);

    let resp = http.get(format!("{base}/moderation/queue")).bearer_auth(&token).send().await?;
    println!("visitor opening the moderation queue -> {}", resp.status());

    let resp = http.get(format!("{base}/ideas/best")).send().await?;
    println!("best idea with nothing published -> {}", resp.status());

    let _ = stop.send(());
    running.await??;
    Ok(())
}
