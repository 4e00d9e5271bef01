//! Starts the session service, drives one session over HTTP, and shuts down.
//!
//! For a long-running server use `dct-bn serve`.

use std::sync::Arc;

use dct_bn::model::ExpertModel;
use dct_bn::service::{router, ServiceState};
use serde_json::{json, Value};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let base = format!("http://{}", listener.local_addr()?);
    let app = router(Arc::new(ServiceState::new(ExpertModel::table1())));
    let server = tokio::spawn(async move { axum::serve(listener, app).await });
    println!("listening on {base}\n");

    let http = reqwest::Client::new();
    let r =
        http.post(format!("{base}/sessions")).json(&json!({"tactic": "max_gain", "priors": "table2"})).send().await?;
    println!("POST /sessions -> {}", r.status());
    let view: Value = r.json().await?;
    let id = view["session_id"].as_str().ok_or("no session id")?.to_string();
    println!("recommended first type: {}\n", view["recommendation"]);

    for (t, s) in [(1, "L"), (2, "H"), (3, "L")] {
        let r =
            http.post(format!("{base}/sessions/{id}/answer")).json(&json!({"type_id": t, "state": s})).send().await?;
        println!("answer type{t}={s} -> {}", r.status());
        let view: Value = r.json().await?;
        for e in view["posterior"].as_array().into_iter().flatten().take(3) {
            println!("  {} {:.4}", e["class"].as_str().unwrap_or("?"), e["prob"].as_f64().unwrap_or(0.0));
        }
    }

    let next: Value = http.get(format!("{base}/sessions/{id}/next-item")).send().await?.json().await?;
    println!("\nnext item: {next}");
    let r = http.delete(format!("{base}/sessions/{id}")).send().await?;
    println!("DELETE -> {}", r.status());
    server.abort();
    Ok(())
}
