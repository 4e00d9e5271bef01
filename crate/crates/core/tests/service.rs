use std::sync::Arc;

use dct_bn::adaptive::{Session, SessionConfig};
use dct_bn::model::{ClassPrior, ExpertModel, FineClass, Pcm, ValueScheme};
use dct_bn::service::{router, ServiceState};
use reqwest::{Client, StatusCode};
use serde_json::{json, Value};

struct Server {
    base: String,
    http: Client,
}

impl Server {
    async fn start(state: ServiceState) -> Server {
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let app = router(Arc::new(state));
        tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
        Server { base, http: Client::new() }
    }

    async fn post(&self, path: &str, body: Value) -> (StatusCode, Value) {
        let r = self.http.post(format!("{}{path}", self.base)).json(&body).send().await.unwrap();
        let status = r.status();
        (status, r.json().await.unwrap_or(Value::Null))
    }

    async fn get(&self, path: &str) -> (StatusCode, Value) {
        let r = self.http.get(format!("{}{path}", self.base)).send().await.unwrap();
        let status = r.status();
        (status, r.json().await.unwrap_or(Value::Null))
    }

    async fn create(&self, body: Value) -> String {
        let (status, view) = self.post("/sessions", body).await;
        assert_eq!(status, StatusCode::CREATED, "{view}");
        view["session_id"].as_str().unwrap().to_string()
    }
}

fn prob_of(view: &Value, class: &str) -> f64 {
    view["posterior"].as_array().unwrap().iter().find(|e| e["class"] == class).unwrap()["prob"].as_f64().unwrap()
}

#[tokio::test]
async fn default_session_view_has_every_field() {
    let s = Server::start(ServiceState::new(ExpertModel::table1())).await;
    let (status, view) = s.post("/sessions", json!({})).await;
    assert_eq!(status, StatusCode::CREATED);
    for field in [
        "session_id",
        "tactic",
        "scheme",
        "pcm",
        "posterior",
        "coarse_posterior",
        "change_ratios",
        "recommendation",
        "history",
        "type_states",
    ] {
        assert!(view.get(field).is_some(), "missing {field}");
    }
    assert_eq!(view["tactic"], "max_gain");
    assert_eq!(view["scheme"], "band");
    assert_eq!(view["type_states"][4], json!(["H", "L"]));
    let ranked: Vec<f64> = view["posterior"].as_array().unwrap().iter().map(|e| e["prob"].as_f64().unwrap()).collect();
    assert!(ranked.windows(2).all(|w| w[0] >= w[1]));
    assert!((ranked.iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

#[tokio::test]
async fn count_scheme_accepts_numeric_states() {
    let s = Server::start(ServiceState::new(ExpertModel::table1())).await;
    let id = s.create(json!({"scheme": "count", "pcm": "low", "priors": "uniform"})).await;
    let (status, view) = s.post(&format!("/sessions/{id}/answer"), json!({"type_id": 1, "state": 5})).await;
    assert_eq!(status, StatusCode::OK, "{view}");
    let mut local = Session::new(
        "x",
        SessionConfig {
            scheme: ValueScheme::Count,
            pcm: Pcm::LOW,
            prior: ClassPrior::uniform(),
            ..SessionConfig::default()
        },
        &ExpertModel::table1(),
    )
    .unwrap();
    local.step_at(1, "5", 0).unwrap();
    let post = local.posterior().unwrap();
    for c in FineClass::ALL {
        assert!((prob_of(&view, c.label()) - post.probs[c.index()]).abs() < 1e-6);
    }
    assert_eq!(view["history"][0]["state"], "5");
}

#[tokio::test]
async fn priors_as_array_or_map() {
    let s = Server::start(ServiceState::new(ExpertModel::table1())).await;
    let mut arr = vec![0.0; 12];
    arr[FineClass::Lwh.index()] = 1.0;
    let a = s.create(json!({"priors": arr})).await;
    let (_, view) = s.get(&format!("/sessions/{a}")).await;
    assert_eq!(prob_of(&view, "LWH"), 1.0);
    let (status, _) = s.post("/sessions", json!({"priors": {"SDF": 3, "SRN": 1}})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let b = s.create(json!({"priors": {"SDF": 0.75, "SRN": 0.25}})).await;
    let (_, view) = s.get(&format!("/sessions/{b}")).await;
    assert!((prob_of(&view, "SDF") - 0.75).abs() < 1e-12);
}

#[tokio::test]
async fn malformed_requests_report_fields() {
    let s = Server::start(ServiceState::new(ExpertModel::table1())).await;
    let (status, body) = s.post("/sessions", json!({"tactic": "sideways", "pcm": 3.0, "colour": "red"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let fields: Vec<&str> = body["fields"].as_array().unwrap().iter().map(|f| f["field"].as_str().unwrap()).collect();
    for f in ["tactic", "pcm", "colour"] {
        assert!(fields.contains(&f), "{body}");
    }
    let id = s.create(json!({})).await;
    for bad in [
        json!({"type_id": 7, "state": "H"}),
        json!({"state": "H"}),
        json!({"type_id": 2}),
        json!({"type_id": 2, "state": "Q"}),
    ] {
        let (status, body) = s.post(&format!("/sessions/{id}/answer"), bad.clone()).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{bad} -> {body}");
    }
    let r = s
        .http
        .post(format!("{}/sessions", s.base))
        .header("content-type", "application/json")
        .body("{not json")
        .send()
        .await
        .unwrap();
    assert_eq!(r.status(), StatusCode::BAD_REQUEST);
    let (_, view) = s.get(&format!("/sessions/{id}")).await;
    assert!(view["history"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn unknown_sessions_are_not_found() {
    let s = Server::start(ServiceState::new(ExpertModel::table1())).await;
    assert_eq!(s.get("/sessions/s99").await.0, StatusCode::NOT_FOUND);
    assert_eq!(s.get("/sessions/s99/next-item").await.0, StatusCode::NOT_FOUND);
    assert_eq!(s.post("/sessions/s99/answer", json!({"type_id": 1, "state": "H"})).await.0, StatusCode::NOT_FOUND);
    let r = s.http.delete(format!("{}/sessions/s99", s.base)).send().await.unwrap();
    assert_eq!(r.status(), StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn what_if_leaves_history_alone() {
    let s = Server::start(ServiceState::new(ExpertModel::table1())).await;
    let id = s.create(json!({})).await;
    s.post(&format!("/sessions/{id}/answer"), json!({"type_id": 2, "state": "L"})).await;
    let (_, before) = s.get(&format!("/sessions/{id}")).await;
    let (status, hypo) =
        s.post(&format!("/sessions/{id}/answer"), json!({"type_id": 3, "state": "H", "what_if": true})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(hypo["history"].as_array().unwrap().len(), 1);
    assert_ne!(hypo["posterior"], before["posterior"]);
    let (_, after) = s.get(&format!("/sessions/{id}")).await;
    assert_eq!(before, after);
}

#[tokio::test]
async fn contradictions_conflict_without_side_effects() {
    let s = Server::start(ServiceState::new(ExpertModel::table1())).await;
    let id = s.create(json!({"pcm": 0, "priors": {"MIS": 1}})).await;
    let (status, _) = s.post(&format!("/sessions/{id}/answer"), json!({"type_id": 1, "state": "H"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (_, view) = s.get(&format!("/sessions/{id}")).await;
    assert!(view["history"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn next_item_walks_the_difficulty_order() {
    let s = Server::start(ServiceState::new(ExpertModel::table1())).await;
    let id = s.create(json!({"tactic": "hard-first", "difficulty_order": [3, 1, 2, 6, 5, 4]})).await;
    let mut seen = Vec::new();
    for _ in 0..6 {
        let (_, next) = s.get(&format!("/sessions/{id}/next-item")).await;
        let t = next["type_id"].as_u64().unwrap();
        assert_eq!(next["gains"].as_array().unwrap().len(), 6);
        seen.push(t);
        let states = s.get(&format!("/sessions/{id}")).await.1["type_states"][t as usize - 1].clone();
        s.post(&format!("/sessions/{id}/answer"), json!({"type_id": t, "state": states[0]})).await;
    }
    assert_eq!(seen, [4, 5, 6, 2, 1, 3]);
}

#[tokio::test]
async fn sessions_are_independent_under_concurrency() {
    let s = Arc::new(Server::start(ServiceState::new(ExpertModel::table1())).await);
    let mut tasks = Vec::new();
    for i in 0..8 {
        let s = Arc::clone(&s);
        tasks.push(tokio::spawn(async move {
            let id = s.create(json!({})).await;
            for t in 1..=6 {
                let state = if (t + i) % 2 == 0 { "H" } else { "L" };
                let (status, _) =
                    s.post(&format!("/sessions/{id}/answer"), json!({"type_id": t, "state": state})).await;
                assert_eq!(status, StatusCode::OK);
            }
            s.get(&format!("/sessions/{id}")).await.1
        }));
    }
    for (i, task) in tasks.into_iter().enumerate() {
        let view = task.await.unwrap();
        assert_eq!(view["history"].as_array().unwrap().len(), 6);
        let want = if i % 2 == 0 { "L" } else { "H" };
        assert_eq!(view["history"][0]["state"], want);
    }
}

#[tokio::test]
async fn persisted_sessions_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let first = Server::start(ServiceState::new(ExpertModel::table1()).with_persistence(dir.path()).unwrap()).await;
    let id = first.create(json!({"scheme": "count"})).await;
    first.post(&format!("/sessions/{id}/answer"), json!({"type_id": 4, "state": "2"})).await;
    let (_, before) = first.get(&format!("/sessions/{id}")).await;
    let gone = first.create(json!({})).await;
    let r = first.http.delete(format!("{}/sessions/{gone}", first.base)).send().await.unwrap();
    assert_eq!(r.status(), StatusCode::NO_CONTENT);

    let state = ServiceState::new(ExpertModel::table1()).with_persistence(dir.path()).unwrap();
    assert_eq!(state.session_count(), 1);
    let second = Server::start(state).await;
    let (status, after) = second.get(&format!("/sessions/{id}")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(before["posterior"], after["posterior"]);
    assert_eq!(before["history"], after["history"]);
    let fresh = second.create(json!({})).await;
    assert_ne!(fresh, id);
}
