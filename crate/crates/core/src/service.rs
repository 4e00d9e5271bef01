//! JSON session service.
//!
//! | method | path | body | success |
//! |---|---|---|---|
//! | POST | `/sessions` | `{tactic?, scheme?, pcm?, priors?, difficulty_order?}` | 201 view |
//! | GET | `/sessions/{id}` | | 200 view |
//! | POST | `/sessions/{id}/answer` | `{type_id, state, what_if?}` | 200 view |
//! | GET | `/sessions/{id}/next-item` | | 200 `{session_id, type_id, gains}` |
//! | DELETE | `/sessions/{id}` | | 204 |
//!
//! Malformed bodies give 400 with per-field messages, unknown sessions 404,
//! and answers with zero likelihood 409.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::adaptive::{type_gains, HistoryEntry, SequencingTactic, Session, SessionConfig, SessionDocument};
use crate::bn::{rank_classes, Posterior};
use crate::error::{Error, Result};
use crate::model::{ClassPrior, ExpertModel, FineClass, Pcm, ValueScheme, N_TYPES};

/// Environment variable holding the listen address.
pub const ADDR_ENV: &str = "DCT_BN_ADDR";
pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";

pub fn listen_addr() -> String {
    std::env::var(ADDR_ENV).unwrap_or_else(|_| DEFAULT_ADDR.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedProb {
    pub class: String,
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRatio {
    pub class: String,
    /// A number, or the string `"inf"` for a class that rose from zero.
    pub ratio: Value,
}

/// Wire view of a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApiSessionView {
    pub session_id: String,
    pub tactic: SequencingTactic,
    pub scheme: ValueScheme,
    pub pcm: f64,
    /// Fine-class posterior, most probable first.
    pub posterior: Vec<RankedProb>,
    pub coarse_posterior: Vec<RankedProb>,
    /// Posterior over prior per class from the last step, in class order.
    pub change_ratios: Vec<ClassRatio>,
    pub recommendation: usize,
    pub history: Vec<HistoryEntry>,
    /// Valid answer labels per type, index 0 is type 1.
    pub type_states: Vec<Vec<String>>,
    pub what_if: bool,
}

fn ranked(p: &Posterior) -> Vec<RankedProb> {
    rank_classes(p).into_iter().map(|(class, prob)| RankedProb { class, prob }).collect()
}

fn ratio_value(r: f64) -> Value {
    if r.is_finite() {
        json!(r)
    } else {
        json!("inf")
    }
}

impl ApiSessionView {
    fn build(
        session: &Session,
        posterior: &Posterior,
        coarse: &Posterior,
        ratios: &[f64],
        recommendation: usize,
        what_if: bool,
    ) -> Result<Self> {
        Ok(ApiSessionView {
            session_id: session.id().to_string(),
            tactic: session.config().tactic,
            scheme: session.config().scheme,
            pcm: session.config().pcm.value(),
            posterior: ranked(posterior),
            coarse_posterior: ranked(coarse),
            change_ratios: FineClass::ALL
                .iter()
                .zip(ratios)
                .map(|(c, &r)| ClassRatio { class: c.label().to_string(), ratio: ratio_value(r) })
                .collect(),
            recommendation,
            history: session.history().to_vec(),
            type_states: (1..=N_TYPES)
                .map(|t| session.net().type_states(t).map(<[String]>::to_vec))
                .collect::<Result<_>>()?,
            what_if,
        })
    }

    pub fn of_session(session: &Session) -> Result<Self> {
        Self::build(
            session,
            &session.posterior()?,
            &session.coarse_posterior()?,
            session.last_ratios(),
            session.next_item(),
            false,
        )
    }
}

/// Shared service state: sessions keyed by id, each behind its own lock.
pub struct ServiceState {
    model: ExpertModel,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
    persist_dir: Option<PathBuf>,
}

impl ServiceState {
    pub fn new(model: ExpertModel) -> Self {
        ServiceState { model, sessions: RwLock::new(HashMap::new()), next_id: AtomicU64::new(1), persist_dir: None }
    }

    /// Persists every session as `<dir>/<id>.json` and restores any found there.
    pub fn with_persistence(mut self, dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        let mut max_id = 0;
        {
            let mut sessions = self.sessions.write().expect("session table");
            for entry in std::fs::read_dir(&dir)? {
                let path = entry?.path();
                if path.extension().and_then(|e| e.to_str()) != Some("json") {
                    continue;
                }
                let doc: SessionDocument = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
                if let Some(n) = doc.session_id.strip_prefix("s").and_then(|n| n.parse::<u64>().ok()) {
                    max_id = max_id.max(n);
                }
                let session = Session::replay(&doc, &self.model)?;
                sessions.insert(doc.session_id.clone(), Arc::new(Mutex::new(session)));
            }
        }
        self.next_id = AtomicU64::new(max_id + 1);
        self.persist_dir = Some(dir);
        Ok(self)
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().expect("session table").len()
    }

    fn get(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions.read().expect("session table").get(id).cloned()
    }

    fn persist(&self, session: &Session) -> Result<()> {
        if let Some(dir) = &self.persist_dir {
            let doc = session.to_document()?;
            std::fs::write(dir.join(format!("{}.json", doc.session_id)), serde_json::to_string_pretty(&doc)?)?;
        }
        Ok(())
    }
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn fields(fields: Vec<(String, String)>) -> Self {
        let fields: Vec<Value> = fields.into_iter().map(|(f, m)| json!({"field": f, "message": m})).collect();
        ApiError { status: StatusCode::BAD_REQUEST, body: json!({"error": "invalid request", "fields": fields}) }
    }

    fn not_found(id: &str) -> Self {
        ApiError { status: StatusCode::NOT_FOUND, body: json!({"error": format!("no session `{id}`")}) }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InconsistentEvidence => StatusCode::CONFLICT,
            Error::Input(_) | Error::UnknownState { .. } | Error::UnknownVariable(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError { status, body: json!({"error": e.to_string()}) }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

fn parse_object(body: &Bytes) -> ApiResult<Map<String, Value>> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(Map::new());
    }
    match serde_json::from_slice::<Value>(body) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(ApiError::fields(vec![("body".into(), "expected a JSON object".into())])),
        Err(e) => Err(ApiError::fields(vec![("body".into(), format!("malformed JSON: {e}"))])),
    }
}

fn parse_priors(v: &Value) -> std::result::Result<ClassPrior, String> {
    match v {
        Value::String(s) => match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(ClassPrior::uniform()),
            "table2" => Ok(ClassPrior::table2()),
            other => Err(format!("unknown priors `{other}`; use uniform, table2, a list or a class map")),
        },
        Value::Array(items) => {
            let probs: Vec<f64> = items
                .iter()
                .map(|x| x.as_f64().ok_or("priors must be numbers"))
                .collect::<std::result::Result<_, _>>()?;
            let arr: [f64; FineClass::COUNT] =
                probs.try_into().map_err(|_| format!("expected {} priors", FineClass::COUNT))?;
            ClassPrior::new(arr).map_err(|e| e.to_string())
        }
        Value::Object(map) => {
            let mut arr = [0.0; FineClass::COUNT];
            for (k, x) in map {
                let class: FineClass = k.parse().map_err(|e: Error| e.to_string())?;
                arr[class.index()] = x.as_f64().ok_or_else(|| format!("prior for {k} must be a number"))?;
            }
            ClassPrior::new(arr).map_err(|e| e.to_string())
        }
        _ => Err("priors must be a name, a list or a class map".into()),
    }
}

fn parse_create(map: &Map<String, Value>) -> ApiResult<SessionConfig> {
    let mut config = SessionConfig::default();
    let mut errors = Vec::new();
    for (key, v) in map {
        let result: std::result::Result<(), String> = match key.as_str() {
            "tactic" => v
                .as_str()
                .ok_or_else(|| "expected a string".to_string())
                .and_then(|s| s.parse().map_err(|e: Error| e.to_string()))
                .map(|t| config.tactic = t),
            "scheme" => v
                .as_str()
                .ok_or_else(|| "expected a string".to_string())
                .and_then(|s| s.parse().map_err(|e: Error| e.to_string()))
                .map(|s| config.scheme = s),
            "pcm" => match v {
                Value::Number(n) => Pcm::new(n.as_f64().unwrap_or(f64::NAN)).map_err(|e| e.to_string()),
                Value::String(s) => s.parse().map_err(|e: Error| e.to_string()),
                _ => Err("expected a number or preset name".into()),
            }
            .map(|p| config.pcm = p),
            "priors" => parse_priors(v).map(|p| config.prior = p),
            "difficulty_order" => serde_json::from_value::<[usize; N_TYPES]>(v.clone())
                .map_err(|_| "expected six type ids".to_string())
                .map(|o| config.difficulty_order = o),
            other => Err(format!("unknown field `{other}`")),
        };
        if let Err(m) = result {
            errors.push((key.clone(), m));
        }
    }
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(ApiError::fields(errors))
    }
}

struct AnswerRequest {
    type_id: usize,
    state: String,
    what_if: bool,
}

fn parse_answer(map: &Map<String, Value>) -> ApiResult<AnswerRequest> {
    let mut errors = Vec::new();
    let type_id = match map.get("type_id") {
        Some(v) => match v.as_u64() {
            Some(t) if (1..=N_TYPES as u64).contains(&t) => Some(t as usize),
            _ => {
                errors.push(("type_id".into(), format!("expected an integer in 1..={N_TYPES}")));
                None
            }
        },
        None => {
            errors.push(("type_id".into(), "required".into()));
            None
        }
    };
    let state = match map.get("state") {
        Some(Value::String(s)) => Some(s.clone()),
        Some(Value::Number(n)) if n.is_u64() => Some(n.to_string()),
        Some(_) => {
            errors.push(("state".into(), "expected a state label".into()));
            None
        }
        None => {
            errors.push(("state".into(), "required".into()));
            None
        }
    };
    let what_if = match map.get("what_if") {
        None | Some(Value::Null) => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => {
            errors.push(("what_if".into(), "expected a boolean".into()));
            false
        }
    };
    for key in map.keys() {
        if !matches!(key.as_str(), "type_id" | "state" | "what_if") {
            errors.push((key.clone(), format!("unknown field `{key}`")));
        }
    }
    match (type_id, state) {
        (Some(type_id), Some(state)) if errors.is_empty() => Ok(AnswerRequest { type_id, state, what_if }),
        _ => Err(ApiError::fields(errors)),
    }
}

async fn create_session(
    State(state): State<Arc<ServiceState>>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<ApiSessionView>)> {
    let config = parse_create(&parse_object(&body)?)?;
    let id = format!("s{}", state.next_id.fetch_add(1, Ordering::Relaxed));
    let session = Session::new(id.clone(), config, &state.model)?;
    let view = ApiSessionView::of_session(&session)?;
    state.persist(&session)?;
    state.sessions.write().expect("session table").insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(
    State(state): State<Arc<ServiceState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<ApiSessionView>> {
    let handle = state.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let session = handle.lock().expect("session lock").clone();
    Ok(Json(ApiSessionView::of_session(&session)?))
}

async fn answer(
    State(state): State<Arc<ServiceState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<ApiSessionView>> {
    let handle = state.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let req = parse_answer(&parse_object(&body)?)?;
    if req.what_if {
        let snapshot = handle.lock().expect("session lock").clone();
        let step = snapshot.what_if(req.type_id, &req.state)?;
        return Ok(Json(ApiSessionView::build(
            &snapshot,
            &step.posterior,
            &step.coarse,
            &step.ratios,
            step.recommendation,
            true,
        )?));
    }
    let mut session = handle.lock().expect("session lock");
    session.step(req.type_id, &req.state)?;
    state.persist(&session)?;
    Ok(Json(ApiSessionView::of_session(&session)?))
}

async fn next_item(State(state): State<Arc<ServiceState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let handle = state.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let session = handle.lock().expect("session lock").clone();
    let gains = type_gains(session.net())?;
    Ok(Json(
        json!({"session_id": id, "type_id": session.next_item(), "tactic": session.config().tactic, "gains": gains}),
    ))
}

async fn delete_session(State(state): State<Arc<ServiceState>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    let removed = state.sessions.write().expect("session table").remove(&id);
    if removed.is_none() {
        return Err(ApiError::not_found(&id));
    }
    if let Some(dir) = &state.persist_dir {
        let path = dir.join(format!("{id}.json"));
        if path.exists() {
            std::fs::remove_file(path).map_err(Error::from)?;
        }
    }
    Ok(StatusCode::NO_CONTENT)
}

pub fn router(state: Arc<ServiceState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/next-item", get(next_item))
        .with_state(state)
}

/// Serves on an already bound listener until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<ServiceState>) -> Result<()> {
    let addr: SocketAddr = listener.local_addr()?;
    log::info!("listening on {addr}");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
