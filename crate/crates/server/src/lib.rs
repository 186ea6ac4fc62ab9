//! JSON session server for compiled stories.
//!
//! Stories are loaded once at startup and never change. Each session lives
//! behind its own lock, so events for one session apply strictly one at a
//! time while different sessions proceed independently.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use fuselage::json::to_canonical_compact;
use fuselage::model::StoryGraph;
use fuselage::runtime::{Event, RuntimeError, SaveError, SaveState, Session};
use rand::distributions::Alphanumeric;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

/// Idle time after which a session is dropped.
pub const DEFAULT_IDLE_TTL: Duration = Duration::from_secs(24 * 60 * 60);

const SESSION_ID_LEN: usize = 22;

const PLACEHOLDER_INDEX: &str = include_str!("../../../web/index.html");

pub struct Config {
    pub idle_ttl: Duration,
    /// Directory with the player UI; a placeholder page is served if unset.
    pub static_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config { idle_ttl: DEFAULT_IDLE_TTL, static_dir: None }
    }
}

pub struct SessionRecord {
    pub story_id: String,
    pub session: Session,
    pub created: Instant,
    pub touched: Instant,
}

pub struct AppState {
    stories: BTreeMap<String, Arc<StoryGraph>>,
    sessions: Mutex<HashMap<String, Arc<tokio::sync::Mutex<SessionRecord>>>>,
    idle_ttl: Duration,
}

impl AppState {
    pub fn new(stories: BTreeMap<String, Arc<StoryGraph>>, idle_ttl: Duration) -> Self {
        AppState { stories, sessions: Mutex::new(HashMap::new()), idle_ttl }
    }

    fn insert(&self, story_id: &str, session: Session) -> String {
        let now = Instant::now();
        let record = SessionRecord { story_id: story_id.to_string(), session, created: now, touched: now };
        let mut map = self.sessions.lock().expect("session map lock");
        loop {
            let id: String = rand::thread_rng().sample_iter(&Alphanumeric).take(SESSION_ID_LEN).map(char::from).collect();
            if !map.contains_key(&id) {
                map.insert(id.clone(), Arc::new(tokio::sync::Mutex::new(record)));
                return id;
            }
        }
    }

    fn lookup(&self, id: &str) -> Option<Arc<tokio::sync::Mutex<SessionRecord>>> {
        self.sessions.lock().expect("session map lock").get(id).cloned()
    }

    fn remove(&self, id: &str) {
        self.sessions.lock().expect("session map lock").remove(id);
    }

    /// Drops every session idle for longer than the configured time.
    pub fn sweep(&self) {
        let now = Instant::now();
        self.sessions
            .lock()
            .expect("session map lock")
            .retain(|_, r| r.try_lock().map_or(true, |r| now.duration_since(r.touched) <= self.idle_ttl));
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session map lock").len()
    }
}

fn canonical(status: StatusCode, body: &impl Serialize) -> Response {
    let text = to_canonical_compact(body).expect("response serializes");
    (status, [(header::CONTENT_TYPE, "application/json")], text).into_response()
}

fn error(status: StatusCode, code: &str, message: impl Into<String>) -> Response {
    canonical(status, &json!({ "error": code, "message": message.into() }))
}

fn not_found(what: &str, id: &str) -> Response {
    error(StatusCode::NOT_FOUND, "not-found", format!("no {what} `{id}`"))
}

#[derive(Serialize)]
struct StorySummary<'a> {
    id: &'a str,
    title: &'a str,
    endings_count: usize,
}

async fn list_stories(State(app): State<Arc<AppState>>) -> Response {
    let list: Vec<StorySummary> = app
        .stories
        .iter()
        .map(|(id, g)| StorySummary { id, title: &g.title, endings_count: g.endings().len() })
        .collect();
    canonical(StatusCode::OK, &list)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateBody {
    seed: Option<u64>,
}

/// `POST /api/stories/{sid}/sessions` and `POST /api/stories/{sid}/sessions:restore`.
async fn story_action(State(app): State<Arc<AppState>>, Path((sid, action)): Path<(String, String)>, body: Bytes) -> Response {
    let Some(graph) = app.stories.get(&sid).cloned() else { return not_found("story", &sid) };
    let session = match action.as_str() {
        "sessions" => {
            let parsed = if body.iter().all(u8::is_ascii_whitespace) {
                Ok(CreateBody { seed: None })
            } else {
                serde_json::from_slice::<CreateBody>(&body)
            };
            match parsed {
                Ok(b) => Session::new(graph, b.seed.unwrap_or(0)),
                Err(e) => return error(StatusCode::BAD_REQUEST, "malformed-body", e.to_string()),
            }
        }
        "sessions:restore" => {
            let save = match SaveState::from_json(&body) {
                Ok(s) => s,
                Err(e) => return save_error(e),
            };
            match Session::restore(graph, &save) {
                Ok(s) => s,
                Err(e) => return save_error(e),
            }
        }
        _ => return error(StatusCode::NOT_FOUND, "not-found", format!("no route `{action}`")),
    };
    let view = session.view();
    let id = app.insert(&sid, session);
    canonical(StatusCode::CREATED, &json!({ "session_id": id, "view": view }))
}

fn save_error(e: SaveError) -> Response {
    match e {
        SaveError::HashMismatch { .. } => error(StatusCode::CONFLICT, "hash-mismatch", e.to_string()),
        SaveError::UnsupportedVersion(_) => error(StatusCode::BAD_REQUEST, "unsupported-version", e.to_string()),
        SaveError::MalformedSave(_) => error(StatusCode::BAD_REQUEST, "malformed-save", e.to_string()),
    }
}

/// Locks a live session, dropping it instead if it has been idle too long.
async fn live(app: &AppState, id: &str) -> Option<tokio::sync::OwnedMutexGuard<SessionRecord>> {
    let record = app.lookup(id)?.lock_owned().await;
    if record.touched.elapsed() > app.idle_ttl {
        drop(record);
        app.remove(id);
        return None;
    }
    Some(record)
}

async fn get_view(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    match live(&app, &id).await {
        Some(r) => canonical(StatusCode::OK, &json!({ "view": r.session.view() })),
        None => not_found("session", &id),
    }
}

async fn post_event(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Response {
    let Some(mut record) = live(&app, &id).await else { return not_found("session", &id) };
    let event = match serde_json::from_slice::<Value>(&body).map_err(|e| e.to_string()).and_then(|v| Event::from_json(&v).map_err(|e| e.to_string())) {
        Ok(e) => e,
        Err(e) => return error(StatusCode::BAD_REQUEST, "malformed-event", e),
    };
    record.touched = Instant::now();
    match record.session.apply(&event) {
        Ok(notes) => {
            let notes: Vec<&str> = notes.iter().map(|n| n.code()).collect();
            canonical(StatusCode::OK, &json!({ "view": record.session.view(), "notes": notes }))
        }
        Err(RuntimeError::SessionFinished(end)) => canonical(
            StatusCode::CONFLICT,
            &json!({
                "error": "session-finished",
                "message": format!("session already finished at `{end}`"),
                "view": record.session.view(),
            }),
        ),
        Err(RuntimeError::MalformedEvent(m)) => error(StatusCode::BAD_REQUEST, "malformed-event", m),
    }
}

async fn get_save(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    match live(&app, &id).await {
        Some(r) => canonical(StatusCode::OK, &r.session.save()),
        None => not_found("session", &id),
    }
}

pub fn router(app: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/stories", get(list_stories))
        .route("/api/stories/{sid}/{action}", axum::routing::post(story_action))
        .route("/api/sessions/{id}", get(get_view))
        .route("/api/sessions/{id}/events", axum::routing::post(post_event))
        .route("/api/sessions/{id}/save", get(get_save))
        .with_state(app);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER_INDEX) })),
    }
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(stories: BTreeMap<String, Arc<StoryGraph>>, addr: SocketAddr, config: Config) -> std::io::Result<()> {
    let app = Arc::new(AppState::new(stories, config.idle_ttl));
    let sweeper = Arc::clone(&app);
    let every = config.idle_ttl.min(Duration::from_secs(60)).max(Duration::from_millis(100));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(every);
        loop {
            tick.tick().await;
            sweeper.sweep();
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(app, config.static_dir)).await
}
