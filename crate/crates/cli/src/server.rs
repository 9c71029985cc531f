//! HTTP service for live sessions.
//!
//! Every mutating call takes an optional `ts` (client click time in ms). When
//! it is missing the server clock is used, never going below the session's
//! latest event. Computer moves are played as soon as the computer is on
//! turn, so each response shows the marble where the participant next acts.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use efrlab_core::session::{Choice, Group, ParticipantInfo, Session, SessionConfig, SessionError, SessionView};
use efrlab_core::game::Player;
use serde::Deserialize;
use serde_json::json;

#[derive(Clone, Default)]
pub struct AppState {
    inner: Arc<Inner>,
}

#[derive(Default)]
struct Inner {
    sessions: Mutex<HashMap<String, Arc<Mutex<Stored>>>>,
    next_id: Mutex<u64>,
    data_dir: Option<PathBuf>,
}

struct Stored {
    session: Session,
    /// Events already appended to the log file.
    persisted: usize,
}

impl AppState {
    pub fn new(data_dir: Option<PathBuf>) -> Self {
        AppState {
            inner: Arc::new(Inner {
                data_dir,
                ..Inner::default()
            }),
        }
    }

    /// Reloads every `<id>.jsonl` log in the data directory.
    pub fn load_existing(&self) -> anyhow::Result<usize> {
        let Some(dir) = &self.inner.data_dir else {
            return Ok(0);
        };
        std::fs::create_dir_all(dir)?;
        let mut n = 0;
        let mut max_id = 0;
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("jsonl") {
                continue;
            }
            let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            let session = Session::replay(&std::fs::read_to_string(&path)?)
                .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
            if let Ok(k) = id.parse::<u64>() {
                max_id = max_id.max(k);
            }
            let persisted = session.events().len();
            self.inner
                .sessions
                .lock()
                .unwrap()
                .insert(id, Arc::new(Mutex::new(Stored { session, persisted })));
            n += 1;
        }
        *self.inner.next_id.lock().unwrap() = max_id;
        Ok(n)
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Stored>>, ApiError> {
        self.inner
            .sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(id.to_string()))
    }

    fn persist(&self, id: &str, stored: &mut Stored) -> Result<(), ApiError> {
        let Some(dir) = &self.inner.data_dir else {
            return Ok(());
        };
        use std::io::Write;
        let mut f = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(dir.join(format!("{id}.jsonl")))
            .map_err(|e| ApiError::Io(e.to_string()))?;
        for e in &stored.session.events()[stored.persisted..] {
            writeln!(f, "{}", e.to_line()).map_err(|e| ApiError::Io(e.to_string()))?;
        }
        stored.persisted = stored.session.events().len();
        Ok(())
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/state", get(view))
        .route("/sessions/{id}/start", post(start))
        .route("/sessions/{id}/move", post(do_move))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/next", post(next))
        .route("/sessions/{id}/resume", post(resume))
        .route("/sessions/{id}/export", get(export))
        .route("/sessions/{id}/metadata", get(metadata))
        .route("/sessions/{id}/events", get(events))
        .with_state(state)
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    Session(SessionError),
    BadRequest(String),
    Io(String),
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError::Session(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (code, msg) = match self {
            ApiError::NotFound(id) => (StatusCode::NOT_FOUND, format!("no session `{id}`")),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::Io(m) => (StatusCode::INTERNAL_SERVER_ERROR, m),
            ApiError::Session(e) => {
                let code = match e {
                    SessionError::OutOfTurn(_)
                    | SessionError::NoPendingQuestion
                    | SessionError::QuestionPending
                    | SessionError::WrongStep { .. } => StatusCode::CONFLICT,
                    _ => StatusCode::BAD_REQUEST,
                };
                (code, e.to_string())
            }
        };
        (code, Json(json!({ "error": msg }))).into_response()
    }
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Deserialize)]
struct CreateBody {
    group: Group,
    seed: u64,
    participant: Option<String>,
    #[serde(default)]
    info: ParticipantInfo,
    practice_count: Option<usize>,
    ts: Option<u64>,
}

async fn create(State(app): State<AppState>, Json(body): Json<CreateBody>) -> Result<impl IntoResponse, ApiError> {
    let id = {
        let mut n = app.inner.next_id.lock().unwrap();
        *n += 1;
        n.to_string()
    };
    let mut cfg = SessionConfig::new(body.participant.unwrap_or_else(|| format!("P{id}")), body.group, body.seed);
    cfg.info = body.info;
    if let Some(p) = body.practice_count {
        cfg.practice_count = p;
    }
    let session = Session::new(cfg, body.ts.unwrap_or_else(now_ms))?;
    let view = session.view();
    let mut stored = Stored { session, persisted: 0 };
    app.persist(&id, &mut stored)?;
    app.inner
        .sessions
        .lock()
        .unwrap()
        .insert(id.clone(), Arc::new(Mutex::new(stored)));
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "state": view }))))
}

async fn view(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    let s = app.get(&id)?;
    let view = s.lock().unwrap().session.view();
    Ok(Json(view))
}

/// Applies `f` with a resolved timestamp, lets the computer play, persists
/// new events and returns the fresh view.
fn mutate<F>(app: &AppState, id: &str, ts: Option<u64>, f: F) -> Result<Json<SessionView>, ApiError>
where
    F: FnOnce(&mut Session, u64) -> Result<(), ApiError>,
{
    let arc = app.get(id)?;
    let mut stored = arc.lock().unwrap();
    let ts = ts.unwrap_or_else(|| now_ms().max(stored.session.last_ts()));
    f(&mut stored.session, ts)?;
    stored.session.advance_computer(ts)?;
    app.persist(id, &mut stored)?;
    Ok(Json(stored.session.view()))
}

#[derive(Deserialize, Default)]
struct TsBody {
    ts: Option<u64>,
}

async fn start(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Option<Json<TsBody>>,
) -> Result<Json<SessionView>, ApiError> {
    let ts = body.and_then(|b| b.ts);
    mutate(&app, &id, ts, |s, ts| Ok(s.start_trial(ts)?))
}

async fn next(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Option<Json<TsBody>>,
) -> Result<Json<SessionView>, ApiError> {
    let ts = body.and_then(|b| b.ts);
    mutate(&app, &id, ts, |s, ts| Ok(s.next_trial(ts)?))
}

async fn resume(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Option<Json<TsBody>>,
) -> Result<Json<SessionView>, ApiError> {
    let ts = body.and_then(|b| b.ts);
    mutate(&app, &id, ts, |s, ts| Ok(s.resume(ts)?))
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum Side {
    Left,
    Right,
}

#[derive(Deserialize)]
struct MoveBody {
    /// Action label, e.g. `d`.
    action: Option<String>,
    /// Trapdoor as displayed; used when `action` is absent.
    side: Option<Side>,
    ts: Option<u64>,
}

async fn do_move(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<MoveBody>,
) -> Result<Json<SessionView>, ApiError> {
    mutate(&app, &id, body.ts, |s, ts| {
        let label = match (body.action, body.side) {
            (Some(a), _) => a,
            (None, Some(side)) => {
                let t = s
                    .current_trial()
                    .ok_or_else(|| ApiError::BadRequest("no game on screen".into()))?;
                let node = s.state.position;
                let order = t.variant.display_order(&t.game, node);
                let pos = match side {
                    Side::Left => 0,
                    Side::Right => order.len().saturating_sub(1),
                };
                let a = *order
                    .get(pos)
                    .ok_or_else(|| ApiError::BadRequest("marble is in a bin".into()))?;
                t.game.label(node, a).to_string()
            }
            (None, None) => return Err(ApiError::BadRequest("need `action` or `side`".into())),
        };
        Ok(s.apply_move(Player::P, &label, ts)?)
    })
}

#[derive(Deserialize)]
struct AnswerBody {
    choice: Choice,
    ts: Option<u64>,
}

async fn answer(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<AnswerBody>,
) -> Result<Json<SessionView>, ApiError> {
    mutate(&app, &id, body.ts, |s, ts| Ok(s.answer_question(body.choice, ts)?))
}

async fn export(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = app.get(&id)?;
    let csv = s.lock().unwrap().session.export_records();
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], csv).into_response())
}

async fn metadata(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = app.get(&id)?;
    let meta = s.lock().unwrap().session.export_metadata();
    Ok(([(header::CONTENT_TYPE, "application/json")], meta).into_response())
}

async fn events(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = app.get(&id)?;
    let log = s.lock().unwrap().session.to_jsonl();
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], log).into_response())
}

pub async fn serve(port: u16, data_dir: Option<PathBuf>) -> anyhow::Result<()> {
    let state = AppState::new(data_dir);
    let restored = state.load_existing()?;
    if restored > 0 {
        eprintln!("restored {restored} session(s)");
    }
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await?;
    Ok(())
}
