//! JSON over HTTP. Each session keeps the last few evaluated programs so an
//! edit that fills a hole of any of them resumes from its result.

use std::collections::{HashMap, VecDeque};
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::Mutex;
use uuid::Uuid;

use crate::closures::{inspect, InspectorView};
use crate::dynamics::{multi_step, EvalError, Run};
use crate::engine::{self, Diagnostic, Evaluation, FragmentError, Options, Program, RunError};
use crate::fill::{detect_filling, fill_typed};
use crate::surface::{int_tree, print_int, print_ty};
use crate::syntax::{HoleCtx, HoleName, TypingCtx};

pub const SNAPSHOTS: usize = 8;
pub const IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);
/// Upper bound on `n` for `/step`.
pub const MAX_TRACE: usize = 10_000;

#[derive(Clone, Debug)]
pub struct Config {
    pub fuel: usize,
    pub idle_timeout: Duration,
    pub options: Options,
}

impl Default for Config {
    fn default() -> Self {
        Config { fuel: engine::DEFAULT_FUEL, idle_timeout: IDLE_TIMEOUT, options: Options::default() }
    }
}

struct Snapshot {
    seq: usize,
    program: Program,
    result: Evaluation,
}

struct Session {
    fuel: usize,
    next_seq: usize,
    /// Newest first.
    snapshots: VecDeque<Snapshot>,
    last_used: Instant,
}

impl Session {
    fn push(&mut self, program: Program, result: Evaluation) -> usize {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.snapshots.push_front(Snapshot { seq, program, result });
        self.snapshots.truncate(SNAPSHOTS);
        seq
    }
}

type Shared = Arc<Mutex<Session>>;

struct AppState {
    config: Config,
    sessions: std::sync::Mutex<HashMap<String, Shared>>,
}

impl AppState {
    fn session(&self, id: &str) -> Result<Shared, ApiError> {
        let mut sessions = self.sessions.lock().unwrap();
        let now = Instant::now();
        let ttl = self.config.idle_timeout;
        // a session whose lock is held is in use, never stale
        sessions.retain(|_, s| s.try_lock().map_or(true, |s| now.duration_since(s.last_used) < ttl));
        sessions.get(id).cloned().ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session `{id}`")))
    }
}

struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, body: json!({ "error": message.into() }) }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body[key] = value;
        self
    }

    fn diagnostics(diags: &[Diagnostic]) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "program rejected").with("diagnostics", json!(diags))
    }

    fn run(e: RunError) -> Self {
        match e {
            RunError::Eval(EvalError::Overflow(m)) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, format!("integer overflow: {m}"))
            }
            e => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

pub fn router(config: Config) -> Router {
    let state = Arc::new(AppState { config, sessions: Default::default() });
    Router::new()
        .route("/session", post(create_session))
        .route("/session/:id/program", post(set_program))
        .route("/session/:id/fill", post(fill_hole))
        .route("/session/:id/closure/:hole/:instance", get(closure))
        .route("/session/:id/step", post(step))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, config: Config) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(config)).await
}

fn parse_body<T: serde::de::DeserializeOwned + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, format!("bad request body: {e}")))
}

#[derive(Deserialize, Default)]
struct CreateReq {
    fuel: Option<usize>,
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let req: CreateReq = parse_body(&body)?;
    let id = Uuid::new_v4().simple().to_string();
    let session = Session {
        fuel: req.fuel.unwrap_or(app.config.fuel),
        next_seq: 0,
        snapshots: VecDeque::new(),
        last_used: Instant::now(),
    };
    app.sessions.lock().unwrap().insert(id.clone(), Arc::new(Mutex::new(session)));
    Ok(Json(json!({ "session_id": id, "fuel": req.fuel.unwrap_or(app.config.fuel) })))
}

fn ctx_json(ctx: &TypingCtx) -> Value {
    ctx.iter().map(|(x, t)| json!({ "var": x, "type": print_ty(t) })).collect()
}

fn holes_json(holes: &HoleCtx) -> Value {
    holes.iter().map(|(u, h)| json!({ "hole": u.as_str(), "type": print_ty(&h.ty), "ctx": ctx_json(&h.ctx) })).collect()
}

fn view_json(view: &InspectorView) -> Value {
    json!({
        "hole": view.hole.as_str(),
        "instance": view.instance,
        "path": view.path.iter().map(|(u, k)| json!({ "hole": u.as_str(), "instance": k })).collect::<Vec<_>>(),
        "env": view.bindings.iter().map(|b| json!({
            "var": b.var,
            "type": print_ty(&b.ty),
            "value_pretty": print_int(&b.value),
            "value_tree": int_tree(&b.value),
        })).collect::<Vec<_>>(),
    })
}

fn result_json(program: &Program, result: &Evaluation) -> Result<Value, ApiError> {
    let closures = result
        .index
        .instances
        .iter()
        .map(|c| {
            inspect(&result.index, &c.hole, c.instance, &program.elab.holes)
                .map(|v| view_json(&v))
                .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(json!({
        "source": program.source,
        "type": print_ty(&program.elab.ty),
        "result_pretty": print_int(&result.run.expr),
        "result_tree": int_tree(&result.run.expr),
        "outcome": result.run.outcome.as_str(),
        "steps": result.run.steps,
        "closures": closures,
        "holes": holes_json(&program.elab.holes),
        "diagnostics": program.warnings,
    }))
}

#[derive(Deserialize)]
struct ProgramReq {
    source: String,
}

/// Resume from the newest snapshot that `program` fills one hole of.
fn try_resume(session: &Session, program: &Program) -> Option<(usize, Run)> {
    session.snapshots.iter().find_map(|snap| {
        let filling = detect_filling(&snap.program.elab, &program.elab)?;
        let h = snap.program.elab.holes.get(&filling.hole)?;
        let holes = program
            .elab
            .holes
            .clone()
            .union(HoleCtx::singleton(filling.hole.clone(), h.ctx.clone(), h.ty.clone()))
            .ok()?;
        let (filled, _) = fill_typed(&holes, &filling.hole, &filling.filler, &snap.result.run.expr).ok()?;
        let run = multi_step(&filled, session.fuel).ok()?;
        Some((snap.seq, run))
    })
}

async fn set_program(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<ProgramReq>,
) -> ApiResult {
    let shared = app.session(&id)?;
    let mut session = shared.lock().await;
    session.last_used = Instant::now();
    let program = engine::load(&req.source, &app.config.options).map_err(|d| ApiError::diagnostics(&d))?;
    let (result, resumed_from) = match try_resume(&session, &program) {
        Some((seq, run)) => (engine::evaluate_run(run, &program.elab).map_err(ApiError::run)?, Some(seq)),
        None => (engine::evaluate(&program.elab, session.fuel).map_err(ApiError::run)?, None),
    };
    let mut body = result_json(&program, &result)?;
    if let Some(seq) = resumed_from {
        body["resumed_from"] = json!(seq);
        body["catch_up_steps"] = json!(result.run.steps);
    }
    body["snapshot"] = json!(session.push(program, result));
    Ok(Json(body))
}

#[derive(Deserialize)]
struct FillReq {
    hole: String,
    source_fragment: String,
    #[serde(default)]
    verify: bool,
}

async fn fill_hole(State(app): State<Arc<AppState>>, Path(id): Path<String>, Json(req): Json<FillReq>) -> ApiResult {
    let shared = app.session(&id)?;
    let mut session = shared.lock().await;
    session.last_used = Instant::now();
    let fuel = session.fuel;
    let current = session.snapshots.front().ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "no program loaded"))?;
    let u = HoleName::new(req.hole);
    let filled = engine::fill_fragment(
        &current.program,
        &current.result.run.expr,
        &u,
        &req.source_fragment,
        fuel,
        &app.config.options,
    )
    .map_err(|e| match e {
        FragmentError::UnknownHole(u) => ApiError::new(StatusCode::CONFLICT, format!("no unfilled hole named `{u}`")),
        FragmentError::Rejected { diagnostics, expected, ctx } => {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "fragment does not fit the hole")
                .with("diagnostics", json!(diagnostics))
                .with("expected_type", json!(print_ty(&expected)))
                .with("expected_ctx", ctx_json(&ctx))
        }
        FragmentError::Run(e) => ApiError::run(e),
    })?;
    let from = current.seq;
    let mut body = result_json(&filled.program, &filled.evaluation)?;
    body["resumed_from"] = json!(from);
    body["catch_up_steps"] = json!(filled.evaluation.run.steps);
    if req.verify {
        let v = engine::verify(&filled.program.elab, &filled.evaluation.run, fuel).map_err(ApiError::run)?;
        body["verify"] = json!({
            "agree": v.agree,
            "guaranteed": v.guaranteed,
            "fresh_steps": v.fresh.steps,
            "fresh_outcome": v.fresh.outcome.as_str(),
        });
    }
    body["snapshot"] = json!(session.push(filled.program, filled.evaluation));
    Ok(Json(body))
}

async fn closure(
    State(app): State<Arc<AppState>>,
    Path((id, hole, instance)): Path<(String, String, String)>,
) -> ApiResult {
    let shared = app.session(&id)?;
    let mut session = shared.lock().await;
    session.last_used = Instant::now();
    let not_found = |m: String| ApiError::new(StatusCode::NOT_FOUND, m);
    let snap = session.snapshots.front().ok_or_else(|| not_found("no program loaded".into()))?;
    let instance: usize = instance.parse().map_err(|_| not_found(format!("bad instance `{instance}`")))?;
    let view = inspect(&snap.result.index, &HoleName::new(hole), instance, &snap.program.elab.holes)
        .map_err(|e| not_found(e.to_string()))?;
    Ok(Json(view_json(&view)))
}

#[derive(Deserialize)]
struct StepReq {
    n: usize,
}

async fn step(State(app): State<Arc<AppState>>, Path(id): Path<String>, Json(req): Json<StepReq>) -> ApiResult {
    let shared = app.session(&id)?;
    let mut session = shared.lock().await;
    session.last_used = Instant::now();
    let snap = session
        .snapshots
        .front()
        .ok_or_else(|| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "no program loaded"))?;
    let n = req.n.min(MAX_TRACE);
    let (trace, outcome) = engine::trace(&snap.program.elab.expr, n).map_err(|e| ApiError::run(e.into()))?;
    let trace: Vec<_> = trace
        .iter()
        .enumerate()
        .map(|(i, (rule, d))| json!({ "step": i + 1, "rule": rule.name(), "term_pretty": print_int(d) }))
        .collect();
    Ok(Json(json!({
        "initial_pretty": print_int(&snap.program.elab.expr),
        "trace": trace,
        "outcome": outcome.as_str(),
        "truncated": req.n > n,
    })))
}
