//! HTTP/JSON session service over `glc-core`.
//!
//! A session owns one uploaded dataset plus everything derived from it by
//! logged edits: the current model, hyperblock sets by tag and the last
//! worst-case split. Requests to one session run one at a time; distinct
//! sessions run concurrently. Responses carry the same JSON documents the
//! `glc` command line writes.

mod error;
mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::Router;
use glc_core::geometry::{render_svg, separate_hyperblocks};
use glc_core::hyperblock::Rect;
use glc_core::pipeline::{
    parse_models, parse_order, prepare, to_json, view_scene, BlockSpec, DatasetSummary, FitDocument, FitSpec,
    Preprocess, SeparationDocument, ViewMode,
};
use glc_core::validation::{CvTable, FoldPlan};
use glc_core::worst_case::{WorstCaseSplit, DEFAULT_CAP};
use glc_core::{load_csv, GlcModel, LabelColumn};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::sync::{Mutex, OwnedMutexGuard, RwLock};

pub use error::{ApiError, ApiResult};
pub use session::{replay_log, LogEntry, Session, SessionState, Snapshot, IRL_TAG};

pub const DEFAULT_SVG_SIZE: (u32, u32) = (800, 600);

#[derive(Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

type Shared = Arc<AppState>;

impl AppState {
    async fn insert(&self, dataset: glc_core::Dataset) -> Arc<Mutex<Session>> {
        let id = format!("s{:08x}", self.next_id.fetch_add(1, Ordering::Relaxed) + 1);
        let s = Arc::new(Mutex::new(Session::new(id.clone(), dataset)));
        self.sessions.write().await.insert(id, s.clone());
        s
    }

    async fn lock(&self, id: &str) -> ApiResult<OwnedMutexGuard<Session>> {
        let s = self
            .sessions
            .read()
            .await
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::no_session(id))?;
        Ok(s.lock_owned().await)
    }
}

pub fn router() -> Router {
    router_with(Arc::new(AppState::default()))
}

pub fn router_with(state: Shared) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/restore", post(restore_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/model", get(get_model))
        .route("/sessions/{id}/model/fit", post(fit_model))
        .route("/sessions/{id}/model/threshold", patch(set_threshold))
        .route("/sessions/{id}/model/angles", patch(set_angle))
        .route("/sessions/{id}/scene", get(get_scene))
        .route("/sessions/{id}/rules/selection", post(select_rule))
        .route("/sessions/{id}/blocks", post(induce_blocks))
        .route("/sessions/{id}/separate", post(separate))
        .route("/sessions/{id}/worstcase", post(worst_case))
        .route("/sessions/{id}/worstcase/manual", post(worst_case_manual))
        .route("/sessions/{id}/report/worstcase", get(get_worst_case))
        .route("/sessions/{id}/crossval", post(cross_validate))
        .route("/sessions/{id}/export/svg", get(export_svg))
        .route("/sessions/{id}/export/rules", get(export_rules))
        .route("/sessions/{id}/export/report", get(export_report))
        .route("/sessions/{id}/log", get(get_log))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/replay", post(replay))
        .route("/sessions/{id}/snapshot", get(snapshot))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "route_not_found", "no such route") })
        .with_state(state)
}

/// Serves the API on `addr` until the process ends.
pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router()).await
}

fn json(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    let body: &[u8] = if body.iter().all(u8::is_ascii_whitespace) { b"{}" } else { body };
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

/// Runs CPU-bound work off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))
}

fn require_model(s: &Session) -> ApiResult<()> {
    if s.state.fitted.is_none() {
        return Err(ApiError::precondition("no_model", "fit a model first"));
    }
    Ok(())
}

async fn edit(state: &AppState, id: &str, entry: LogEntry, needs_model: bool) -> ApiResult<Response> {
    let mut s = state.lock(id).await?;
    if needs_model {
        require_model(&s)?;
    }
    let body = blocking(move || s.edit(entry)).await??;
    Ok(json(body))
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct CreateQuery {
    label_col: Option<String>,
    name: Option<String>,
    positive: Option<String>,
    super_name: Option<String>,
    squares: bool,
    pca: Option<usize>,
}

#[derive(Serialize)]
struct Created {
    id: String,
    dataset: DatasetSummary,
}

async fn create_session(State(st): State<Shared>, Query(q): Query<CreateQuery>, body: Bytes) -> ApiResult<Response> {
    let dataset = blocking(move || -> glc_core::Result<_> {
        let label = LabelColumn::parse(q.label_col.as_deref().unwrap_or("class"));
        let raw = load_csv(&body[..], &label)?.with_name(q.name.unwrap_or_else(|| "upload".into()));
        let mut p = Preprocess {
            positive_class: q.positive,
            squares: q.squares,
            pca_components: q.pca,
            ..Default::default()
        };
        if let Some(n) = q.super_name {
            p.super_class_name = n;
        }
        prepare(&raw, &p)
    })
    .await??;
    let summary = DatasetSummary::of(&dataset);
    let s = st.insert(dataset).await;
    let id = s.lock().await.id.clone();
    let body = to_json(&Created { id, dataset: summary })?;
    Ok((StatusCode::CREATED, json(body)).into_response())
}

async fn restore_session(State(st): State<Shared>, body: Bytes) -> ApiResult<Response> {
    let snap: Snapshot = parse(&body)?;
    let (dataset, log) = (snap.dataset, snap.log);
    let (dataset, log, state) = blocking(move || {
        let state = replay_log(&dataset, &log);
        (dataset, log, state)
    })
    .await?;
    let state = state?;
    let s = st.insert(dataset).await;
    let mut g = s.lock().await;
    g.state = state;
    g.log = log;
    let body = to_json(&summary(&g))?;
    Ok((StatusCode::CREATED, json(body)).into_response())
}

#[derive(Serialize)]
struct SessionSummary {
    id: String,
    dataset: DatasetSummary,
    model: Option<GlcModel>,
    block_tags: Vec<String>,
    split: Option<WorstCaseSplit>,
    log_len: usize,
}

fn summary(s: &Session) -> SessionSummary {
    SessionSummary {
        id: s.id.clone(),
        dataset: DatasetSummary::of(&s.dataset),
        model: s.state.fitted.as_ref().map(|f| f.model.clone()),
        block_tags: s.state.blocks.keys().cloned().collect(),
        split: s.state.split.clone(),
        log_len: s.log.len(),
    }
}

async fn get_session(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = st.lock(&id).await?;
    Ok(json(to_json(&summary(&s))?))
}

async fn delete_session(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    match st.sessions.write().await.remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT.into_response()),
        None => Err(ApiError::no_session(&id)),
    }
}

async fn get_model(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = st.lock(&id).await?;
    require_model(&s)?;
    let doc: FitDocument = s.state.fitted()?.document(&s.dataset)?;
    Ok(json(to_json(&doc)?))
}

async fn fit_model(State(st): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let spec: FitSpec = parse(&body)?;
    edit(&st, &id, LogEntry::Fit(spec), false).await
}

#[derive(Deserialize)]
struct ThresholdBody {
    t: f64,
}

async fn set_threshold(State(st): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let b: ThresholdBody = parse(&body)?;
    if !b.t.is_finite() {
        return Err(ApiError::bad_request("t must be finite"));
    }
    edit(&st, &id, LogEntry::Threshold { t: b.t }, true).await
}

#[derive(Deserialize)]
struct AngleBody {
    index: usize,
    degrees: f64,
}

async fn set_angle(State(st): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let b: AngleBody = parse(&body)?;
    edit(&st, &id, LogEntry::Angle { index: b.index, degrees: b.degrees }, true).await
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct SceneQuery {
    mode: Option<String>,
    order: Option<String>,
}

async fn get_scene(State(st): State<Shared>, Path(id): Path<String>, Query(q): Query<SceneQuery>) -> ApiResult<Response> {
    let s = st.lock(&id).await?;
    let mode: ViewMode = q.mode.as_deref().unwrap_or("glcl").parse()?;
    if mode == ViewMode::Glcl {
        require_model(&s)?;
    }
    let order = q.order.as_deref().map(parse_order).transpose()?;
    let body = blocking(move || {
        let bounds = s.state.split.as_ref().map(|sp| (sp.lower, sp.upper));
        view_scene(&s.dataset, s.state.fitted.as_ref(), mode, order, bounds).and_then(|sc| to_json(&sc))
    })
    .await??;
    Ok(json(body))
}

#[derive(Deserialize)]
struct SelectionBody {
    rect: Rect,
}

async fn select_rule(State(st): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let b: SelectionBody = parse(&body)?;
    edit(&st, &id, LogEntry::Selection { rect: b.rect }, true).await
}

async fn induce_blocks(State(st): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let spec: BlockSpec = parse(&body)?;
    edit(&st, &id, LogEntry::Blocks(spec), false).await
}

#[derive(Deserialize)]
struct BlockRef {
    tag: String,
    /// 1-based position in the tag's block list.
    block: usize,
}

#[derive(Deserialize)]
struct SeparateBody {
    first: BlockRef,
    second: BlockRef,
}

async fn separate(State(st): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let b: SeparateBody = parse(&body)?;
    let s = st.lock(&id).await?;
    require_model(&s)?;
    let pick = |r: &BlockRef| {
        s.state
            .blocks
            .get(&r.tag)
            .and_then(|list| list.get(r.block.wrapping_sub(1)))
            .cloned()
            .ok_or_else(|| ApiError::bad_request(format!("no block {} under tag {:?}", r.block, r.tag)))
    };
    let (first, second) = (pick(&b.first)?, pick(&b.second)?);
    let body = blocking(move || -> glc_core::Result<String> {
        let f = s.state.fitted()?;
        let (transform, scene) = separate_hyperblocks(&first, &second, &f.model, f.space(&s.dataset))?;
        to_json(&SeparationDocument { transform, scene })
    })
    .await??;
    Ok(json(body))
}

#[derive(Deserialize)]
struct CapBody {
    #[serde(default = "default_cap")]
    cap: f64,
}

fn default_cap() -> f64 {
    DEFAULT_CAP
}

async fn worst_case(State(st): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let b: CapBody = parse(&body)?;
    edit(&st, &id, LogEntry::Worstcase { cap: b.cap }, true).await
}

#[derive(Deserialize)]
struct ManualBody {
    indices: Vec<usize>,
}

async fn worst_case_manual(State(st): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let b: ManualBody = parse(&body)?;
    edit(&st, &id, LogEntry::ManualSplit { indices: b.indices }, true).await
}

async fn get_worst_case(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = st.lock(&id).await?;
    let doc = s
        .state
        .worst_case_document()
        .ok_or_else(|| ApiError::precondition("no_split", "run a worst-case split first"))?;
    Ok(json(to_json(&doc)?))
}

#[derive(Deserialize)]
#[serde(default)]
struct CrossvalBody {
    model: String,
    k: usize,
    seed: u64,
    stratified: bool,
}

impl Default for CrossvalBody {
    fn default() -> Self {
        CrossvalBody {
            model: "all".into(),
            k: 10,
            seed: 0,
            stratified: true,
        }
    }
}

async fn cross_validate(State(st): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let b: CrossvalBody = parse(&body)?;
    let specs = parse_models(&b.model)?;
    let s = st.lock(&id).await?;
    let body = blocking(move || -> glc_core::Result<String> {
        let plan = FoldPlan::new(&s.dataset, b.k, b.seed, b.stratified)?;
        to_json(&CvTable::run(&s.dataset, &specs, &plan)?)
    })
    .await??;
    Ok(json(body))
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct SvgQuery {
    width: Option<u32>,
    height: Option<u32>,
    mode: Option<String>,
    order: Option<String>,
}

async fn export_svg(State(st): State<Shared>, Path(id): Path<String>, Query(q): Query<SvgQuery>) -> ApiResult<Response> {
    let s = st.lock(&id).await?;
    let mode: ViewMode = q.mode.as_deref().unwrap_or("glcl").parse()?;
    if mode == ViewMode::Glcl {
        require_model(&s)?;
    }
    let order = q.order.as_deref().map(parse_order).transpose()?;
    let (w, h) = (q.width.unwrap_or(DEFAULT_SVG_SIZE.0), q.height.unwrap_or(DEFAULT_SVG_SIZE.1));
    let svg = blocking(move || {
        let bounds = s.state.split.as_ref().map(|sp| (sp.lower, sp.upper));
        view_scene(&s.dataset, s.state.fitted.as_ref(), mode, order, bounds).map(|sc| render_svg(&sc, w, h))
    })
    .await??;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct RulesQuery {
    tag: Option<String>,
}

async fn export_rules(State(st): State<Shared>, Path(id): Path<String>, Query(q): Query<RulesQuery>) -> ApiResult<Response> {
    let s = st.lock(&id).await?;
    let tag = q
        .tag
        .map(|t| t.to_ascii_uppercase())
        .or_else(|| s.state.last_tag.clone())
        .ok_or_else(|| ApiError::precondition("no_rules", "no rules have been built"))?;
    let doc = s
        .state
        .rules_document(&tag, &s.dataset)
        .ok_or_else(|| ApiError::precondition("no_rules", format!("no rules under tag {tag:?}")))?;
    Ok(json(to_json(&doc)?))
}

#[derive(Serialize)]
struct SessionReport {
    fit: Option<FitDocument>,
    worst_case: Option<glc_core::pipeline::WorstCaseDocument>,
    rules: Vec<glc_core::pipeline::RulesDocument>,
}

async fn export_report(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = st.lock(&id).await?;
    let body = blocking(move || -> glc_core::Result<String> {
        let fit = s.state.fitted.as_ref().map(|f| f.document(&s.dataset)).transpose()?;
        let rules = s
            .state
            .blocks
            .keys()
            .filter_map(|t| s.state.rules_document(t, &s.dataset))
            .collect();
        to_json(&SessionReport {
            fit,
            worst_case: s.state.worst_case_document(),
            rules,
        })
    })
    .await??;
    Ok(json(body))
}

async fn get_log(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = st.lock(&id).await?;
    Ok(json(to_json(&s.log)?))
}

#[derive(Serialize)]
struct UndoResult {
    undone: Option<LogEntry>,
    log_len: usize,
}

async fn undo(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let mut s = st.lock(&id).await?;
    let (undone, log_len) = blocking(move || s.undo().map(|u| (u, s.log.len()))).await??;
    Ok(json(to_json(&UndoResult { undone, log_len })?))
}

#[derive(Serialize)]
struct ReplayResult {
    consistent: bool,
    log_len: usize,
}

/// Replays the log from the dataset and reports whether it reproduces the
/// current state.
async fn replay(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = st.lock(&id).await?;
    let r = blocking(move || -> glc_core::Result<ReplayResult> {
        let state = replay_log(&s.dataset, &s.log)?;
        Ok(ReplayResult {
            consistent: state == s.state,
            log_len: s.log.len(),
        })
    })
    .await??;
    Ok(json(to_json(&r)?))
}

async fn snapshot(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let s = st.lock(&id).await?;
    let snap = Snapshot {
        dataset: s.dataset.clone(),
        log: s.log.clone(),
    };
    Ok(json(to_json(&snap)?))
}
