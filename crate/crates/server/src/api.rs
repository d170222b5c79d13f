//! HTTP/JSON API under `/api/v1`.
//!
//! Every handler resolves the caller from an optional `Authorization: Bearer`
//! header (no header means Guest), then delegates to the platform, which
//! applies the permission matrix. Errors are JSON objects of the form
//! `{"error": {"code", "message", "report"?}}`. Field names and status codes
//! are listed in `docs/api.md`.

use std::sync::{Arc, RwLock, RwLockReadGuard};

use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::extract::{FromRequest, FromRequestParts, State};
use axum::http::header::{AUTHORIZATION, CONTENT_TYPE, ETAG, IF_MATCH};
use axum::http::request::Parts;
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, patch, post, put};
use axum::{Json, Router};
use ideaforge_core::access::Action;
use ideaforge_core::collaboration::{Project, Task, TaskFields};
use ideaforge_core::feedback::{AggregateScore, CriterionMeans, RankFilter, Ranked};
use ideaforge_core::lifecycle::{ReviewOutcome, ValidationReport};
use ideaforge_core::platform::EntityKey;
use ideaforge_core::{
    CommentId, Error, ErrorKind, GroupId, Idea, IdeaEdits, IdeaId, NewIdea, NewUser, ProjectId, Scores, TaskId,
    UserAccount, UserId, Visibility,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::service::{Service, ServiceError, ServiceResult};
use crate::store::StoreError;

pub const SEARCH_LIMIT_DEFAULT: usize = 20;
pub const SEARCH_LIMIT_MAX: usize = 100;
pub const K_DEFAULT: usize = 5;
pub const LEADERBOARD_DEFAULT: usize = 10;

/// Shared handle to the service. Reads run concurrently; writes are
/// serialized and run off the async executor because they sync to disk.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<RwLock<Service>>,
}

impl AppState {
    pub fn new(service: Service) -> Self {
        AppState { inner: Arc::new(RwLock::new(service)) }
    }

    pub fn read(&self) -> RwLockReadGuard<'_, Service> {
        self.inner.read().unwrap_or_else(|e| e.into_inner())
    }

    /// Runs `f` with exclusive access on the blocking pool.
    pub async fn write<T, F>(&self, f: F) -> Result<T, ApiError>
    where
        T: Send + 'static,
        F: FnOnce(&mut Service) -> ServiceResult<T> + Send + 'static,
    {
        let inner = self.inner.clone();
        tokio::task::spawn_blocking(move || {
            let mut guard = inner.write().unwrap_or_else(|e| e.into_inner());
            f(&mut guard)
        })
        .await
        .map_err(|_| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", "write task failed"))?
        .map_err(ApiError::from)
    }
}

// -------------------------------------------------------------------------
// errors
// -------------------------------------------------------------------------

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
    report: Option<ValidationReport>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, code: code.to_owned(), message: message.into(), report: None }
    }

    fn malformed(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "MalformedRequest", message)
    }

    fn unauthorized() -> Self {
        ServiceError::InvalidSession.into()
    }

    pub fn status(&self) -> StatusCode {
        self.status
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e.kind() {
            ErrorKind::Forbidden => StatusCode::FORBIDDEN,
            ErrorKind::NotFound => StatusCode::NOT_FOUND,
            ErrorKind::Conflict => StatusCode::CONFLICT,
            ErrorKind::Unprocessable => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let report = match &e {
            Error::ValidationFailed(r) => Some(r.clone()),
            _ => None,
        };
        ApiError { status, code: e.code().to_owned(), message: e.to_string(), report }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let message = e.to_string();
        let (status, code) = match e {
            ServiceError::Domain(d) => return d.into(),
            ServiceError::Store(StoreError::Conflict { .. }) | ServiceError::VersionConflict { .. } => {
                (StatusCode::CONFLICT, "VersionConflict")
            }
            ServiceError::Store(_) => (StatusCode::INTERNAL_SERVER_ERROR, "StoreError"),
            ServiceError::Unauthenticated => (StatusCode::UNAUTHORIZED, "Unauthenticated"),
            ServiceError::InvalidSession => (StatusCode::UNAUTHORIZED, "InvalidSession"),
            ServiceError::BadCredentials => (StatusCode::UNAUTHORIZED, "BadCredentials"),
            ServiceError::WeakPassword => (StatusCode::UNPROCESSABLE_ENTITY, "WeakPassword"),
            ServiceError::Unavailable => (StatusCode::SERVICE_UNAVAILABLE, "Unavailable"),
        };
        ApiError::new(status, code, message)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::malformed(r.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(r: PathRejection) -> Self {
        ApiError::malformed(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::malformed(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut err = json!({ "code": self.code, "message": self.message });
        if let Some(report) = self.report {
            err["report"] = serde_json::to_value(report).expect("reports serialize");
        }
        (self.status, Json(json!({ "error": err }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

// -------------------------------------------------------------------------
// extractors
// -------------------------------------------------------------------------

#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(ApiError))]
pub struct Body<T>(pub T);

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Path), rejection(ApiError))]
pub struct PathParam<T>(pub T);

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Query), rejection(ApiError))]
pub struct QueryParam<T>(pub T);

/// The authenticated user, or `None` for a Guest. A header that is present
/// but invalid, expired or not a bearer token is rejected with 401.
pub struct Caller {
    pub user: Option<UserId>,
    pub token: Option<String>,
}

impl FromRequestParts<AppState> for Caller {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, Self::Rejection> {
        let Some(value) = parts.headers.get(AUTHORIZATION) else {
            return Ok(Caller { user: None, token: None });
        };
        let token = value
            .to_str()
            .ok()
            .and_then(|v| v.strip_prefix("Bearer "))
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .ok_or_else(ApiError::unauthorized)?;
        let user = state.read().authenticate(token)?;
        Ok(Caller { user: Some(user), token: Some(token.to_owned()) })
    }
}

/// Parses `If-Match: "<version>"`.
fn if_match(headers: &HeaderMap) -> ApiResult<Option<u64>> {
    let Some(v) = headers.get(IF_MATCH) else { return Ok(None) };
    let text = v.to_str().map_err(|_| ApiError::malformed("If-Match must be ASCII"))?;
    let text = text.trim().trim_start_matches("W/").trim_matches('"');
    text.parse().map(Some).map_err(|_| ApiError::malformed("If-Match must be a record version"))
}

// -------------------------------------------------------------------------
// views
// -------------------------------------------------------------------------

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Aggregate with every mean rounded to three decimals.
#[derive(Debug, Serialize)]
pub struct AggregateView {
    pub idea_id: IdeaId,
    pub rating_count: u64,
    pub per_criterion_mean: CriterionMeans,
    pub smoothed_score: f64,
}

impl From<&AggregateScore> for AggregateView {
    fn from(a: &AggregateScore) -> Self {
        let m = a.per_criterion_mean;
        AggregateView {
            idea_id: a.idea_id,
            rating_count: a.rating_count,
            per_criterion_mean: CriterionMeans {
                relevance: round3(m.relevance),
                feasibility: round3(m.feasibility),
                originality: round3(m.originality),
                impact: round3(m.impact),
            },
            smoothed_score: round3(a.smoothed_score),
        }
    }
}

#[derive(Serialize)]
struct RankedView {
    idea_id: IdeaId,
    aggregate: AggregateView,
}

impl From<&Ranked> for RankedView {
    fn from(r: &Ranked) -> Self {
        RankedView { idea_id: r.idea_id, aggregate: (&r.score).into() }
    }
}

#[derive(Serialize)]
struct Versioned<T> {
    #[serde(flatten)]
    entity: T,
    version: u64,
}

fn with_etag<T: Serialize>(status: StatusCode, entity: T, version: u64) -> Response {
    let mut resp = (status, Json(Versioned { entity, version })).into_response();
    resp.headers_mut().insert(ETAG, HeaderValue::from_str(&format!("\"{version}\"")).expect("digits"));
    resp
}

/// Accounts as seen by others omit the email address.
fn user_view(u: &UserAccount, show_email: bool) -> Value {
    let mut v = serde_json::to_value(u).expect("accounts serialize");
    if !show_email {
        v.as_object_mut().expect("object").remove("email");
    }
    v
}

fn json_lines<T: Serialize>(items: impl IntoIterator<Item = T>) -> Response {
    let body: String = items
        .into_iter()
        .map(|t| crate::store::canonical_json(&serde_json::to_value(t).expect("serializes")) + "\n")
        .collect();
    ([(CONTENT_TYPE, "application/x-ndjson")], body).into_response()
}

// -------------------------------------------------------------------------
// request bodies and queries
// -------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegisterBody {
    display_name: String,
    email: String,
    password: String,
    #[serde(default)]
    interest_tags: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LoginBody {
    email: String,
    password: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IdeaBody {
    title: String,
    body: String,
    #[serde(default)]
    tags: Vec<String>,
    #[serde(default)]
    visibility: Option<Visibility>,
    /// Save as a Draft instead of submitting for review.
    #[serde(default)]
    draft: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VisibilityBody {
    visibility: Visibility,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReviewBody {
    outcome: ReviewOutcome,
    #[serde(default)]
    reason: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RatingBody {
    relevance: i64,
    feasibility: i64,
    originality: i64,
    impact: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CommentBody {
    body: String,
    #[serde(default)]
    parent_comment_id: Option<CommentId>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectBody {
    idea_id: IdeaId,
    name: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OwnerBody {
    user_id: UserId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupBody {
    group_id: u8,
}

#[derive(Deserialize)]
struct SearchQuery {
    #[serde(default)]
    q: String,
    limit: Option<usize>,
}

#[derive(Deserialize)]
struct KQuery {
    k: Option<usize>,
}

#[derive(Deserialize)]
struct NQuery {
    n: Option<usize>,
}

#[derive(Deserialize)]
struct RankQuery {
    tag: Option<String>,
    visibility: Option<Visibility>,
}

// -------------------------------------------------------------------------
// sessions and users
// -------------------------------------------------------------------------

async fn login(State(st): State<AppState>, Body(b): Body<LoginBody>) -> ApiResult<Response> {
    // Hash outside the lock; it is the slow part.
    let cred = st.read().credential_for(&b.email);
    let user = match cred {
        Some(c) if c.verify(&b.password) => c.user_id,
        _ => return Err(ServiceError::BadCredentials.into()),
    };
    let (token, session) = st.write(move |s| s.open_session(user)).await?;
    let body = json!({ "token": token, "user_id": session.user_id, "expires_at": session.expires_at });
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn logout(State(st): State<AppState>, caller: Caller) -> ApiResult<StatusCode> {
    let token = caller.token.ok_or(ServiceError::Unauthenticated)?;
    st.write(move |s| s.logout(&token)).await?;
    Ok(StatusCode::NO_CONTENT)
}

async fn register(State(st): State<AppState>, _caller: Caller, Body(b): Body<RegisterBody>) -> ApiResult<Response> {
    let new = NewUser { display_name: b.display_name, email: b.email, interest_tags: b.interest_tags };
    let user = st.write(move |s| s.register(new, &b.password)).await?;
    Ok((StatusCode::CREATED, Json(user_view(&user, true))).into_response())
}

async fn get_user(State(st): State<AppState>, caller: Caller, PathParam(id): PathParam<UserId>) -> ApiResult<Json<Value>> {
    let svc = st.read();
    let p = svc.platform();
    let user = p.user(id)?;
    let who = p.principal(caller.user)?;
    let show = caller.user == Some(id) || p.matrix().allows(who.group, Action::ManageUsers);
    Ok(Json(user_view(user, show)))
}

async fn collaborators(
    State(st): State<AppState>,
    _caller: Caller,
    PathParam(id): PathParam<UserId>,
    QueryParam(q): QueryParam<KQuery>,
) -> ApiResult<Json<Value>> {
    let svc = st.read();
    let s = svc.platform().suggest_collaborators(id, q.k.unwrap_or(K_DEFAULT))?;
    Ok(Json(json!(s)))
}

async fn admin_users(State(st): State<AppState>, caller: Caller) -> ApiResult<Json<Vec<UserAccount>>> {
    Ok(Json(st.read().platform().list_users(caller.user)?))
}

async fn set_group(
    State(st): State<AppState>,
    caller: Caller,
    PathParam(id): PathParam<UserId>,
    Body(b): Body<GroupBody>,
) -> ApiResult<Json<UserAccount>> {
    let group = GroupId::new(b.group_id).map_err(|_| Error::InvalidInput(format!("no group {}", b.group_id)))?;
    Ok(Json(st.write(move |s| s.mutate(|p| p.set_user_group(caller.user, id, group))).await?))
}

// -------------------------------------------------------------------------
// ideas
// -------------------------------------------------------------------------

async fn create_idea(State(st): State<AppState>, caller: Caller, Body(b): Body<IdeaBody>) -> ApiResult<Response> {
    let new = NewIdea { title: b.title, body: b.body, tags: b.tags, visibility: b.visibility };
    let (idea, v) = st
        .write(move |s| {
            let idea = s.mutate(|p| if b.draft { p.save_draft(caller.user, new) } else { p.submit_idea(caller.user, new) })?;
            let v = s.version_of(EntityKey::Idea(idea.idea_id));
            Ok((idea, v))
        })
        .await?;
    Ok(with_etag(StatusCode::CREATED, idea, v))
}

#[derive(Serialize)]
struct IdeaDetail<'a> {
    #[serde(flatten)]
    idea: &'a Idea,
    aggregate: AggregateView,
    comment_count: usize,
}

async fn get_idea(State(st): State<AppState>, caller: Caller, PathParam(id): PathParam<IdeaId>) -> ApiResult<Response> {
    let svc = st.read();
    let p = svc.platform();
    let idea = p.get_idea(caller.user, id)?;
    let detail = IdeaDetail { idea, aggregate: (&p.aggregate(id)?).into(), comment_count: p.comment_count(id) };
    Ok(with_etag(StatusCode::OK, detail, svc.version_of(EntityKey::Idea(id))))
}

async fn idea_write(
    st: AppState,
    id: IdeaId,
    expected: Option<u64>,
    op: impl FnOnce(&mut ideaforge_core::Platform) -> ideaforge_core::Result<Idea> + Send + 'static,
) -> ApiResult<Response> {
    let (idea, v) = st
        .write(move |s| {
            s.expect_version(EntityKey::Idea(id), expected)?;
            let idea = s.mutate(op)?;
            Ok((idea, s.version_of(EntityKey::Idea(id))))
        })
        .await?;
    Ok(with_etag(StatusCode::OK, idea, v))
}

async fn resubmit(
    State(st): State<AppState>,
    caller: Caller,
    headers: HeaderMap,
    PathParam(id): PathParam<IdeaId>,
    Body(edits): Body<IdeaEdits>,
) -> ApiResult<Response> {
    let expected = if_match(&headers)?;
    idea_write(st, id, expected, move |p| p.resubmit_idea(caller.user, id, edits)).await
}

async fn set_visibility(
    State(st): State<AppState>,
    caller: Caller,
    headers: HeaderMap,
    PathParam(id): PathParam<IdeaId>,
    Body(b): Body<VisibilityBody>,
) -> ApiResult<Response> {
    let expected = if_match(&headers)?;
    idea_write(st, id, expected, move |p| p.set_visibility(caller.user, id, b.visibility)).await
}

async fn rank(State(st): State<AppState>, caller: Caller, QueryParam(q): QueryParam<RankQuery>) -> ApiResult<Json<Value>> {
    let tag = q.tag.as_deref().map(ideaforge_core::normalize_tag).transpose()?;
    let filter = RankFilter { tag, visibility: q.visibility };
    let ranked = st.read().platform().rank_ideas(caller.user, &filter)?;
    Ok(Json(json!(ranked.iter().map(RankedView::from).collect::<Vec<_>>())))
}

async fn best(State(st): State<AppState>, caller: Caller) -> ApiResult<Response> {
    match st.read().platform().best_idea(caller.user)? {
        Some(r) => Ok(Json(RankedView::from(&r)).into_response()),
        None => Ok(StatusCode::NO_CONTENT.into_response()),
    }
}

async fn search(State(st): State<AppState>, caller: Caller, QueryParam(q): QueryParam<SearchQuery>) -> ApiResult<Json<Value>> {
    let limit = q.limit.unwrap_or(SEARCH_LIMIT_DEFAULT).min(SEARCH_LIMIT_MAX);
    let hits = st.read().platform().search(caller.user, &q.q, limit)?;
    Ok(Json(json!(hits)))
}

async fn similar(
    State(st): State<AppState>,
    caller: Caller,
    PathParam(id): PathParam<IdeaId>,
    QueryParam(q): QueryParam<KQuery>,
) -> ApiResult<Json<Value>> {
    let s = st.read().platform().similar_ideas(caller.user, id, q.k.unwrap_or(K_DEFAULT))?;
    Ok(Json(json!(s)))
}

// -------------------------------------------------------------------------
// moderation, ratings, comments
// -------------------------------------------------------------------------

async fn queue(State(st): State<AppState>, caller: Caller) -> ApiResult<Json<Vec<Idea>>> {
    Ok(Json(st.read().platform().moderation_queue(caller.user)?))
}

async fn review(
    State(st): State<AppState>,
    caller: Caller,
    headers: HeaderMap,
    PathParam(id): PathParam<IdeaId>,
    Body(b): Body<ReviewBody>,
) -> ApiResult<Json<Value>> {
    let expected = if_match(&headers)?;
    let decision = st
        .write(move |s| {
            s.expect_version(EntityKey::Idea(id), expected)?;
            s.mutate(|p| p.review_idea(caller.user, id, b.outcome, b.reason))
        })
        .await?;
    Ok(Json(json!(decision)))
}

async fn rate(
    State(st): State<AppState>,
    caller: Caller,
    PathParam(id): PathParam<IdeaId>,
    Body(b): Body<RatingBody>,
) -> ApiResult<Json<Value>> {
    let (rating, aggregate) = st
        .write(move |s| {
            let scores = Scores::new(b.relevance, b.feasibility, b.originality, b.impact)?;
            let rating = s.mutate(|p| p.rate_idea(caller.user, id, scores))?;
            Ok((rating, s.platform().aggregate(id)?))
        })
        .await?;
    Ok(Json(json!({ "rating": rating, "aggregate": AggregateView::from(&aggregate) })))
}

async fn add_comment(
    State(st): State<AppState>,
    caller: Caller,
    PathParam(id): PathParam<IdeaId>,
    Body(b): Body<CommentBody>,
) -> ApiResult<Response> {
    let c = st.write(move |s| s.mutate(|p| p.comment_on_idea(caller.user, id, b.body, b.parent_comment_id))).await?;
    Ok((StatusCode::CREATED, Json(c)).into_response())
}

async fn list_comments(State(st): State<AppState>, caller: Caller, PathParam(id): PathParam<IdeaId>) -> ApiResult<Json<Value>> {
    Ok(Json(json!(st.read().platform().comments_for(caller.user, id)?)))
}

// -------------------------------------------------------------------------
// projects and tasks
// -------------------------------------------------------------------------

async fn create_project(State(st): State<AppState>, caller: Caller, Body(b): Body<ProjectBody>) -> ApiResult<Response> {
    let p = st.write(move |s| s.mutate(|p| p.create_project(caller.user, b.idea_id, &b.name))).await?;
    Ok((StatusCode::CREATED, Json(p)).into_response())
}

async fn get_project(State(st): State<AppState>, caller: Caller, PathParam(id): PathParam<ProjectId>) -> ApiResult<Json<Project>> {
    Ok(Json(st.read().platform().project(caller.user, id)?.clone()))
}

async fn join(State(st): State<AppState>, caller: Caller, PathParam(id): PathParam<ProjectId>) -> ApiResult<Json<Project>> {
    Ok(Json(st.write(move |s| s.mutate(|p| p.join_project(caller.user, id))).await?))
}

async fn leave(
    State(st): State<AppState>,
    caller: Caller,
    PathParam((id, uid)): PathParam<(ProjectId, UserId)>,
) -> ApiResult<Json<Project>> {
    Ok(Json(st.write(move |s| s.mutate(|p| p.leave_project(caller.user, id, uid))).await?))
}

async fn transfer(
    State(st): State<AppState>,
    caller: Caller,
    PathParam(id): PathParam<ProjectId>,
    Body(b): Body<OwnerBody>,
) -> ApiResult<Json<Project>> {
    Ok(Json(st.write(move |s| s.mutate(|p| p.transfer_project(caller.user, id, b.user_id))).await?))
}

async fn task_write(
    st: AppState,
    expected: Option<u64>,
    existing: Option<TaskId>,
    op: impl FnOnce(&mut ideaforge_core::Platform) -> ideaforge_core::Result<Task> + Send + 'static,
) -> ApiResult<(Task, u64)> {
    st.write(move |s| {
        if let Some(t) = existing {
            s.expect_version(EntityKey::Task(t), expected)?;
        }
        let task = s.mutate(op)?;
        let v = s.version_of(EntityKey::Task(task.task_id));
        Ok((task, v))
    })
    .await
}

async fn create_task(
    State(st): State<AppState>,
    caller: Caller,
    PathParam(id): PathParam<ProjectId>,
    Body(fields): Body<TaskFields>,
) -> ApiResult<Response> {
    let (task, v) = task_write(st, None, None, move |p| p.upsert_task(caller.user, id, None, fields)).await?;
    Ok(with_etag(StatusCode::CREATED, task, v))
}

async fn update_task(
    State(st): State<AppState>,
    caller: Caller,
    headers: HeaderMap,
    PathParam(id): PathParam<TaskId>,
    Body(fields): Body<TaskFields>,
) -> ApiResult<Response> {
    let expected = if_match(&headers)?;
    let project = st.read().platform().board().task(id)?.project_id;
    let (task, v) =
        task_write(st, expected, Some(id), move |p| p.upsert_task(caller.user, project, Some(id), fields)).await?;
    Ok(with_etag(StatusCode::OK, task, v))
}

async fn progress(State(st): State<AppState>, caller: Caller, PathParam(id): PathParam<ProjectId>) -> ApiResult<Json<Value>> {
    let progress = st.read().platform().project_progress(caller.user, id)?;
    Ok(Json(json!({ "project_id": id, "progress": progress })))
}

async fn tasks_export(State(st): State<AppState>, caller: Caller, PathParam(id): PathParam<ProjectId>) -> ApiResult<Response> {
    Ok(json_lines(st.read().platform().project_tasks(caller.user, id)?))
}

// -------------------------------------------------------------------------
// incentives
// -------------------------------------------------------------------------

async fn leaderboard(State(st): State<AppState>, _caller: Caller, QueryParam(q): QueryParam<NQuery>) -> ApiResult<Json<Value>> {
    Ok(Json(json!(st.read().platform().leaderboard(q.n.unwrap_or(LEADERBOARD_DEFAULT))?)))
}

async fn ledger_export(State(st): State<AppState>, caller: Caller) -> ApiResult<Response> {
    let svc = st.read();
    let p = svc.platform();
    let who = p.principal(caller.user)?;
    if !p.matrix().allows(who.group, Action::AccessAdminPanel) {
        return Err(Error::PermissionDenied("the ledger export is an administration panel feature".into()).into());
    }
    Ok(json_lines(p.ledger().events()))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "NoSuchRoute", "no such route")
}

/// Every route, nested under `/api/v1`.
pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/sessions", post(login))
        .route("/sessions/current", delete(logout))
        .route("/users", post(register))
        .route("/users/{id}", get(get_user))
        .route("/users/{id}/collaborators", get(collaborators))
        .route("/ideas", post(create_idea).get(rank))
        .route("/ideas/search", get(search))
        .route("/ideas/best", get(best))
        .route("/ideas/{id}", get(get_idea))
        .route("/ideas/{id}/resubmit", post(resubmit))
        .route("/ideas/{id}/visibility", patch(set_visibility))
        .route("/ideas/{id}/similar", get(similar))
        .route("/ideas/{id}/review", post(review))
        .route("/ideas/{id}/ratings/mine", put(rate))
        .route("/ideas/{id}/comments", post(add_comment).get(list_comments))
        .route("/moderation/queue", get(queue))
        .route("/projects", post(create_project))
        .route("/projects/{id}", get(get_project))
        .route("/projects/{id}/members", post(join))
        .route("/projects/{id}/members/{uid}", delete(leave))
        .route("/projects/{id}/owner", post(transfer))
        .route("/projects/{id}/tasks", post(create_task))
        .route("/projects/{id}/progress", get(progress))
        .route("/projects/{id}/tasks.export", get(tasks_export))
        .route("/tasks/{id}", put(update_task))
        .route("/leaderboard", get(leaderboard))
        .route("/ledger.export", get(ledger_export))
        .route("/admin/users", get(admin_users))
        .route("/admin/users/{id}/group", patch(set_group));
    Router::new().nest("/api/v1", api).fallback(not_found).with_state(state)
}
