//! REST facade over a [`Repository`]. Every mutating endpoint requires an
//! `Authorization: Bearer <token>` header and stamps provenance from the
//! token's account; reads are open.

pub mod auth;
pub mod error;
pub mod ratelimit;
pub mod wire;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use axum::body::Bytes;
use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use smartreview::article::{Column, PaperSpec};
use smartreview::rdf::{ExportOptions, RdfFormat};
use smartreview::repository::{ExportScope, Repository};
use smartreview::sparql;
use smartreview::uri::UriMapping;
use smartreview::versioning::{VersionRef, VersionSummary};
use smartreview::{EntityId, EntityKind, NewEntity, Provenance};

use error::{ApiError, ApiResult};
use ratelimit::Limiter;
use wire::*;

#[derive(Clone)]
pub struct AppState {
    repo: Arc<RwLock<Repository>>,
    uris: Arc<UriMapping>,
    limiter: Option<Arc<Limiter>>,
}

impl AppState {
    pub fn new(repo: Repository) -> Self {
        Self {
            repo: Arc::new(RwLock::new(repo)),
            uris: Arc::new(UriMapping::default()),
            limiter: None,
        }
    }

    /// Caps each account at `per_minute` mutating requests.
    pub fn with_rate_limit(mut self, per_minute: u32) -> Self {
        self.limiter = Some(Arc::new(Limiter::per_minute(per_minute)));
        self
    }

    pub fn read(&self) -> ApiResult<RwLockReadGuard<'_, Repository>> {
        self.repo
            .read()
            .map_err(|_| ApiError::Internal("repository lock poisoned".into()))
    }

    pub fn write(&self) -> ApiResult<RwLockWriteGuard<'_, Repository>> {
        self.repo
            .write()
            .map_err(|_| ApiError::Internal("repository lock poisoned".into()))
    }
}

/// The authenticated caller, as provenance for the statements it writes.
pub struct Caller(pub Provenance);

impl FromRequestParts<AppState> for Caller {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> ApiResult<Self> {
        let token = parts
            .headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(auth::bearer)
            .ok_or(ApiError::Unauthorized)?;
        let user = auth::authenticate(&state.read()?.store, token).ok_or(ApiError::Unauthorized)?;
        if state.limiter.as_ref().is_some_and(|l| !l.admit(&user)) {
            return Err(ApiError::TooManyRequests);
        }
        Ok(Caller(Provenance::now(user)))
    }
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::BadRequest(format!("invalid request body: {e}")))
}

fn resource(key: &str) -> ApiResult<EntityId> {
    id_of(EntityKind::Resource, key)
}

fn version_ref(text: &str) -> ApiResult<VersionRef> {
    text.parse().map_err(ApiError::BadRequest)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/accounts", post(create_account))
        .route("/articles", get(list_articles).post(create_article))
        .route("/articles/{id}", get(get_article).patch(update_article))
        .route("/articles/{id}/sections", post(add_section))
        .route("/articles/{id}/sections/order", put(reorder_sections))
        .route(
            "/sections/{id}",
            get(get_section).patch(update_section).delete(delete_section),
        )
        .route("/papers", post(create_paper))
        .route("/papers/{id}", get(get_paper))
        .route("/comparisons", post(create_comparison))
        .route("/comparisons/{id}", get(get_comparison))
        .route("/comparisons/{id}/cells", patch(set_cells))
        .route("/visualizations", post(create_visualization))
        .route("/visualizations/{id}", get(get_visualization))
        .route("/articles/{id}/publish", post(publish))
        .route("/articles/{id}/versions", get(list_versions))
        .route("/articles/{id}/diff", get(diff))
        .route("/articles/{id}/html", get(article_html))
        .route("/articles/{id}/rdf", get(article_rdf))
        .route("/articles/{id}/versions/{version}/rdf", get(version_rdf))
        .route("/rdf/dump", get(rdf_dump))
        .route("/sparql", get(sparql_get).post(sparql_post))
        .route("/entities", get(suggest_entities).post(create_entity))
        .with_state(state)
}

/// Serves until Ctrl-C. `rate_limit` caps mutations per account per minute.
pub async fn serve(repo: Repository, addr: SocketAddr, rate_limit: Option<u32>) -> std::io::Result<()> {
    let mut state = AppState::new(repo);
    if let Some(n) = rate_limit {
        state = state.with_rate_limit(n);
    }
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

// ---- accounts --------------------------------------------------------------

async fn create_account(State(state): State<AppState>, bytes: Bytes) -> ApiResult<(StatusCode, Json<AccountOut>)> {
    let req: NewAccount = body(&bytes)?;
    let (account, token) = auth::register(&mut state.write()?.store, &req.display_name)?;
    Ok((
        StatusCode::CREATED,
        Json(AccountOut {
            user_id: account.user_id,
            display_name: account.display_name,
            token,
        }),
    ))
}

// ---- articles and sections -------------------------------------------------

fn article_out(repo: &Repository, id: &EntityId) -> ApiResult<ArticleOut> {
    let article = repo.store.article(id)?;
    let contributors = repo.acknowledgements(id, VersionRef::Head)?;
    Ok(ArticleOut::new(&repo.store, &article, contributors))
}

async fn list_articles(State(state): State<AppState>) -> ApiResult<Json<Vec<ArticleSummary>>> {
    let repo = state.read()?;
    let mut out = Vec::new();
    for id in repo.store.articles() {
        out.push(ArticleSummary {
            title: repo.store.article(&id)?.title,
            id: id.key,
        });
    }
    Ok(Json(out))
}

async fn create_article(
    Caller(prov): Caller,
    State(state): State<AppState>,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<ArticleOut>)> {
    let req: NewArticle = body(&bytes)?;
    let field = resource(&req.research_field)?;
    let mut repo = state.write()?;
    let article = repo.store.create_article(&req.title, &field, &prov)?;
    Ok((StatusCode::CREATED, Json(article_out(&repo, &article.id)?)))
}

async fn get_article(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<ArticleOut>> {
    let repo = state.read()?;
    Ok(Json(article_out(&repo, &resource(&id)?)?))
}

async fn update_article(
    Caller(prov): Caller,
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<Json<ArticleOut>> {
    let req: ArticlePatch = body(&bytes)?;
    let id = resource(&id)?;
    let field = req.research_field.as_deref().map(resource).transpose()?;
    let mut repo = state.write()?;
    repo.store
        .update_article(&id, req.title.as_deref(), field.as_ref(), &prov)?;
    Ok(Json(article_out(&repo, &id)?))
}

async fn add_section(
    Caller(prov): Caller,
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<SectionOut>)> {
    let req: NewSection = body(&bytes)?;
    let article = resource(&id)?;
    let mut repo = state.write()?;
    let position = match req.position {
        Some(p) => p,
        None => repo.store.article(&article)?.sections.len(),
    };
    let section_body = req.body.resolve(&repo.store)?;
    let section = repo
        .store
        .add_section(&article, position, &req.heading, section_body, &prov)?;
    Ok((StatusCode::CREATED, Json(SectionOut::new(&repo.store, &section))))
}

async fn reorder_sections(
    Caller(prov): Caller,
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<Json<ArticleOut>> {
    let req: SectionOrder = body(&bytes)?;
    let article = resource(&id)?;
    let order: Vec<EntityId> = req.order.iter().map(|k| resource(k)).collect::<Result<_, _>>()?;
    let mut repo = state.write()?;
    repo.store.reorder_sections(&article, &order, &prov)?;
    Ok(Json(article_out(&repo, &article)?))
}

async fn get_section(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SectionOut>> {
    let repo = state.read()?;
    let section = repo.store.section(&resource(&id)?)?;
    Ok(Json(SectionOut::new(&repo.store, &section)))
}

async fn update_section(
    Caller(prov): Caller,
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<Json<ArticleOut>> {
    let req: SectionPatch = body(&bytes)?;
    let section = resource(&id)?;
    let mut repo = state.write()?;
    let section_body = req.body.map(|b| b.resolve(&repo.store)).transpose()?;
    let article = repo
        .store
        .update_section(&section, req.heading.as_deref(), section_body, &prov)?;
    Ok(Json(article_out(&repo, &article.id)?))
}

async fn delete_section(
    Caller(prov): Caller,
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<ArticleOut>> {
    let section = resource(&id)?;
    let mut repo = state.write()?;
    let article = repo.store.delete_section(&section, &prov)?;
    Ok(Json(article_out(&repo, &article.id)?))
}

// ---- papers, comparisons, visualizations -----------------------------------

async fn create_paper(
    Caller(prov): Caller,
    State(state): State<AppState>,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<PaperOut>)> {
    let req: NewPaper = body(&bytes)?;
    let spec = PaperSpec {
        key: None,
        title: req.title,
        authors: req.authors,
        publication_date: req.publication_date,
    };
    let paper = state.write()?.store.create_paper(spec, &prov)?;
    Ok((StatusCode::CREATED, Json(paper.into())))
}

async fn get_paper(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<PaperOut>> {
    Ok(Json(state.read()?.store.paper(&resource(&id)?)?.into()))
}

async fn create_comparison(
    Caller(prov): Caller,
    State(state): State<AppState>,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<ComparisonOut>)> {
    let req: NewComparison = body(&bytes)?;
    let properties: Vec<EntityId> = req
        .properties
        .iter()
        .map(|p| id_of(EntityKind::Predicate, p))
        .collect::<Result<_, _>>()?;
    let cells: Vec<_> = req.cells.into_iter().map(CellIn::resolve).collect::<Result<_, _>>()?;
    let mut repo = state.write()?;
    let mut columns = Vec::new();
    for col in &req.columns {
        let paper = resource(&col.paper)?;
        let contribution = match &col.contribution {
            Some(c) => resource(c)?,
            None => repo
                .store
                .paper(&paper)?
                .contributions
                .first()
                .cloned()
                .ok_or_else(|| ApiError::BadRequest(format!("paper {} has no contribution", paper.key)))?,
        };
        columns.push(Column { paper, contribution });
    }
    let comparison = repo
        .store
        .create_comparison(&req.title, &columns, &properties, &cells, &prov)?;
    Ok((StatusCode::CREATED, Json(ComparisonOut::new(&repo.store, &comparison))))
}

async fn get_comparison(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<ComparisonOut>> {
    let repo = state.read()?;
    let comparison = repo.store.comparison(&resource(&id)?)?;
    Ok(Json(ComparisonOut::new(&repo.store, &comparison)))
}

/// Sets one cell or a list of cells; each cell is its own write.
async fn set_cells(
    Caller(prov): Caller,
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<Json<ComparisonOut>> {
    let req: CellsIn = body(&bytes)?;
    let comparison = resource(&id)?;
    let cells: Vec<_> = req
        .into_vec()
        .into_iter()
        .map(CellIn::resolve)
        .collect::<Result<_, _>>()?;
    let mut repo = state.write()?;
    let mut current = repo.store.comparison(&comparison)?;
    for cell in cells {
        current = repo
            .store
            .set_cell(&comparison, &cell.contribution, &cell.property, &cell.values, &prov)?;
    }
    Ok(Json(ComparisonOut::new(&repo.store, &current)))
}

async fn create_visualization(
    Caller(prov): Caller,
    State(state): State<AppState>,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<VisualizationOut>)> {
    let req: NewVisualization = body(&bytes)?;
    let comparison = resource(&req.comparison)?;
    let property = id_of(EntityKind::Predicate, &req.series_property)?;
    let viz = state
        .write()?
        .store
        .create_visualization(&comparison, req.chart_kind, &property, &req.label, &prov)?;
    Ok((StatusCode::CREATED, Json(viz.into())))
}

async fn get_visualization(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<VisualizationOut>> {
    Ok(Json(state.read()?.store.visualization(&resource(&id)?)?.into()))
}

// ---- entities --------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct SuggestParams {
    kind: Option<String>,
    q: Option<String>,
}

async fn suggest_entities(
    State(state): State<AppState>,
    Query(params): Query<SuggestParams>,
) -> ApiResult<Json<Vec<EntityRef>>> {
    let kind: EntityKind = params
        .kind
        .as_deref()
        .unwrap_or("resource")
        .parse()
        .map_err(ApiError::BadRequest)?;
    let repo = state.read()?;
    let found = repo
        .store
        .suggest_entities(kind, params.q.as_deref().unwrap_or(""))
        .into_iter()
        .map(|e| EntityRef::of(&repo.store, &e.id))
        .collect();
    Ok(Json(found))
}

async fn create_entity(
    Caller(prov): Caller,
    State(state): State<AppState>,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<EntityRef>)> {
    let req: NewEntityIn = body(&bytes)?;
    let spec = match req.kind {
        EntityKind::Resource => NewEntity::resource(req.label),
        EntityKind::Predicate => NewEntity::predicate(req.label),
        other => return Err(ApiError::BadRequest(format!("cannot create a {other} here"))),
    };
    let mut repo = state.write()?;
    let id = repo.store.create_entity(spec, &prov)?;
    if let Some(description) = &req.description {
        repo.store.set_description(&id, description, &prov)?;
    }
    if let Some(uri) = &req.same_as {
        repo.store.set_same_as(&id, uri, &prov)?;
    }
    Ok((StatusCode::CREATED, Json(EntityRef::of(&repo.store, &id))))
}

// ---- versions --------------------------------------------------------------

async fn publish(
    Caller(prov): Caller,
    State(state): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<VersionSummary>)> {
    let req: NewVersion = body(&bytes)?;
    let article = resource(&id)?;
    let version = state.write()?.publish(&article, &req.description, &prov)?;
    Ok((StatusCode::CREATED, Json(version.summary())))
}

async fn list_versions(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Vec<VersionSummary>>> {
    Ok(Json(state.read()?.list_versions(&resource(&id)?)?))
}

#[derive(Debug, Deserialize)]
struct DiffParams {
    from: String,
    to: Option<String>,
}

async fn diff(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Query<DiffParams>,
) -> ApiResult<Json<DiffOut>> {
    let article = resource(&id)?;
    let from = version_ref(&params.from)?;
    let to = params
        .to
        .as_deref()
        .map(version_ref)
        .transpose()?
        .unwrap_or(VersionRef::Head);
    let repo = state.read()?;
    let d = repo.diff(&article, from, to)?;
    Ok(Json(DiffOut::new(&repo.store, d)))
}

// ---- documents -------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
struct DocParams {
    version: Option<String>,
    format: Option<String>,
    #[serde(default)]
    provenance: bool,
}

impl DocParams {
    fn version(&self) -> ApiResult<VersionRef> {
        Ok(match &self.version {
            Some(v) => version_ref(v)?,
            None => VersionRef::Head,
        })
    }

    fn options(&self, uris: &UriMapping) -> ApiResult<ExportOptions> {
        let format = match &self.format {
            Some(f) => f.parse().map_err(ApiError::BadRequest)?,
            None => RdfFormat::NTriples,
        };
        Ok(ExportOptions {
            format,
            provenance: self.provenance,
            uris: uris.clone(),
        })
    }
}

fn rdf_response(doc: String, format: RdfFormat) -> Response {
    ([(header::CONTENT_TYPE, format.media_type())], doc).into_response()
}

async fn article_html(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Query<DocParams>,
) -> ApiResult<Response> {
    let rendered = state.read()?.render(&resource(&id)?, params.version()?)?;
    Ok(([(header::CONTENT_TYPE, "text/html; charset=utf-8")], rendered.html).into_response())
}

async fn article_rdf(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Query<DocParams>,
) -> ApiResult<Response> {
    let article = resource(&id)?;
    let scope = match params.version()? {
        VersionRef::Head => ExportScope::Article(article),
        VersionRef::Version(n) => ExportScope::Version(article, n),
    };
    export(&state, &scope, &params)
}

async fn version_rdf(
    State(state): State<AppState>,
    Path((id, version)): Path<(String, String)>,
    Query(params): Query<DocParams>,
) -> ApiResult<Response> {
    let article = resource(&id)?;
    let scope = match version_ref(&version)? {
        VersionRef::Head => ExportScope::Article(article),
        VersionRef::Version(n) => ExportScope::Version(article, n),
    };
    export(&state, &scope, &params)
}

async fn rdf_dump(State(state): State<AppState>, Query(params): Query<DocParams>) -> ApiResult<Response> {
    export(&state, &ExportScope::Full, &params)
}

fn export(state: &AppState, scope: &ExportScope, params: &DocParams) -> ApiResult<Response> {
    let options = params.options(&state.uris)?;
    let repo = state.read()?;
    if let ExportScope::Article(id) = scope {
        // Unknown article ids are 404, not an empty document.
        repo.store.article(id)?;
    }
    let doc = repo.export(scope, &options)?;
    Ok(rdf_response(doc, options.format))
}

// ---- SPARQL ----------------------------------------------------------------

fn wants_csv(headers: &HeaderMap) -> bool {
    headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|accept| accept.split(',').any(|m| m.trim().starts_with("text/csv")))
}

fn run_query(state: &AppState, text: &str, headers: &HeaderMap) -> ApiResult<Response> {
    let repo = state.read()?;
    let table = sparql::query(text, &repo.store, &state.uris)?;
    Ok(if wants_csv(headers) {
        (
            [(header::CONTENT_TYPE, "text/csv; charset=utf-8")],
            sparql::to_csv(&table, &state.uris),
        )
            .into_response()
    } else {
        (
            [(header::CONTENT_TYPE, "application/sparql-results+json")],
            sparql::to_json(&table, &state.uris).to_string(),
        )
            .into_response()
    })
}

async fn sparql_post(State(state): State<AppState>, headers: HeaderMap, bytes: Bytes) -> ApiResult<Response> {
    let text = std::str::from_utf8(&bytes).map_err(|_| ApiError::BadRequest("query is not UTF-8".into()))?;
    run_query(&state, text, &headers)
}

async fn sparql_get(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Response> {
    let text = params
        .get("query")
        .ok_or_else(|| ApiError::BadRequest("missing `query` parameter".into()))?;
    run_query(&state, text, &headers)
}
