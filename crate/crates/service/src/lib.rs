//! HTTP JSON API over an [`SdsStore`].
//!
//! Reads run against the current immutable store; mutations are serialized
//! through one writer that builds the next store, snapshots it and swaps it
//! in. Carts and generated cover sheets live in memory.
//!
//! | Method | Path | Body | Response |
//! |---|---|---|---|
//! | `POST` | `/sds` | SDS JSON or plain text | `IngestReport` (201, 200, 422) |
//! | `GET` | `/sds?filter=&limit=` | | ranked `CatalogEntry` list |
//! | `GET` | `/quarantine` | | quarantined records with reports |
//! | `POST` | `/carts` | | `CartSession` (201) |
//! | `GET` | `/carts/{id}` | | `CartSession` |
//! | `PUT` | `/carts/{id}/items` | `{"add": id}` or `{"remove": id}` | `CartSession` |
//! | `POST` | `/carts/{id}/coversheet` | `{productName, hgenList?, latestOnly?}` | `CoverSheet` |
//! | `GET` | `/coversheets/{id}?format=json\|md\|html` | | rendered sheet |
//! | `GET` | `/compounds/{id}/hazards?lang=` | | query solutions |
//! | `GET` | `/network?cart=` | | node-link `Network` |
//! | `GET` | `/hgen-lists` | | available general hazard lists |
//! | `GET` | `/health` | | `{status, sdsCount}` |

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use sdskg::coversheet::{
    build_cover_sheet, export_network, render, BuildOptions, CoverSheet, GeneralHazardList, HgenError, Network,
    ProductSelection, RenderFormat,
};
use sdskg::graph::term::is_language_tag;
use sdskg::graph::Solutions;
use sdskg::graph::vocab::SDS_INSTANCE_NS;
use sdskg::store::{CatalogEntry, IngestReport, IngestStatus, QuarantineEntry, SdsStore, StoreConfig, StoreError};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;
use tower_http::trace::TraceLayer;

mod carts;
pub mod config;
mod error;
pub mod ranking;

pub use carts::{CartSession, Carts};
pub use config::{ServiceConfig, SECRET_HEADER};
pub use error::{ApiError, ErrorBody};
pub use ranking::{rank_catalog, MatchRank};

/// Name of the built-in general hazard list used when a request names none.
pub const DEFAULT_HGEN: &str = "ghs-rev10";

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Hgen {
        path: PathBuf,
        #[source]
        source: HgenError,
    },
    #[error("{path}: general hazard list {label:?} is defined twice")]
    DuplicateHgen { path: PathBuf, label: String },
}

struct Inner {
    store: RwLock<Arc<SdsStore>>,
    writer: tokio::sync::Mutex<()>,
    carts: Mutex<Carts>,
    sheets: Mutex<HashMap<String, (Instant, CoverSheet)>>,
    hgen: BTreeMap<String, GeneralHazardList>,
    data_dir: Option<PathBuf>,
    secret: Option<String>,
    ttl: std::time::Duration,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

/// Built-in lists plus every `*.txt` list in `dir`, keyed by header label.
pub fn load_hgen_lists(dir: Option<&Path>) -> Result<BTreeMap<String, GeneralHazardList>, ServiceError> {
    let mut lists = BTreeMap::from([(DEFAULT_HGEN.to_string(), GeneralHazardList::ghs_rev10())]);
    let Some(dir) = dir else { return Ok(lists) };
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ServiceError::Io { path, source }
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    paths.sort();
    for path in paths {
        let text = std::fs::read_to_string(&path).map_err(io(&path))?;
        let list = GeneralHazardList::parse(&text).map_err(|source| ServiceError::Hgen {
            path: path.clone(),
            source,
        })?;
        if lists.contains_key(&list.label) {
            return Err(ServiceError::DuplicateHgen {
                path,
                label: list.label,
            });
        }
        lists.insert(list.label.clone(), list);
    }
    Ok(lists)
}

impl AppState {
    pub fn new(store: SdsStore, config: &ServiceConfig) -> Result<Self, ServiceError> {
        Ok(AppState(Arc::new(Inner {
            store: RwLock::new(Arc::new(store)),
            writer: tokio::sync::Mutex::new(()),
            carts: Mutex::new(Carts::new(config.cart_ttl)),
            sheets: Mutex::new(HashMap::new()),
            hgen: load_hgen_lists(config.hgen_dir.as_deref())?,
            data_dir: config.data_dir.clone(),
            secret: config.shared_secret.clone(),
            ttl: config.cart_ttl,
        })))
    }

    /// Restores the store from the configured data directory (empty when
    /// there is no snapshot yet). A corrupt snapshot is an error.
    pub fn open(config: &ServiceConfig, store_config: StoreConfig) -> Result<Self, ServiceError> {
        let store = match &config.data_dir {
            Some(dir) => SdsStore::open(dir, store_config)?,
            None => SdsStore::new(store_config),
        };
        Self::new(store, config)
    }

    /// The current store; later writes do not affect the returned value.
    pub fn store(&self) -> Arc<SdsStore> {
        self.0.store.read().expect("store lock").clone()
    }

    pub fn hgen_lists(&self) -> &BTreeMap<String, GeneralHazardList> {
        &self.0.hgen
    }
}

/// API routes, plus static files from `static_dir` for everything else.
pub fn router(state: AppState, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/sds", post(post_sds).get(get_sds))
        .route("/quarantine", get(get_quarantine))
        .route("/carts", post(post_cart))
        .route("/carts/{id}", get(get_cart))
        .route("/carts/{id}/items", put(put_cart_items))
        .route("/carts/{id}/coversheet", post(post_coversheet))
        .route("/coversheets/{id}", get(get_coversheet))
        .route("/compounds/{id}/hazards", get(get_compound_hazards))
        .route("/network", get(get_network))
        .route("/hgen-lists", get(get_hgen_lists))
        .route("/health", get(get_health))
        .route_layer(middleware::from_fn_with_state(state.clone(), require_secret))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(TraceLayer::new_for_http())
}

/// Runs the service until Ctrl-C.
pub async fn serve(config: ServiceConfig, store_config: StoreConfig) -> Result<(), ServiceError> {
    let state = AppState::open(&config, store_config)?;
    let app = router(state, config.static_dir.as_deref());
    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .map_err(|source| ServiceError::Io {
            path: PathBuf::from(config.listen.to_string()),
            source,
        })?;
    tracing::info!(address = %config.listen, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|source| ServiceError::Io {
            path: PathBuf::from(config.listen.to_string()),
            source,
        })
}

async fn require_secret(State(state): State<AppState>, request: Request, next: Next) -> Response {
    if let Some(secret) = &state.0.secret {
        let given = request.headers().get(SECRET_HEADER).and_then(|v| v.to_str().ok());
        if given != Some(secret.as_str()) {
            return ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", format!("missing or wrong {SECRET_HEADER} header"))
                .into_response();
        }
    }
    next.run(request).await
}

fn json_body<T>(body: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    body.map(|Json(v)| v).map_err(|e| ApiError::bad_request(e.body_text()))
}

async fn post_sds(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Result<Response, ApiError> {
    let content_type = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("application/json")
        .to_ascii_lowercase();
    let is_text = if content_type.starts_with("application/json") {
        false
    } else if content_type.starts_with("text/plain") {
        true
    } else {
        return Err(ApiError::new(
            StatusCode::UNSUPPORTED_MEDIA_TYPE,
            "unsupported-media-type",
            format!("expected application/json or text/plain, got {content_type:?}"),
        ));
    };
    let text = String::from_utf8(body.to_vec()).map_err(|_| ApiError::bad_request("body is not UTF-8"))?;

    let _writer = state.0.writer.lock().await;
    let current = state.store();
    let data_dir = state.0.data_dir.clone();
    let (next, report) = tokio::task::spawn_blocking(move || -> Result<_, ApiError> {
        let mut next = (*current).clone();
        let report = if is_text { next.ingest_text(&text)? } else { next.ingest_json(&text)? };
        if report.status != IngestStatus::Unchanged {
            if let Some(dir) = &data_dir {
                next.snapshot(dir).map_err(|e| ApiError::internal(e.to_string()))?;
            }
        }
        Ok((next, report))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    if report.status != IngestStatus::Unchanged {
        *state.0.store.write().expect("store lock") = Arc::new(next);
    }
    let status = match report.status {
        IngestStatus::Created => StatusCode::CREATED,
        IngestStatus::Unchanged => StatusCode::OK,
        IngestStatus::Quarantined => StatusCode::UNPROCESSABLE_ENTITY,
    };
    Ok((status, Json::<IngestReport>(report)).into_response())
}

#[derive(Debug, Deserialize)]
struct CatalogParams {
    #[serde(default)]
    filter: String,
    limit: Option<usize>,
}

async fn get_sds(State(state): State<AppState>, Query(p): Query<CatalogParams>) -> Json<Vec<CatalogEntry>> {
    Json(rank_catalog(state.store().catalog(), &p.filter, p.limit))
}

async fn get_quarantine(State(state): State<AppState>) -> Json<Vec<QuarantineEntry>> {
    Json(state.store().quarantine().cloned().collect())
}

async fn post_cart(State(state): State<AppState>) -> (StatusCode, Json<CartSession>) {
    let cart = state.0.carts.lock().expect("cart lock").create(Instant::now());
    (StatusCode::CREATED, Json(cart))
}

fn with_cart<T>(state: &AppState, id: &str, f: impl FnOnce(&mut CartSession) -> Result<T, ApiError>) -> Result<T, ApiError> {
    let mut carts = state.0.carts.lock().expect("cart lock");
    let cart = carts
        .get_mut(id, Instant::now())
        .ok_or_else(|| ApiError::not_found(format!("unknown cart {id}")))?;
    f(cart)
}

async fn get_cart(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<CartSession>, ApiError> {
    with_cart(&state, &id, |c| Ok(Json(c.clone())))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
enum CartChange {
    Add(String),
    Remove(String),
}

async fn put_cart_items(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<CartChange>, JsonRejection>,
) -> Result<Json<CartSession>, ApiError> {
    let change = json_body(body)?;
    let store = state.store();
    with_cart(&state, &id, |cart| {
        match change {
            CartChange::Add(sds) => {
                if store.record(&sds).is_none() {
                    return Err(ApiError::conflict(format!("unknown SDS id {sds}")));
                }
                cart.add(&sds);
            }
            CartChange::Remove(sds) => {
                cart.remove(&sds);
            }
        }
        Ok(Json(cart.clone()))
    })
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CoverSheetRequest {
    product_name: String,
    hgen_list: Option<String>,
    #[serde(default)]
    latest_only: bool,
}

async fn post_coversheet(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<CoverSheetRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let req = json_body(body)?;
    if req.product_name.trim().is_empty() {
        return Err(ApiError::bad_request("productName must be non-empty"));
    }
    let items = with_cart(&state, &id, |c| Ok(c.items.clone()))?;
    if items.is_empty() {
        return Err(ApiError::conflict(format!("cart {id} is empty")));
    }
    let hgen_name = req.hgen_list.as_deref().unwrap_or(DEFAULT_HGEN);
    let hgen = state
        .0
        .hgen
        .get(hgen_name)
        .ok_or_else(|| ApiError::not_found(format!("unknown general hazard list {hgen_name:?}")))?;
    let selection = ProductSelection::new(req.product_name.trim(), items)?;
    let options = BuildOptions {
        latest_only: req.latest_only,
        generated_at: None,
    };
    let sheet = build_cover_sheet(&selection, &state.store(), hgen, &options)?;

    let sheet_id = uuid::Uuid::new_v4().simple().to_string();
    {
        let now = Instant::now();
        let mut sheets = state.0.sheets.lock().expect("sheet lock");
        let ttl = state.0.ttl;
        sheets.retain(|_, (t, _)| now.duration_since(*t) < ttl);
        sheets.insert(sheet_id.clone(), (now, sheet.clone()));
    }
    let location = format!("/coversheets/{sheet_id}");
    let link = format!("<{location}?format=md>; rel=\"alternate\"; type=\"text/markdown\", <{location}?format=html>; rel=\"alternate\"; type=\"text/html\"");
    let mut response = Json(sheet).into_response();
    let headers = response.headers_mut();
    headers.insert(header::LOCATION, HeaderValue::from_str(&location).expect("ascii"));
    headers.insert(header::LINK, HeaderValue::from_str(&link).expect("ascii"));
    Ok(response)
}

#[derive(Debug, Deserialize)]
struct FormatParams {
    format: Option<String>,
}

async fn get_coversheet(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(p): Query<FormatParams>,
) -> Result<Response, ApiError> {
    let format: RenderFormat = p.format.as_deref().unwrap_or("json").parse().map_err(ApiError::bad_request)?;
    let sheets = state.0.sheets.lock().expect("sheet lock");
    let (_, sheet) = sheets
        .get(&id)
        .ok_or_else(|| ApiError::not_found(format!("unknown cover sheet {id}")))?;
    Ok(([(header::CONTENT_TYPE, format.media_type())], render(sheet, format)).into_response())
}

/// Compound IRI from a path segment: a full IRI, or the local name under
/// the SDS instance namespace.
pub fn compound_iri_from_segment(segment: &str) -> String {
    if segment.contains("://") {
        segment.to_string()
    } else {
        format!("{SDS_INSTANCE_NS}compound/{segment}")
    }
}

#[derive(Debug, Deserialize)]
struct LangParams {
    lang: Option<String>,
}

async fn get_compound_hazards(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(p): Query<LangParams>,
) -> Result<Json<Solutions>, ApiError> {
    let lang = p.lang.unwrap_or_else(|| "en".into());
    if !is_language_tag(&lang) {
        return Err(ApiError::bad_request(format!("{lang:?} is not a language tag")));
    }
    let compound = compound_iri_from_segment(&id);
    let store = state.store();
    if !store.has_compound(&compound) {
        return Err(ApiError::not_found(format!("unknown compound {compound}")));
    }
    store
        .compound_hazards(&compound, &lang)
        .map(Json)
        .map_err(|e| ApiError::internal(e.to_string()))
}

#[derive(Debug, Deserialize)]
struct NetworkParams {
    cart: String,
}

async fn get_network(
    State(state): State<AppState>,
    Query(p): Query<NetworkParams>,
) -> Result<Json<Network>, ApiError> {
    let items = with_cart(&state, &p.cart, |c| Ok(c.items.clone()))?;
    if items.is_empty() {
        return Err(ApiError::conflict(format!("cart {} is empty", p.cart)));
    }
    let selection = ProductSelection::new("network", items)?;
    Ok(Json(export_network(&selection, &state.store())?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HgenListInfo {
    pub name: String,
    pub code_count: usize,
    pub default: bool,
}

async fn get_hgen_lists(State(state): State<AppState>) -> Json<Vec<HgenListInfo>> {
    Json(
        state
            .0
            .hgen
            .iter()
            .map(|(name, list)| HgenListInfo {
                name: name.clone(),
                code_count: list.codes.len(),
                default: name == DEFAULT_HGEN,
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Health {
    pub status: String,
    pub sds_count: usize,
}

async fn get_health(State(state): State<AppState>) -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        sds_count: state.store().len(),
    })
}
