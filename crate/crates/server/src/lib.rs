//! Read-only HTTP API over an analyzed tweet store.
//!
//! Every handler turns its query string into [`Params`] and renders with the
//! same body functions the CLI uses, so both produce identical JSON.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use tecvis_core::query::{self, AggregateQuery, CompareQuery, Params, QueryError, TweetsQuery};
use tecvis_core::Store;
use tower_http::cors::{AllowOrigin, CorsLayer};

/// The loaded store, or `None` while nothing has been ingested yet.
pub type AppState = Option<Arc<Store>>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ServerConfig {
    /// Allowed CORS origin. `None` allows any origin.
    pub cors_origin: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("invalid CORS origin {0:?}")]
    BadOrigin(String),
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        let status = match e {
            QueryError::UnknownGroup(_) => StatusCode::NOT_FOUND,
            QueryError::BadQuery(_) | QueryError::SameGroup(_) | QueryError::AxisMismatch(_) => {
                StatusCode::BAD_REQUEST
            }
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({
            "status": self.status.as_u16(),
            "code": self.code,
            "message": self.message,
        });
        (
            self.status,
            json_response(tecvis_core::canonical::to_canonical_json(&body)),
        )
            .into_response()
    }
}

fn json_response(body: String) -> Response {
    (
        [(
            header::CONTENT_TYPE,
            HeaderValue::from_static("application/json"),
        )],
        body,
    )
        .into_response()
}

type PairsQuery = Result<Query<Vec<(String, String)>>, QueryRejection>;

fn loaded(state: &AppState) -> Result<&Store, ApiError> {
    state.as_deref().ok_or_else(|| {
        ApiError::new(
            StatusCode::SERVICE_UNAVAILABLE,
            "store_not_loaded",
            "no tweet store is loaded",
        )
    })
}

fn params(q: PairsQuery) -> Result<Params, ApiError> {
    let Query(pairs) =
        q.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_query", e.body_text()))?;
    Ok(Params::new(pairs)?)
}

async fn meta(State(state): State<AppState>, q: PairsQuery) -> Result<Response, ApiError> {
    let store = loaded(&state)?;
    if !params(q)?.is_empty() {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "bad_query",
            "meta takes no parameters",
        ));
    }
    Ok(json_response(query::meta_body(store)))
}

async fn aggregate(State(state): State<AppState>, q: PairsQuery) -> Result<Response, ApiError> {
    let store = loaded(&state)?;
    let parsed = AggregateQuery::parse(&params(q)?)?;
    Ok(json_response(query::aggregate_body(store, &parsed)))
}

async fn compare(State(state): State<AppState>, q: PairsQuery) -> Result<Response, ApiError> {
    let store = loaded(&state)?;
    let parsed = CompareQuery::parse(&params(q)?)?;
    Ok(json_response(query::compare_body(store, &parsed)?))
}

async fn tweets(State(state): State<AppState>, q: PairsQuery) -> Result<Response, ApiError> {
    let store = loaded(&state)?;
    let parsed = TweetsQuery::parse(&params(q)?)?;
    Ok(json_response(query::tweets_body(store, &parsed)?))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

fn cors_layer(config: &ServerConfig) -> Result<CorsLayer, ServeError> {
    let origin = match &config.cors_origin {
        None => AllowOrigin::any(),
        Some(o) if o == "*" => AllowOrigin::any(),
        Some(o) => AllowOrigin::exact(
            HeaderValue::from_str(o).map_err(|_| ServeError::BadOrigin(o.clone()))?,
        ),
    };
    Ok(CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([axum::http::Method::GET]))
}

pub fn build_app(state: AppState, config: &ServerConfig) -> Result<Router, ServeError> {
    Ok(Router::new()
        .route("/api/meta", get(meta))
        .route("/api/aggregate", get(aggregate))
        .route("/api/compare", get(compare))
        .route("/api/tweets", get(tweets))
        .fallback(not_found)
        .layer(cors_layer(config)?)
        .with_state(state))
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, app: Router) -> Result<(), ServeError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServeError::Bind { addr, source })?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
