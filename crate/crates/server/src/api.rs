use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use csn_core::exports::{export_csv, render_view, ViewState};
use csn_core::filters::{filtered_histograms, HistogramSet, RangeFilter};
use csn_core::query::QueryError;
use csn_core::selection::FilterState;

use crate::error::ApiError;
use crate::state::{AppState, Dataset};

const PLACEHOLDER: &str = "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>csn</title></head>\
<body><h1>csn</h1><p>No web client is installed. The API lives under <a href=\"/api/datasets\">/api/datasets</a>.</p></body></html>\n";

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/api/datasets", get(list_datasets))
        .route("/api/datasets/{id}/manifest", get(manifest))
        .route("/api/datasets/{id}/points/{projection}", get(points))
        .route("/api/datasets/{id}/columns/{dimension}", get(column))
        .route("/api/datasets/{id}/atlas/{page}", get(atlas_page))
        .route("/api/datasets/{id}/metadata", get(metadata))
        .route("/api/datasets/{id}/filter", post(filter))
        .route("/api/datasets/{id}/export/{format}", post(export));
    let app = match &state.ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER) })),
    };
    app.with_state(state)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub id: String,
    pub name: String,
    pub object_count: usize,
    pub projections: Vec<String>,
    pub dimensions: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
struct FormatParam {
    format: Option<String>,
}

impl FormatParam {
    fn json(&self) -> Result<bool, ApiError> {
        match self.format.as_deref() {
            None | Some("binary") => Ok(false),
            Some("json") => Ok(true),
            Some(other) => Err(ApiError::BadRequest(format!("unknown format `{other}`"))),
        }
    }
}

fn dataset(state: &AppState, id: &str) -> Result<Arc<Dataset>, ApiError> {
    state
        .dataset(id)
        .cloned()
        .ok_or_else(|| ApiError::NotFound(format!("unknown dataset `{id}`")))
}

fn bytes_response(content_type: &'static str, body: Vec<u8>) -> Response {
    (
        [
            (header::CONTENT_TYPE, HeaderValue::from_static(content_type)),
            (header::CACHE_CONTROL, HeaderValue::from_static("public, max-age=3600")),
        ],
        body,
    )
        .into_response()
}

fn f32_le(values: &[f32]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

async fn list_datasets(State(state): State<AppState>) -> Json<Vec<DatasetSummary>> {
    Json(
        state
            .datasets
            .iter()
            .map(|(id, d)| {
                let m = &d.bundle.manifest;
                DatasetSummary {
                    id: id.clone(),
                    name: m.name.clone(),
                    object_count: m.object_count,
                    projections: m.projections.iter().map(|p| p.name.clone()).collect(),
                    dimensions: m.dimensions.iter().map(|d| d.name.clone()).collect(),
                }
            })
            .collect(),
    )
}

async fn manifest(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let d = dataset(&state, &id)?;
    Ok(bytes_response("application/json", d.bundle.manifest.to_json().into_bytes()))
}

async fn points(
    State(state): State<AppState>,
    Path((id, name)): Path<(String, String)>,
    Query(fmt): Query<FormatParam>,
) -> Result<Response, ApiError> {
    let d = dataset(&state, &id)?;
    let p = d
        .bundle
        .projection(&name)
        .ok_or_else(|| ApiError::NotFound(format!("unknown projection `{name}`")))?;
    if fmt.json()? {
        let rows: Vec<&[f32]> = p.coords().chunks(p.dims()).collect();
        let body = serde_json::to_vec(&rows).map_err(|e| ApiError::Internal(e.to_string()))?;
        return Ok(bytes_response("application/json", body));
    }
    Ok(bytes_response("application/octet-stream", f32_le(p.coords())))
}

async fn column(
    State(state): State<AppState>,
    Path((id, name)): Path<(String, String)>,
    Query(fmt): Query<FormatParam>,
) -> Result<Response, ApiError> {
    let d = dataset(&state, &id)?;
    let c = d
        .bundle
        .column(&name)
        .ok_or_else(|| ApiError::BadRequest(format!("unknown dimension `{name}`")))?;
    if fmt.json()? {
        // NaN has no JSON form; missing values go out as null.
        let values: Vec<Option<f32>> = c.values.iter().map(|v| (!v.is_nan()).then_some(*v)).collect();
        let body = serde_json::to_vec(&values).map_err(|e| ApiError::Internal(e.to_string()))?;
        return Ok(bytes_response("application/json", body));
    }
    Ok(bytes_response("application/octet-stream", f32_le(&c.values)))
}

/// Accepts `3`, `page_3` and `page_3.png`.
fn page_number(s: &str) -> Option<usize> {
    let s = s.strip_suffix(".png").unwrap_or(s);
    let s = s.strip_prefix("page_").unwrap_or(s);
    s.parse().ok()
}

async fn atlas_page(
    State(state): State<AppState>,
    Path((id, page)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let d = dataset(&state, &id)?;
    let bytes = page_number(&page)
        .map(|k| d.bundle.atlas_page_bytes(k))
        .transpose()?
        .flatten()
        .ok_or_else(|| ApiError::NotFound(format!("no atlas page `{page}`")))?;
    Ok(bytes_response("image/png", bytes))
}

async fn metadata(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(fmt): Query<FormatParam>,
) -> Result<Response, ApiError> {
    let d = dataset(&state, &id)?;
    let table = &d.bundle.metadata;
    if fmt.json()? {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = (0..table.len())
            .map(|i| {
                table
                    .row(i)
                    .map(|(k, v)| (k.to_string(), serde_json::Value::from(v)))
                    .collect()
            })
            .collect();
        let body = serde_json::to_vec(&rows).map_err(|e| ApiError::Internal(e.to_string()))?;
        return Ok(bytes_response("application/json", body));
    }
    let mut body = Vec::new();
    table
        .write_to(&mut body)
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(bytes_response("text/csv; charset=utf-8", body))
}

/// A query problem as sent to clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryErrorBody {
    pub message: String,
    /// Character offset of a syntax error.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unknown_fields: Vec<String>,
}

impl From<&QueryError> for QueryErrorBody {
    fn from(e: &QueryError) -> Self {
        match e {
            QueryError::Parse(p) => QueryErrorBody {
                message: e.to_string(),
                position: Some(p.position),
                unknown_fields: Vec::new(),
            },
            QueryError::UnknownFields { unknown, .. } => QueryErrorBody {
                message: e.to_string(),
                position: None,
                unknown_fields: unknown.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterResponse {
    /// Alternating run lengths, beginning with a run of non-passing objects.
    pub mask: Vec<u32>,
    pub pass_count: usize,
    pub histograms: HistogramSet,
    pub query_errors: Vec<QueryErrorBody>,
}

fn parse_json<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(format!("invalid request body: {e}")))
}

async fn filter(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<FilterResponse>, ApiError> {
    let d = dataset(&state, &id)?;
    let request: FilterState = parse_json(&body)?;
    let sel = d.select(&request)?;
    Ok(Json(FilterResponse {
        mask: sel.mask.to_rle(),
        pass_count: sel.mask.pass_count(),
        histograms: filtered_histograms(&d.bundle.columns, &sel.mask),
        query_errors: sel.query_error.iter().map(QueryErrorBody::from).collect(),
    }))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportRequest {
    #[serde(default)]
    pub ranges: Vec<RangeFilter>,
    #[serde(default)]
    pub query: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub view: Option<ViewState>,
}

async fn export(
    State(state): State<AppState>,
    Path((id, format)): Path<(String, String)>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let d = dataset(&state, &id)?;
    if format != "csv" && format != "png" {
        return Err(ApiError::NotFound(format!("unknown export format `{format}`")));
    }
    let request: ExportRequest = parse_json(&body)?;
    let sel = d.select(&FilterState {
        ranges: request.ranges,
        query: request.query,
    })?;
    // An export must reflect the whole filter, so a broken query is fatal here.
    if let Some(e) = sel.query_error {
        return Err(ApiError::BadRequest(format!("query: {e}")));
    }
    let (content_type, bytes, file) = if format == "csv" {
        ("text/csv; charset=utf-8", export_csv(&d.bundle.metadata, &sel.mask)?, "export.csv")
    } else {
        let view = request
            .view
            .ok_or_else(|| ApiError::BadRequest("png export needs a view".into()))?;
        view.validate()?;
        if d.bundle.projection(&view.projection).is_none() {
            return Err(ApiError::BadRequest(format!("unknown projection `{}`", view.projection)));
        }
        let atlas = d.atlas()?;
        let d2 = Arc::clone(&d);
        let rendered = tokio::task::spawn_blocking(move || render_view(&d2.bundle, &atlas, &sel.mask, &view))
            .await
            .map_err(|e| ApiError::Internal(e.to_string()))??;
        ("image/png", rendered.png, "export.png")
    };
    Ok((
        StatusCode::OK,
        [
            (header::CONTENT_TYPE, HeaderValue::from_static(content_type)),
            (
                header::CONTENT_DISPOSITION,
                HeaderValue::from_str(&format!("attachment; filename=\"{file}\"")).expect("ascii"),
            ),
        ],
        bytes,
    )
        .into_response())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn page_names() {
        assert_eq!(page_number("0"), Some(0));
        assert_eq!(page_number("page_12"), Some(12));
        assert_eq!(page_number("page_3.png"), Some(3));
        assert_eq!(page_number("x"), None);
    }
}
