use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    fn status(&self) -> StatusCode {
        match self {
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if let ApiError::Internal(msg) = &self {
            tracing::error!("{msg}");
        }
        let status = self.status();
        (status, Json(json!({ "error": self.to_string(), "status": status.as_u16() }))).into_response()
    }
}

impl From<csn_core::filters::FilterError> for ApiError {
    fn from(e: csn_core::filters::FilterError) -> Self {
        ApiError::BadRequest(e.to_string())
    }
}

impl From<csn_core::exports::ExportError> for ApiError {
    fn from(e: csn_core::exports::ExportError) -> Self {
        use csn_core::exports::ExportError as E;
        match e {
            E::UnknownProjection(_) | E::InvalidView(_) | E::MaskLength { .. } => {
                ApiError::BadRequest(e.to_string())
            }
            other => ApiError::Internal(other.to_string()),
        }
    }
}

impl From<csn_core::model::ModelError> for ApiError {
    fn from(e: csn_core::model::ModelError) -> Self {
        ApiError::Internal(e.to_string())
    }
}
