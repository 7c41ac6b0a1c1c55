use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use sdskg::coversheet::CoverSheetError;
use sdskg::ingest::IngestError;
use serde::Serialize;

/// JSON error body: `{"error": code, "message": text, "field"?: name}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                error: code.to_string(),
                message: message.into(),
                field: None,
            },
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad-request", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not-found", message)
    }

    pub fn conflict(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, "conflict", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<IngestError> for ApiError {
    fn from(e: IngestError) -> Self {
        let mut err = ApiError::new(StatusCode::BAD_REQUEST, "schema-violation", e.to_string());
        err.body.field = e.field().map(str::to_string);
        err
    }
}

impl From<CoverSheetError> for ApiError {
    fn from(e: CoverSheetError) -> Self {
        match e {
            CoverSheetError::EmptySelection => ApiError::conflict(e.to_string()),
            CoverSheetError::UnknownSdsIds(_) => ApiError::conflict(e.to_string()),
            CoverSheetError::DuplicateSdsId(_) => ApiError::bad_request(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
