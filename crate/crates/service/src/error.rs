use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use glc_core::GlcError;
use serde::Serialize;
use serde_json::{json, Value};

/// Error body: `{code, message, detail}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.into(),
            message: message.into(),
            detail: Value::Null,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn no_session(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "session_not_found", format!("no session {id:?}"))
    }

    pub fn precondition(code: &str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::CONFLICT, code, message)
    }
}

impl From<GlcError> for ApiError {
    fn from(e: GlcError) -> Self {
        use GlcError::*;
        let (status, code, detail) = match &e {
            Csv { row, column, .. } => (StatusCode::BAD_REQUEST, "csv", json!({"row": row, "column": column})),
            NonNumeric { row, column, attribute, value } => (
                StatusCode::BAD_REQUEST,
                "non_numeric",
                json!({"row": row, "column": column, "attribute": attribute, "value": value}),
            ),
            NonFinite { row, column } => (StatusCode::BAD_REQUEST, "non_finite", json!({"row": row, "column": column})),
            EmptyDataset => (StatusCode::BAD_REQUEST, "empty_dataset", Value::Null),
            NoAttributes => (StatusCode::BAD_REQUEST, "no_attributes", Value::Null),
            LabelColumnNotFound(c) => (StatusCode::BAD_REQUEST, "label_column_not_found", json!({"column": c})),
            UnknownClass(c) => (StatusCode::BAD_REQUEST, "unknown_class", json!({"class": c})),
            DimensionMismatch { expected, got } => (
                StatusCode::BAD_REQUEST,
                "dimension_mismatch",
                json!({"expected": expected, "got": got}),
            ),
            InvalidParameter(_) => (StatusCode::BAD_REQUEST, "invalid_parameter", Value::Null),
            PointNotFound(p) => (StatusCode::BAD_REQUEST, "point_not_found", json!({"point": p})),
            TooFewPoints { class, count, required } => (
                StatusCode::CONFLICT,
                "too_few_points",
                json!({"class": class, "count": count, "required": required}),
            ),
            SingleClass => (StatusCode::CONFLICT, "single_class", Value::Null),
            ZeroCoefficients => (StatusCode::CONFLICT, "zero_coefficients", Value::Null),
            EmptySelection => (StatusCode::CONFLICT, "empty_selection", Value::Null),
            HyperblocksOverlap => (StatusCode::CONFLICT, "hyperblocks_overlap", Value::Null),
            DegenerateSeparation(s) => (StatusCode::CONFLICT, "degenerate_separation", json!({"lower_sum": s})),
            EmptySupportVectors => (StatusCode::CONFLICT, "empty_support_vectors", Value::Null),
            EmptySplit => (StatusCode::CONFLICT, "empty_split", Value::Null),
            EmptyComplement => (StatusCode::CONFLICT, "empty_complement", Value::Null),
            Io(_) | Json(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal", Value::Null),
        };
        ApiError {
            status,
            code: code.into(),
            message: e.to_string(),
            detail,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::to_string(&self).unwrap_or_else(|_| "{}".into());
        (self.status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

pub type ApiResult<T> = std::result::Result<T, ApiError>;
