use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use serde_json::{json, Value};

use vbd_core::dss::DssError;
use vbd_core::metrics::MetricError;
use vbd_core::query::QueryError;
use vbd_core::text::EmitError;

/// The single error body of every failed request. `code` is stable and
/// machine-readable; `message` is for people.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError { status, code, message: message.into(), detail: None }
    }

    pub fn with_detail(mut self, detail: Value) -> ApiError {
        self.detail = Some(detail);
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<DssError> for ApiError {
    fn from(e: DssError) -> ApiError {
        let message = e.to_string();
        match e {
            DssError::DuplicateCase(_) => ApiError::new(StatusCode::CONFLICT, "duplicate_case", message),
            DssError::NotFound(_) => ApiError::new(StatusCode::NOT_FOUND, "case_not_found", message),
            DssError::InvalidId(_) => ApiError::new(StatusCode::BAD_REQUEST, "invalid_case_id", message),
            DssError::UnknownPredicate { suggestions, .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "unknown_predicate", message)
                    .with_detail(json!({ "suggestions": suggestions }))
            }
            DssError::BadObject { .. } => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "bad_object", message),
            DssError::NotAnAssertion(seq) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "not_an_assertion", message)
                    .with_detail(json!({ "seq": seq }))
            }
            DssError::AlreadyRetracted(seq) => {
                ApiError::new(StatusCode::CONFLICT, "already_retracted", message).with_detail(json!({ "seq": seq }))
            }
            DssError::Corrupt { seq, .. } => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "corrupt_log", message)
                .with_detail(json!({ "seq": seq })),
            DssError::Io { .. } => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "io", message),
        }
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> ApiError {
        let message = e.to_string();
        match e {
            QueryError::Syntax { line, column, .. } => ApiError::new(StatusCode::BAD_REQUEST, "query_syntax", message)
                .with_detail(json!({ "line": line, "column": column })),
            QueryError::UnboundVariable(var) => ApiError::new(StatusCode::BAD_REQUEST, "unbound_variable", message)
                .with_detail(json!({ "variable": var })),
        }
    }
}

impl From<EmitError> for ApiError {
    fn from(e: EmitError) -> ApiError {
        let message = e.to_string();
        let EmitError::Unmapped(concepts) = e;
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "unmapped_concept", message)
            .with_detail(json!({ "concepts": concepts }))
    }
}

impl From<MetricError> for ApiError {
    fn from(e: MetricError) -> ApiError {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "metric_undefined", e.to_string())
    }
}
