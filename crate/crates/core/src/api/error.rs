use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::Serialize;

use crate::analytics::AnalyticsError;
use crate::report::Violation;
use crate::schema::CodecError;
use crate::store::StoreError;

/// Every `code` an error body can carry.
pub const ERROR_CODES: [&str; 16] = [
    "VALIDATION_FAILED",
    "PARSE_ERROR",
    "SCHEMA_ERROR",
    "BAD_REQUEST",
    "BAD_ID_FORMAT",
    "BAD_FILTER",
    "BAD_DIMENSION",
    "BAD_CURSOR",
    "MISSING_REASON",
    "UNAUTHORIZED",
    "FORBIDDEN",
    "NOT_FOUND",
    "METHOD_NOT_ALLOWED",
    "ILLEGAL_TRANSITION",
    "PAYLOAD_TOO_LARGE",
    "INTERNAL",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violations: Option<Vec<Violation>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        debug_assert!(ERROR_CODES.contains(&code), "{code}");
        Self {
            status,
            body: ErrorBody {
                code,
                message: message.into(),
                violations: None,
            },
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn unauthorized(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "UNAUTHORIZED", message)
    }

    pub fn forbidden(message: impl Into<String>) -> Self {
        Self::new(StatusCode::FORBIDDEN, "FORBIDDEN", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "NOT_FOUND", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", message)
    }

    pub fn status(&self) -> StatusCode {
        self.status
    }

    pub fn code(&self) -> &'static str {
        self.body.code
    }

    pub fn body(&self) -> &ErrorBody {
        &self.body
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, axum::Json(self.body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::Validation(report) => {
                let codes: Vec<&str> = report.violations().iter().map(|v| v.code.as_str()).collect();
                let mut err = ApiError::bad_request(
                    "VALIDATION_FAILED",
                    format!("record failed validation: {}", codes.join(", ")),
                );
                err.body.violations = Some(report.into_violations());
                err
            }
            StoreError::NotFound(_) => ApiError::not_found(message),
            StoreError::IllegalTransition { .. } | StoreError::NotPublished(_) => {
                ApiError::new(StatusCode::CONFLICT, "ILLEGAL_TRANSITION", message)
            }
            StoreError::MissingReason => ApiError::bad_request("MISSING_REASON", message),
            StoreError::IdMismatch { .. } => ApiError::bad_request("BAD_REQUEST", message),
            StoreError::BadFilter(_) => ApiError::bad_request("BAD_FILTER", message),
            StoreError::Locked(_)
            | StoreError::ReadOnly
            | StoreError::IdsExhausted
            | StoreError::Corrupt(_)
            | StoreError::Io(_) => {
                tracing::error!(error = %message, "store failure");
                ApiError::internal(message)
            }
        }
    }
}

impl From<AnalyticsError> for ApiError {
    fn from(e: AnalyticsError) -> Self {
        ApiError::bad_request(e.code(), e.to_string())
    }
}

impl From<CodecError> for ApiError {
    fn from(e: CodecError) -> Self {
        ApiError::bad_request(e.code(), e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{ValidationReport, ViolationCode};

    #[test]
    fn store_errors_map_to_statuses() {
        let report = ValidationReport::from_violations(vec![Violation::new(
            "incident_summary",
            ViolationCode::SummaryTooLong,
            "too long",
        )]);
        let e = ApiError::from(StoreError::Validation(report));
        assert_eq!(e.status(), StatusCode::BAD_REQUEST);
        assert!(e.body().message.contains("SUMMARY_TOO_LONG"));
        assert_eq!(e.body().violations.as_ref().unwrap().len(), 1);
        assert_eq!(ApiError::from(StoreError::NotFound("x".into())).status(), StatusCode::NOT_FOUND);
        assert_eq!(ApiError::from(StoreError::MissingReason).code(), "MISSING_REASON");
        let json = serde_json::to_value(ApiError::from(StoreError::MissingReason).body()).unwrap();
        assert!(json.get("violations").is_none());
    }
}
