use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

/// Error body: `{"error": kind, "message": text}`, plus the current
/// revision on conflicts.
#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub revision: Option<u64>,
}

impl ApiError {
    pub fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            error: kind.to_string(),
            message: message.into(),
            revision: None,
        }
    }

    pub fn not_found(kind: &str, message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, kind, message)
    }

    pub fn conflict(expected: u64, current: u64) -> ApiError {
        ApiError {
            revision: Some(current),
            ..ApiError::new(
                StatusCode::CONFLICT,
                "revision-conflict",
                format!("request is for revision {expected}, session is at {current}"),
            )
        }
    }

    /// 422 carrying the engine's error kind.
    pub fn engine(kind: &str, error: impl std::fmt::Display) -> ApiError {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, kind, error.to_string())
    }

    pub fn bad_request(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, "bad-request", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}

macro_rules! engine_error {
    ($($t:ty),*) => {$(
        impl From<$t> for ApiError {
            fn from(e: $t) -> ApiError {
                ApiError::engine(e.kind(), e)
            }
        }
    )*};
}

engine_error!(
    phutball_core::MoveError,
    phutball_core::MoveGenError,
    phutball_core::TacticsError,
    phutball_core::notation::NotationError
);

impl From<phutball_core::corpus::CorpusError> for ApiError {
    fn from(e: phutball_core::corpus::CorpusError) -> ApiError {
        match e {
            phutball_core::corpus::CorpusError::UnknownEntry(_) => {
                ApiError::not_found(e.kind(), e.to_string())
            }
            _ => ApiError::engine(e.kind(), e),
        }
    }
}
