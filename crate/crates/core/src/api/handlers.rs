use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{Path, RawQuery, State};
use axum::http::header::CONTENT_TYPE;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::analytics::{self, Dimension};
use crate::schema::{from_canonical_json, CodecError, IncidentId, IncidentRecord, RecordView};
use crate::store::{QueryFilter, ReviewAction, ReviewEvent, ReviewState, Store};

use super::auth::{ApiTier, Principal};
use super::error::ApiError;
use super::AppState;

pub const PAGE_SIZE: usize = 100;

fn pairs(raw: &Option<String>) -> Vec<(String, String)> {
    raw.as_deref()
        .map(|q| url::form_urlencoded::parse(q.as_bytes()).into_owned().collect())
        .unwrap_or_default()
}

fn parse_id(raw: &str) -> Result<IncidentId, ApiError> {
    raw.parse()
        .map_err(|_| ApiError::bad_request("BAD_ID_FORMAT", format!("`{raw}` is not an incident id (CDI-NNNNNN)")))
}

fn body_bytes(body: Result<Bytes, BytesRejection>) -> Result<Bytes, ApiError> {
    body.map_err(|e| {
        let status = e.status();
        if status == StatusCode::PAYLOAD_TOO_LARGE {
            ApiError::new(status, "PAYLOAD_TOO_LARGE", e.body_text())
        } else {
            ApiError::bad_request("BAD_REQUEST", e.body_text())
        }
    })
}

fn json_bytes(status: StatusCode, bytes: Vec<u8>) -> Response {
    (status, [(CONTENT_TYPE, "application/json")], bytes).into_response()
}

// Writes go through the store's blocking, fsyncing path.
async fn blocking<T, F>(store: std::sync::Arc<Store>, f: F) -> Result<T, ApiError>
where
    F: FnOnce(&Store) -> Result<T, crate::store::StoreError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&store))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
        .map_err(ApiError::from)
}

/// A submission is a canonical record whose `incident_id` may be omitted or
/// empty; the store assigns it.
pub fn parse_submission(bytes: &[u8]) -> Result<IncidentRecord, CodecError> {
    let mut value: Value = serde_json::from_slice(bytes).map_err(|e| CodecError::Parse(e.to_string()))?;
    if let Value::Object(map) = &mut value {
        map.entry("incident_id").or_insert_with(|| Value::String(String::new()));
    }
    let bytes = serde_json::to_vec(&value).expect("values serialize");
    from_canonical_json(&bytes)
}

pub async fn submit(
    State(state): State<AppState>,
    principal: Principal,
    body: Result<Bytes, BytesRejection>,
) -> Result<Response, ApiError> {
    principal.require(ApiTier::Submitter)?;
    let body = body_bytes(body)?;
    let record = parse_submission(&body)?;
    let id = blocking(state.store.clone(), move |s| s.submit(record)).await?;
    tracing::info!(incident_id = %id, key = principal.key_id.as_deref().unwrap_or("-"), "submitted");
    Ok((
        StatusCode::CREATED,
        Json(json!({"incident_id": id, "state": ReviewState::Submitted})),
    )
        .into_response())
}

pub async fn list(
    State(state): State<AppState>,
    principal: Principal,
    RawQuery(raw): RawQuery,
) -> Result<Response, ApiError> {
    let params = pairs(&raw);
    let mut cursor = None;
    let mut filter_pairs = Vec::new();
    for (k, v) in &params {
        if k == "cursor" {
            cursor = Some(v.clone());
        } else {
            filter_pairs.push((k.as_str(), v.as_str()));
        }
    }
    let filter = QueryFilter::from_pairs(filter_pairs)?;
    let views = state.store.query(&filter, principal.tier.access())?;
    let start = match &cursor {
        None => 0,
        Some(c) => {
            views
                .iter()
                .position(|v| v.incident_id() == c)
                .ok_or_else(|| ApiError::bad_request("BAD_CURSOR", format!("cursor `{c}` is not in this result set")))?
                + 1
        }
    };
    let page: Vec<&RecordView> = views.iter().skip(start).take(PAGE_SIZE).collect();
    let next_cursor = if start + page.len() < views.len() {
        page.last().map(|v| v.incident_id().to_string())
    } else {
        None
    };
    Ok(Json(json!({"items": page, "next_cursor": next_cursor})).into_response())
}

pub async fn get_one(
    State(state): State<AppState>,
    principal: Principal,
    Path(raw): Path<String>,
) -> Result<Response, ApiError> {
    let id = parse_id(&raw)?;
    match principal.tier {
        ApiTier::Reviewer => {
            let detail = state.store.detail(id)?;
            Ok(Json(detail).into_response())
        }
        _ => {
            let view = state.store.get(id, principal.tier.access())?;
            Ok(json_bytes(StatusCode::OK, view.to_json()))
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewBody {
    pub action: ReviewAction,
    #[serde(default)]
    pub reason: Option<String>,
}

pub async fn review(
    State(state): State<AppState>,
    principal: Principal,
    Path(raw): Path<String>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Response, ApiError> {
    principal.require(ApiTier::Reviewer)?;
    let id = parse_id(&raw)?;
    let body = body_bytes(body)?;
    let req: ReviewBody = serde_json::from_slice(&body).map_err(|e| {
        if e.is_syntax() || e.is_eof() {
            ApiError::bad_request("PARSE_ERROR", e.to_string())
        } else {
            ApiError::bad_request("SCHEMA_ERROR", e.to_string())
        }
    })?;
    let reviewer = principal.key_id.clone().unwrap_or_default();
    let mut event = ReviewEvent::new(id, req.action, reviewer);
    event.reason = req.reason;
    let new_state = blocking(state.store.clone(), move |s| s.review(id, event)).await?;
    tracing::info!(incident_id = %id, action = %req.action, state = %new_state, "reviewed");
    Ok(Json(json!({"incident_id": id, "state": new_state})).into_response())
}

pub async fn taxonomy(State(state): State<AppState>) -> Response {
    Json(state.store.taxonomy()).into_response()
}

pub async fn sectors(State(state): State<AppState>) -> Response {
    let sectors: Vec<&str> = state.store.sectors().iter().collect();
    Json(json!({ "sectors": sectors })).into_response()
}

fn csv_response(text: String) -> Response {
    ([(CONTENT_TYPE, "text/csv; charset=utf-8")], text).into_response()
}

pub async fn stats(
    State(state): State<AppState>,
    principal: Principal,
    Path(report): Path<String>,
    RawQuery(raw): RawQuery,
) -> Result<Response, ApiError> {
    let mut csv = false;
    let mut pending = false;
    let mut field = None;
    let mut value = None;
    for (k, v) in pairs(&raw) {
        match k.as_str() {
            "format" => match v.as_str() {
                "csv" => csv = true,
                "json" => csv = false,
                _ => return Err(ApiError::bad_request("BAD_REQUEST", format!("unknown format `{v}`"))),
            },
            "include" if v == "pending" => pending = true,
            "field" => field = Some(v),
            "value" => value = Some(v),
            _ => return Err(ApiError::bad_request("BAD_FILTER", format!("unknown parameter `{k}`"))),
        }
    }
    let records = if pending {
        principal.require(ApiTier::Reviewer)?;
        state.store.records_in(&[
            ReviewState::Submitted,
            ReviewState::UnderReview,
            ReviewState::Published,
        ])
    } else {
        state.store.published()
    };
    match report.as_str() {
        "harm_matrix" | "harm_severity" => {
            let m = analytics::harm_severity_matrix(&records);
            Ok(if csv {
                csv_response(m.to_csv())
            } else {
                Json(m.to_table(records.len() as u64)).into_response()
            })
        }
        "trend" => {
            let (Some(field), Some(value)) = (field, value) else {
                return Err(ApiError::bad_request("BAD_FILTER", "trend needs `field` and `value`"));
            };
            let series =
                analytics::monthly_trend(&records, &field, &value, state.store.taxonomy(), state.store.sectors())?;
            Ok(if csv {
                csv_response(analytics::trend_to_csv(&series))
            } else {
                Json(json!({"field": field, "value": value, "series": series})).into_response()
            })
        }
        dim => {
            let dim: Dimension = dim.parse()?;
            let table = analytics::aggregate(&records, dim);
            Ok(if csv {
                csv_response(table.to_csv())
            } else {
                Json(table).into_response()
            })
        }
    }
}

pub async fn export(State(state): State<AppState>) -> Response {
    (
        [(CONTENT_TYPE, "application/x-ndjson")],
        state.store.export_public(),
    )
        .into_response()
}

pub async fn healthz(State(state): State<AppState>) -> Response {
    Json(json!({"status": "ok", "events": state.store.event_count()})).into_response()
}

pub async fn not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

pub async fn method_not_allowed() -> ApiError {
    ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "METHOD_NOT_ALLOWED", "method not allowed here")
}
