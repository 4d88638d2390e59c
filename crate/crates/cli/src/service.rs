//! Stateless JSON API over one immutable model.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use causal_forge::explain::{extract_rx, ArgumentPolicy};
use causal_forge::export::{ExplanationDocument, ModelSummary};
use causal_forge::verify::verify_properties;
use causal_forge::{CausalModel, Input, Intervention};

use crate::LoadedModel;

struct Served {
    name: String,
    model: CausalModel,
    /// Rendered once; the model never changes.
    summary: String,
}

type Shared = Arc<Served>;

#[derive(Debug, Serialize)]
struct ApiError {
    code: u16,
    message: String,
}

impl ApiError {
    fn malformed(message: impl Into<String>) -> Self {
        ApiError {
            code: StatusCode::BAD_REQUEST.as_u16(),
            message: message.into(),
        }
    }

    fn domain(message: impl ToString) -> Self {
        ApiError {
            code: StatusCode::UNPROCESSABLE_ENTITY.as_u16(),
            message: message.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.code).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        json_response(status, serde_json::to_string(&self).expect("errors serialize"))
    }
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

/// Values may be sent as strings or as numbers (`{"U1": 1}`).
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Text(String),
    Number(serde_json::Number),
}

impl Scalar {
    fn into_string(self) -> String {
        match self {
            Scalar::Text(s) => s,
            Scalar::Number(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Deserialize)]
struct InterventionBody {
    variable: String,
    value: Scalar,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Interventions {
    List(Vec<InterventionBody>),
    Map(BTreeMap<String, Scalar>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioBody {
    #[serde(default)]
    input: BTreeMap<String, Scalar>,
    #[serde(default)]
    interventions: Option<Interventions>,
    #[serde(default)]
    policy: Option<String>,
}

struct ScenarioRequest {
    input: Input,
    interventions: Vec<Intervention>,
    policy: Option<String>,
}

fn parse_body(bytes: &[u8]) -> Result<ScenarioRequest, ApiError> {
    let body: ScenarioBody =
        serde_json::from_slice(bytes).map_err(|e| ApiError::malformed(format!("invalid request body: {e}")))?;
    let input = Input::new(body.input.into_iter().map(|(k, v)| (k, v.into_string())));
    let interventions = match body.interventions {
        None => Vec::new(),
        Some(Interventions::List(l)) => l
            .into_iter()
            .map(|i| Intervention::new(i.variable, i.value.into_string()))
            .collect(),
        Some(Interventions::Map(m)) => m
            .into_iter()
            .map(|(k, v)| Intervention::new(k, v.into_string()))
            .collect(),
    };
    Ok(ScenarioRequest {
        input,
        interventions,
        policy: body.policy,
    })
}

async fn describe(State(s): State<Shared>) -> Response {
    json_response(StatusCode::OK, s.summary.clone())
}

async fn evaluate(State(s): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let req = parse_body(&body)?;
    let a = s
        .model
        .evaluate(&req.input, &req.interventions)
        .map_err(ApiError::domain)?;
    let body = serde_json::to_string_pretty(a.as_map()).expect("maps serialize");
    Ok(json_response(StatusCode::OK, body))
}

async fn explain(State(s): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let req = parse_body(&body)?;
    let policy = match req.policy.as_deref() {
        None => ArgumentPolicy::All,
        Some(p) => ArgumentPolicy::parse(p).ok_or_else(|| ApiError::malformed(format!("unknown policy `{p}`")))?,
    };
    let rx = extract_rx(&s.model, &req.input, &req.interventions, &policy).map_err(ApiError::domain)?;
    let report = verify_properties(&s.model, &req.input, &rx).map_err(ApiError::domain)?;
    let doc = ExplanationDocument::new(&s.name, &s.model, &rx, &policy, report);
    Ok(json_response(StatusCode::OK, doc.to_json()))
}

#[derive(Debug, Deserialize)]
struct EnumerateQuery {
    cap: Option<usize>,
}

pub const DEFAULT_ENUMERATION_CAP: usize = 1024;

async fn enumerate(State(s): State<Shared>, q: Result<Query<EnumerateQuery>, QueryRejection>) -> Result<Response, ApiError> {
    let q = q.map_err(|e| ApiError::malformed(e.body_text()))?;
    let cap = q.cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let size = s.model.input_space_size();
    if size > cap {
        return Err(ApiError::domain(format!("input space has {size} inputs, above the cap of {cap}")));
    }
    let inputs: Vec<Value> = s
        .model
        .enumerate_inputs()
        .map(|u| {
            Value::Object(
                u.iter()
                    .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
                    .collect(),
            )
        })
        .collect();
    let body = serde_json::to_string_pretty(&inputs).expect("values serialize");
    Ok(json_response(StatusCode::OK, body))
}

async fn not_found() -> ApiError {
    ApiError {
        code: StatusCode::NOT_FOUND.as_u16(),
        message: "no such endpoint".into(),
    }
}

/// The API router for a loaded model.
pub fn router(loaded: LoadedModel) -> Router {
    let model = loaded.document.model;
    let summary = ModelSummary::new(&loaded.name, &model).to_json();
    let state = Arc::new(Served {
        name: loaded.name,
        model,
        summary,
    });
    Router::new()
        .route("/model", get(describe))
        .route("/evaluate", post(evaluate))
        .route("/explain", post(explain))
        .route("/inputs/enumerate", get(enumerate))
        .fallback(not_found)
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(loaded: LoadedModel, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(loaded))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
