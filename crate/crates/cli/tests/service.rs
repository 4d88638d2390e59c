use std::path::PathBuf;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use causal_forge_cli::load_model;
use causal_forge_cli::service::router;

fn app(name: &str) -> Router {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name);
    router(load_model(&path).unwrap())
}

async fn send(app: &Router, req: Request<Body>) -> (StatusCode, String) {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    if status != StatusCode::NOT_FOUND {
        assert_eq!(res.headers()["content-type"], "application/json");
    }
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn get(app: &Router, uri: &str) -> (StatusCode, String) {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn post(app: &Router, uri: &str, body: impl Into<Body>) -> (StatusCode, Value) {
    let req = Request::post(uri)
        .header("content-type", "application/json")
        .body(body.into())
        .unwrap();
    let (status, text) = send(app, req).await;
    (status, serde_json::from_str(&text).unwrap())
}

fn edges(v: &Value) -> Vec<(String, String)> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_str().unwrap().into(), p[1].as_str().unwrap().into()))
        .collect()
}

fn pairs(list: &[(&str, &str)]) -> Vec<(String, String)> {
    list.iter().map(|&(a, b)| (a.into(), b.into())).collect()
}

#[tokio::test]
async fn model_summary_is_stable() {
    let app = app("pizza.cm");
    let (status, first) = get(&app, "/model").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(get(&app, "/model").await.1, first);
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["name"], "pizza");
    assert_eq!(v["binary"], true);
    assert_eq!(v["variables"].as_array().unwrap().len(), 4);
    assert_eq!(
        edges(&v["influences"]),
        pairs(&[("U1", "V1"), ("U2", "V1"), ("V1", "V2")])
    );
}

#[tokio::test]
async fn explain_matches_golden_rx() {
    let app = app("pizza.cm");
    let (status, doc) = post(
        &app,
        "/explain",
        json!({"input": {"U1": 1, "U2": 0}, "policy": "all"}).to_string(),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{doc}");
    assert_eq!(doc["model"], "pizza");
    assert_eq!(edges(&doc["attacks"]), pairs(&[("U2", "V1")]));
    assert_eq!(edges(&doc["supports"]), pairs(&[("U1", "V1"), ("V1", "V2")]));
    let accepted: Vec<&str> = doc["arguments"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["accepted"] == true)
        .map(|a| a["name"].as_str().unwrap())
        .collect();
    assert_eq!(accepted, ["U1", "V1", "V2"]);
    let props = doc["properties"].as_array().unwrap();
    assert_eq!(props.len(), 8);
    assert!(props.iter().all(|p| p["status"] == "pass"), "{doc}");
}

#[tokio::test]
async fn explain_with_interventions_in_both_shapes() {
    let app = app("pizza.cm");
    let list = json!({"input": {"U1": "1", "U2": "1"}, "interventions": [{"variable": "V1", "value": 1}]});
    let map = json!({"input": {"U1": "1", "U2": "1"}, "interventions": {"V1": "1"}});
    let (s1, a) = post(&app, "/explain", list.to_string()).await;
    let (s2, b) = post(&app, "/explain", map.to_string()).await;
    assert_eq!((s1, s2), (StatusCode::OK, StatusCode::OK));
    assert_eq!(a, b);
    assert_eq!(a["interventions"], json!([{"variable": "V1", "value": "1"}]));
}

#[tokio::test]
async fn evaluate_returns_assignment() {
    let app = app("pizza.cm");
    let (status, v) = post(&app, "/evaluate", json!({"input": {"U1": 0, "U2": 0}}).to_string()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v, json!({"U1": "0", "U2": "0", "V1": "0", "V2": "0"}));
}

#[tokio::test]
async fn error_statuses() {
    let app = app("pizza.cm");

    let (status, v) = post(&app, "/evaluate", json!({"input": {"U1": 1, "U2": 0, "W": 1}}).to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["code"], 422);
    assert!(v["message"].as_str().unwrap().contains('W'));

    let (status, _) = post(&app, "/evaluate", json!({"input": {"U1": 3, "U2": 0}}).to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (status, v) = post(&app, "/evaluate", "{not json").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], 400);

    let (status, _) = post(&app, "/explain", json!({"input": [1, 0]}).to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, _) = post(&app, "/explain", json!({"input": {"U1": 1, "U2": 0}, "policy": "most"}).to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, _) = post(
        &app,
        "/explain",
        json!({"input": {"U1": 1, "U2": 0}, "policy": "focused:Z"}).to_string(),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn enumerate_inputs_respects_cap() {
    let app = app("pizza.cm");
    let (status, body) = get(&app, "/inputs/enumerate").await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(v[0], json!({"U1": "0", "U2": "0"}));

    let (status, _) = get(&app, "/inputs/enumerate?cap=3").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = get(&app, "/inputs/enumerate?cap=-1").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn gradual_model_reports_not_applicable() {
    let app = app("thermostat.cm");
    let body = json!({"input": {"Kitchen": "low", "Hall": "mid", "Boost": "high"}, "policy": "involved"});
    let (status, doc) = post(&app, "/explain", body.to_string()).await;
    assert_eq!(status, StatusCode::OK, "{doc}");
    assert!(doc["arguments"].as_array().unwrap().iter().all(|a| a.get("accepted").is_none()));
    let na = doc["properties"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["status"] == "not-applicable")
        .count();
    assert_eq!(na, 3);
}

#[tokio::test]
async fn concurrent_requests_agree() {
    let app = app("pizza.cm");
    let body = json!({"input": {"U1": 1, "U2": 0}}).to_string();
    let tasks: Vec<_> = (0..16)
        .map(|_| {
            let app = app.clone();
            let body = body.clone();
            tokio::spawn(async move { post(&app, "/explain", body).await })
        })
        .collect();
    let mut results = Vec::new();
    for t in tasks {
        results.push(t.await.unwrap());
    }
    assert!(results.windows(2).all(|w| w[0] == w[1]));
}
