#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use vbd_core::dss::{CaseManager, CaseStore};
use vbd_core::kb::{load_graphs, load_kb, KnowledgeBase, BENCH_DIR};
use vbd_service::{router, AppState};

pub fn kb_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../kb")
}

pub fn kb() -> KnowledgeBase {
    load_kb(&kb_dir()).expect("shipped knowledge base loads")
}

/// A router over the shipped KB with its case store in `store`.
pub fn app(store: &std::path::Path) -> Router {
    let kb = Arc::new(kb());
    let datasets: BTreeMap<_, _> = load_graphs(&kb_dir().join(BENCH_DIR), &kb.prefixes).unwrap().into_iter().collect();
    let manager = Arc::new(CaseManager::new(kb, CaseStore::open(store).unwrap()));
    router(AppState::new(manager, datasets))
}

pub async fn send(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let res = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

/// Local names under `key` in a suggestion list, e.g. `test` in
/// `recommended_tests`.
pub fn names(list: &Value, key: &str) -> Vec<String> {
    let mut out: Vec<String> = list
        .as_array()
        .unwrap()
        .iter()
        .map(|x| {
            let iri = x[key].as_str().unwrap();
            iri.rsplit(['#', '/']).next().unwrap().to_string()
        })
        .collect();
    out.sort();
    out
}

/// Drives the kala-azar session for patient RK and returns the suggestions
/// after each inference: symptoms, aspiration result, NAT result, and the
/// confirming reports.
pub async fn rk_session(app: &Router, id: &str) -> Vec<Value> {
    use serde_json::json;
    let (status, _) = send(
        app,
        Method::POST,
        "/cases",
        Some(json!({
            "id": id,
            "patient": ":RK",
            "demographics": [{"p": "has_Gender", "o": "male"}, {"p": "has_Age", "o": "34"}],
        })),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    let assertions = format!("/cases/{id}/assertions");
    let infer = format!("/cases/{id}/infer");
    let stages: [&[(&str, &str)]; 4] = [
        &[
            ("has_Anaemia", "true"),
            ("has_Dry_Skin", "true"),
            ("has_Recurrent_Fever", "true"),
            ("has_Weakness", "true"),
            ("has_Weight_Loss", "true"),
        ],
        &[("has_Aspiration_Result", "positive")],
        &[("has_NAT_Result", "positive")],
        &[("is_Confirmed_By_Report", "aspiration"), ("is_Confirmed_By_Report", "NAT")],
    ];
    let mut out = Vec::new();
    for stage in stages {
        for (p, o) in stage {
            let (status, body) = send(app, Method::POST, &assertions, Some(json!({"p": p, "o": o}))).await;
            assert_eq!(status, StatusCode::CREATED, "{body}");
        }
        let (status, body) = send(app, Method::POST, &infer, None).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        out.push(body);
    }
    out
}
