//! HTTP routes over the case manager and the shared knowledge base.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query as QueryParams, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use vbd_core::dss::{expand_name, resolve_object, CaseManager, Event, Observation, PatientCase, Suggestions};
use vbd_core::kb::{kb_report, KnowledgeBase};
use vbd_core::metrics::{MetricsReport, Population};
use vbd_core::query::{execute, parse_query_with, SolutionTable};
use vbd_core::rules::{Bindings, InferenceResult};
use vbd_core::store::{Graph, Term, Triple};
use vbd_core::text::{emit_rdf, extract_text, split_sentences, EntityMention};

use crate::error::ApiError;

#[derive(Clone)]
pub struct AppState {
    pub manager: Arc<CaseManager>,
    /// Named graphs `POST /query` may select, besides `kb` and `fixtures`.
    pub datasets: Arc<BTreeMap<String, Graph>>,
}

impl AppState {
    pub fn new(manager: Arc<CaseManager>, datasets: BTreeMap<String, Graph>) -> AppState {
        AppState { manager, datasets: Arc::new(datasets) }
    }

    fn kb(&self) -> &KnowledgeBase {
        self.manager.kb()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/cases", post(create_case).get(list_cases))
        .route("/cases/{id}", get(get_case))
        .route("/cases/{id}/assertions", post(assert_observation))
        .route("/cases/{id}/retractions", post(retract))
        .route("/cases/{id}/infer", post(infer))
        .route("/cases/{id}/explain", get(explain))
        .route("/query", post(query))
        .route("/metrics", get(metrics))
        .route("/extract", post(extract))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such route") })
        .method_not_allowed_fallback(|| async {
            ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "method_not_allowed", "method not allowed on this route")
        })
        .with_state(state)
}

type ApiResult<T> = Result<T, ApiError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    payload.map(|Json(v)| v).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text()))
}

async fn health(State(state): State<AppState>) -> Json<Value> {
    let report = kb_report(state.kb());
    Json(json!({
        "status": "ok",
        "rule_count": report.rule_count,
        "rules_by_source": report.rules_by_source,
        "class_count": report.class_count,
        "diseases": report.diseases,
        "fixtures": report.fixtures,
    }))
}

#[derive(Debug, Deserialize)]
pub struct CreateCase {
    pub id: String,
    #[serde(default)]
    pub patient: Option<String>,
    #[serde(default)]
    pub demographics: Vec<Observation>,
}

/// Wire form of a case.
#[derive(Debug, Serialize)]
pub struct CaseView<'a> {
    pub id: &'a str,
    pub patient: &'a str,
    pub events: &'a [Event],
    pub facts: Vec<Triple>,
    pub suggestions: Option<&'a Suggestions>,
}

impl<'a> CaseView<'a> {
    pub fn of(case: &'a PatientCase) -> CaseView<'a> {
        CaseView {
            id: &case.id,
            patient: &case.patient,
            events: case.events(),
            facts: case.facts().iter().collect(),
            suggestions: case.suggestions(),
        }
    }
}

async fn create_case(
    State(state): State<AppState>,
    payload: Result<Json<CreateCase>, JsonRejection>,
) -> ApiResult<Response> {
    let req = body(payload)?;
    let manager = state.manager.clone();
    let case = blocking(move || manager.create(&req.id, req.patient.as_deref(), &req.demographics)).await??;
    Ok((StatusCode::CREATED, Json(CaseView::of(&case))).into_response())
}

async fn list_cases(State(state): State<AppState>) -> ApiResult<Json<Value>> {
    let manager = state.manager.clone();
    let ids = blocking(move || manager.list()).await??;
    Ok(Json(json!({ "cases": ids })))
}

async fn get_case(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let manager = state.manager.clone();
    let case = blocking(move || manager.get(&id)).await??;
    Ok(Json(CaseView::of(&case)).into_response())
}

async fn assert_observation(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<Observation>, JsonRejection>,
) -> ApiResult<Response> {
    let obs = body(payload)?;
    let manager = state.manager.clone();
    let event = blocking(move || manager.assert(&id, &obs)).await??;
    Ok((StatusCode::CREATED, Json(event)).into_response())
}

#[derive(Debug, Deserialize)]
pub struct Retract {
    pub seq: u64,
}

async fn retract(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<Retract>, JsonRejection>,
) -> ApiResult<Response> {
    let req = body(payload)?;
    let manager = state.manager.clone();
    let event = blocking(move || manager.retract(&id, req.seq)).await??;
    Ok((StatusCode::CREATED, Json(event)).into_response())
}

#[derive(Debug, Serialize)]
pub struct ProvenanceView {
    pub rule_id: String,
    pub rule_text: String,
    pub bindings: Bindings,
}

#[derive(Debug, Serialize)]
pub struct DerivedView {
    pub triple: Triple,
    pub provenance: Vec<ProvenanceView>,
}

/// Every derived fact with the rules and bindings behind it, enough to
/// rebuild `explain` for any suggestion.
pub fn derived_view(result: &InferenceResult) -> Vec<DerivedView> {
    result
        .derived
        .iter()
        .map(|d| DerivedView {
            triple: d.triple.clone(),
            provenance: d
                .provenance
                .iter()
                .map(|p| ProvenanceView {
                    rule_id: p.rule_id.clone(),
                    rule_text: result.rule(&p.rule_id).map(|r| r.text.clone()).unwrap_or_default(),
                    bindings: p.bindings.clone(),
                })
                .collect(),
        })
        .collect()
}

async fn infer(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let manager = state.manager.clone();
    let (suggestions, result) = blocking(move || manager.infer(&id)).await??;
    Ok(Json(json!({
        "suggestions": suggestions,
        "derived": derived_view(&result),
        "rounds": result.rounds,
    })))
}

#[derive(Debug, Deserialize)]
pub struct ExplainParams {
    pub s: Option<String>,
    pub p: String,
    pub o: String,
    pub datatype: Option<String>,
}

async fn explain(
    State(state): State<AppState>,
    Path(id): Path<String>,
    params: Result<QueryParams<ExplainParams>, QueryRejection>,
) -> ApiResult<Json<Value>> {
    let QueryParams(params) =
        params.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text()))?;
    let kb = state.kb();
    let case = state.manager.get(&id)?;
    let bad = |what: &str, name: &str| {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", format!("cannot expand {what} `{name}`"))
    };
    let subject = match &params.s {
        Some(s) => expand_name(kb, s).ok_or_else(|| bad("subject", s))?,
        None => case.patient.clone(),
    };
    let predicate = expand_name(kb, &params.p).ok_or_else(|| bad("predicate", &params.p))?;
    let object = resolve_object(kb, &predicate, &params.o, params.datatype.as_deref())?;
    let fact = Triple::new(Term::iri(subject), Term::iri(predicate), object);
    match state.manager.explain(&id, &fact)? {
        Ok(entries) => Ok(Json(json!({
            "fact": fact,
            "explanations": entries
                .into_iter()
                .map(|(rule_id, rule_text, bindings)| ProvenanceView { rule_id, rule_text, bindings })
                .collect::<Vec<_>>(),
        }))),
        Err(e) => {
            let code = match e {
                vbd_core::rules::ExplainError::Asserted(_) => "fact_asserted",
                vbd_core::rules::ExplainError::Absent(_) => "fact_absent",
            };
            Err(ApiError::new(StatusCode::NOT_FOUND, code, e.to_string()))
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct QueryRequest {
    pub query: String,
    /// Dataset names; `kb` is the ontology and `fixtures` the patient
    /// fixtures. Defaults to both.
    #[serde(default)]
    pub datasets: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct QueryResult {
    pub dataset: String,
    #[serde(flatten)]
    pub table: SolutionTable,
}

async fn query(
    State(state): State<AppState>,
    payload: Result<Json<QueryRequest>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let req = body(payload)?;
    let kb = state.kb();
    let parsed = parse_query_with(&req.query, &mut kb.prefixes.clone())?;
    let names = if req.datasets.is_empty() { vec!["kb".to_string(), "fixtures".to_string()] } else { req.datasets };
    let mut graphs = Vec::new();
    for name in &names {
        let graph = match name.as_str() {
            "kb" => kb.ontology.clone(),
            "fixtures" => {
                let mut g = Graph::new();
                for f in kb.fixtures.values() {
                    g.extend_from(f);
                }
                g
            }
            other => state.datasets.get(other).cloned().ok_or_else(|| {
                ApiError::new(StatusCode::NOT_FOUND, "unknown_dataset", format!("no dataset `{other}`"))
                    .with_detail(json!({ "available": state.datasets.keys().collect::<Vec<_>>() }))
            })?,
        };
        graphs.push((name.clone(), graph));
    }
    let mut union = Graph::new();
    let mut results = Vec::new();
    for (name, graph) in &graphs {
        union.extend_from(graph);
        results.push(QueryResult { dataset: name.clone(), table: execute(&parsed, graph) });
    }
    let combined = execute(&parsed, &union);
    Ok(Json(json!({ "header": combined.header, "rows": combined.rows, "per_dataset": results })))
}

#[derive(Debug, Deserialize)]
pub struct MetricsParams {
    pub population: Option<String>,
}

async fn metrics(
    State(state): State<AppState>,
    params: Result<QueryParams<MetricsParams>, QueryRejection>,
) -> ApiResult<Json<MetricsReport>> {
    let QueryParams(params) =
        params.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text()))?;
    let population = match params.population.as_deref() {
        None | Some("inferred") => Population::Inferred,
        Some("direct") => Population::Direct,
        Some(other) => {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "bad_request",
                format!("population must be `inferred` or `direct`, not `{other}`"),
            ))
        }
    };
    let kb = state.kb();
    let counts = kb.schema.count_metrics(&kb.ontology);
    Ok(Json(MetricsReport::compute(counts, population)?))
}

#[derive(Debug, Deserialize)]
pub struct ExtractRequest {
    pub text: String,
    pub patient: String,
}

#[derive(Debug, Serialize)]
pub struct ExtractResponse {
    pub sentences: usize,
    pub mentions: Vec<EntityMention>,
    pub triples: Vec<Triple>,
}

async fn extract(
    State(state): State<AppState>,
    payload: Result<Json<ExtractRequest>, JsonRejection>,
) -> ApiResult<Json<ExtractResponse>> {
    let req = body(payload)?;
    let kb = state.kb();
    let patient = expand_name(kb, &req.patient).ok_or_else(|| {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", format!("cannot expand patient `{}`", req.patient))
    })?;
    let mentions = extract_text(&req.text, &kb.lexicon);
    let triples = emit_rdf(&mentions, &patient, &kb.lexicon)?;
    Ok(Json(ExtractResponse { sentences: split_sentences(&req.text, &kb.lexicon).len(), mentions, triples }))
}

/// Runs file-touching or CPU-heavy case work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))
}
