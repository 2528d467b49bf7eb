//! Endpoint tests against the bundled dataset. Volatile top-level fields (ids,
//! tokens, instants) are scrubbed before bodies are compared with the goldens in
//! `tests/golden`; set `UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use erpgraph::ocel::validate_ocel;
use erpgraph::service::{router, AppState, JobState, DEFAULT_DATASET, ROUTES, SESSION_HEADER};
use erpgraph::workspace::sample_dataset_dir;
use erpgraph::{Settings, Workspace};

fn sample() -> Workspace {
    static WS: OnceLock<Workspace> = OnceLock::new();
    WS.get_or_init(|| Workspace::open(sample_dataset_dir(), Settings::default()).unwrap())
        .clone()
}

fn state(dir: &Path) -> AppState {
    let state = AppState::new(dir, Settings::default()).unwrap();
    state.register_dataset(DEFAULT_DATASET, sample());
    state
}

struct Reply {
    status: StatusCode,
    content_type: Option<String>,
    bytes: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.bytes)))
    }
}

async fn send(app: &Router, method: Method, uri: &str, session: Option<&str>, body: Option<Value>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(s) = session {
        req = req.header(SESSION_HEADER, s);
    }
    let req = match body {
        Some(v) => req
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from(v.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let content_type = resp
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string());
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply {
        status,
        content_type,
        bytes,
    }
}

const VOLATILE: &[&str] = &["id", "created", "modified", "last_active", "dataset_id", "session", "selection", "result"];

/// Volatile fields only occur at the top level of a body.
fn scrub(v: &mut Value) {
    if let Value::Object(map) = v {
        for (k, child) in map.iter_mut() {
            if VOLATILE.contains(&k.as_str()) && child.is_string() {
                *child = Value::String(format!("<{k}>"));
            }
        }
    }
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"))
}

fn assert_golden(name: &str, mut actual: Value) {
    scrub(&mut actual);
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, serde_json::to_string_pretty(&actual).unwrap() + "\n").unwrap();
        return;
    }
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(actual, expected, "golden `{name}` differs");
}

fn assert_error(reply: &Reply, status: StatusCode, code: &str) {
    assert_eq!(reply.status, status, "{}", String::from_utf8_lossy(&reply.bytes));
    let body = reply.json();
    assert_eq!(body["error"], code);
    assert!(body["detail"].as_str().is_some_and(|d| !d.is_empty()));
    assert_eq!(body.as_object().unwrap().len(), 2);
}

async fn new_session(app: &Router) -> String {
    let r = send(app, Method::POST, "/sessions", None, Some(json!({}))).await;
    assert_eq!(r.status, StatusCode::CREATED);
    r.json()["id"].as_str().unwrap().to_string()
}

async fn new_selection(app: &Router, session: &str) -> String {
    let r = send(app, Method::POST, "/selections", Some(session), Some(json!({"class_id": "purchase_orders"}))).await;
    assert_eq!(r.status, StatusCode::CREATED);
    r.json()["id"].as_str().unwrap().to_string()
}

fn p2p_config() -> Value {
    serde_json::from_slice(&std::fs::read(sample_dataset_dir().join("p2p_extraction.json")).unwrap()).unwrap()
}

async fn wait_for(app: &Router, job: &str) -> Value {
    let start = Instant::now();
    loop {
        let r = send(app, Method::GET, &format!("/jobs/{job}"), None, None).await;
        assert_eq!(r.status, StatusCode::OK);
        let body = r.json();
        if body["state"] == "done" || body["state"] == "failed" {
            return body;
        }
        assert!(start.elapsed() < Duration::from_secs(60), "job did not finish");
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
}

#[tokio::test]
async fn classes_lists_the_registry() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(state(dir.path()));
    let r = send(&app, Method::GET, "/classes", None, None).await;
    assert_eq!(r.status, StatusCode::OK);
    let body = r.json();
    let po = body["classes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["class_id"] == "purchase_orders")
        .unwrap();
    assert_eq!(po["member_tables"], json!(["EKKO", "EKPO", "EKPA", "EKET", "EKKN"]));
    assert_golden("classes", body);

    let r = send(&app, Method::GET, "/classes?dataset=missing", None, None).await;
    assert_error(&r, StatusCode::NOT_FOUND, "unknown_dataset");
}

#[tokio::test]
async fn neighborhood_is_laid_out() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(state(dir.path()));
    let r = send(&app, Method::GET, "/graph/neighborhood?node=EKPA&depth=1", None, None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.content_type.as_deref(), Some("application/json"));
    let body = r.json();
    assert!(body["nodes"].as_array().unwrap().iter().all(|n| n["x"].is_f64()));
    assert_golden("neighborhood_ekpa", body);

    let r = send(&app, Method::GET, "/graph/neighborhood?node=purchase_orders&depth=0&hubLimit=none", None, None).await;
    let ids: Vec<String> = r.json()["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|n| n["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(ids, ["EKET", "EKKN", "EKKO", "EKPA", "EKPO", "purchase_orders"]);

    let r = send(&app, Method::GET, "/graph/neighborhood?node=NOPE", None, None).await;
    assert_error(&r, StatusCode::NOT_FOUND, "unknown_node");
    let r = send(&app, Method::GET, "/graph/neighborhood", None, None).await;
    assert_error(&r, StatusCode::BAD_REQUEST, "missing_parameter");
    let r = send(&app, Method::GET, "/graph/neighborhood?node=EKKO&hubLimit=many", None, None).await;
    assert_error(&r, StatusCode::BAD_REQUEST, "invalid_hub_limit");
}

#[tokio::test]
async fn sessions_have_unguessable_tokens() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(state(dir.path()));
    let r = send(&app, Method::POST, "/sessions", None, Some(json!({"dataset": "default"}))).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let body = r.json();
    let token = body["id"].as_str().unwrap();
    assert_eq!(token.len(), 64);
    assert!(token.bytes().all(|b| b.is_ascii_hexdigit()));
    assert_ne!(token, new_session(&app).await);
    assert_golden("session", body);

    let r = send(&app, Method::POST, "/sessions", None, Some(json!({"dataset": "missing"}))).await;
    assert_error(&r, StatusCode::NOT_FOUND, "unknown_dataset");
    let r = send(&app, Method::GET, "/classes", Some("0000"), None).await;
    assert_error(&r, StatusCode::NOT_FOUND, "unknown_session");
}

#[tokio::test]
async fn selection_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(state(dir.path()));
    let session = new_session(&app).await;

    let r = send(&app, Method::POST, "/selections", Some(&session), Some(json!({"class_id": "purchase_orders"}))).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let created = r.json();
    let id = created["id"].as_str().unwrap().to_string();
    assert_golden("selection_seed", created.clone());

    let r = send(&app, Method::GET, &format!("/selections/{id}"), None, None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json(), created);

    let r = send(&app, Method::POST, &format!("/selections/{id}/expand"), Some(&session), Some(json!({"depth": 0}))).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json(), created, "depth 0 leaves the selection unchanged");

    let r = send(&app, Method::GET, &format!("/selections/{id}/ranking"), Some(&session), None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_golden("ranking_seed", r.json());

    let r = send(&app, Method::POST, &format!("/selections/{id}/expand"), Some(&session), Some(json!({"depth": 1, "hubLimit": "auto"}))).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_golden("selection_expanded", r.json());

    let r = send(&app, Method::PATCH, &format!("/selections/{id}"), Some(&session), Some(json!({"table": "EKES", "included": false}))).await;
    assert_eq!(r.status, StatusCode::OK);
    let toggled = r.json();
    assert_golden("selection_toggled", toggled.clone());
    let r = send(&app, Method::GET, &format!("/selections/{id}"), None, None).await;
    assert_eq!(r.json(), toggled);

    let r = send(&app, Method::PATCH, &format!("/selections/{id}"), Some(&session), Some(json!({"table": "ZZZ", "included": true}))).await;
    assert_error(&r, StatusCode::NOT_FOUND, "unknown_table");
    let r = send(&app, Method::GET, "/selections/abc123", None, None).await;
    assert_error(&r, StatusCode::NOT_FOUND, "unknown_selection");
    let r = send(&app, Method::POST, "/selections", Some(&session), Some(json!({"class_id": "nope"}))).await;
    assert_error(&r, StatusCode::NOT_FOUND, "unknown_class");
    let r = send(&app, Method::POST, &format!("/selections/{id}/expand"), Some(&session), Some(json!({"hubLimit": true}))).await;
    assert_error(&r, StatusCode::BAD_REQUEST, "invalid_hub_limit");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn extraction_job_produces_a_valid_log() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(state(dir.path()));
    let session = new_session(&app).await;
    let id = new_selection(&app, &session).await;
    send(&app, Method::POST, &format!("/selections/{id}/expand"), Some(&session), Some(json!({"depth": 1}))).await;

    let r = send(&app, Method::POST, "/extractions", Some(&session), Some(json!({"config": p2p_config()}))).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", String::from_utf8_lossy(&r.bytes));
    let job = r.json();
    assert_eq!(job["state"], "queued");
    assert_eq!(job["progress"], json!({"done": 0, "total": 20}));
    let job_id = job["id"].as_str().unwrap().to_string();

    let done = wait_for(&app, &job_id).await;
    assert_eq!(done["state"], "done", "{done}");
    assert_golden("job_done", done);

    let r = send(&app, Method::GET, &format!("/jobs/{job_id}/result"), None, None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.content_type.as_deref(), Some("application/json"));
    assert!(validate_ocel(&r.bytes).is_valid());

    // The same log as a direct extraction.
    let ws = sample();
    let sel = ws.identify("purchase_orders", 1, None).unwrap();
    let config = serde_json::from_value(p2p_config()).unwrap();
    let log = ws.extract(&sel, &config, |_, _| {}).unwrap();
    assert_eq!(r.bytes, erpgraph::ocel::serialize_ocel(&log));
}

#[tokio::test]
async fn extraction_contract_violations() {
    let dir = tempfile::tempdir().unwrap();
    let state = state(dir.path());
    let app = router(state.clone());
    let session = new_session(&app).await;

    let r = send(&app, Method::POST, "/extractions", None, Some(json!({"config": p2p_config()}))).await;
    assert_error(&r, StatusCode::BAD_REQUEST, "missing_session");
    let r = send(&app, Method::POST, "/extractions", Some(&session), Some(json!({"config": p2p_config()}))).await;
    assert_error(&r, StatusCode::BAD_REQUEST, "no_selection");

    // The seed alone lacks most configured tables.
    let id = new_selection(&app, &session).await;
    let r = send(&app, Method::POST, "/extractions", Some(&session), Some(json!({"config": p2p_config()}))).await;
    assert_error(&r, StatusCode::BAD_REQUEST, "table_not_selected");

    send(&app, Method::POST, &format!("/selections/{id}/expand"), Some(&session), Some(json!({"depth": 1}))).await;
    send(&app, Method::PATCH, &format!("/selections/{id}"), Some(&session), Some(json!({"table": "EBAN", "included": false}))).await;
    let r = send(&app, Method::POST, "/extractions", Some(&session), Some(json!({"config": p2p_config()}))).await;
    assert_error(&r, StatusCode::BAD_REQUEST, "table_not_selected");
    assert!(r.json()["detail"].as_str().unwrap().contains("EBAN"));
}

#[tokio::test]
async fn one_active_job_per_session() {
    let dir = tempfile::tempdir().unwrap();
    let state = state(dir.path());
    let app = router(state.clone());
    let session = new_session(&app).await;
    let id = new_selection(&app, &session).await;
    send(&app, Method::POST, &format!("/selections/{id}/expand"), Some(&session), Some(json!({"depth": 1}))).await;

    let held = state.begin_job(&session, &id, 1).unwrap();
    assert_eq!(held.state, JobState::Queued);
    let r = send(&app, Method::POST, "/extractions", Some(&session), Some(json!({"config": p2p_config()}))).await;
    assert_error(&r, StatusCode::CONFLICT, "job_running");

    let r = send(&app, Method::GET, &format!("/jobs/{}/result", held.id), None, None).await;
    assert_error(&r, StatusCode::CONFLICT, "job_not_done");

    // Another session is unaffected.
    let other = new_session(&app).await;
    let r = send(&app, Method::POST, "/extractions", Some(&other), Some(json!({"config": p2p_config(), "selection": id}))).await;
    assert_eq!(r.status, StatusCode::CREATED);
}

#[tokio::test]
async fn unknown_jobs_are_404() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(state(dir.path()));
    let r = send(&app, Method::GET, "/jobs/0123abcd", None, None).await;
    assert_error(&r, StatusCode::NOT_FOUND, "unknown_job");
    let r = send(&app, Method::GET, "/jobs/0123abcd/result", None, None).await;
    assert_error(&r, StatusCode::NOT_FOUND, "unknown_job");
    let r = send(&app, Method::GET, "/nowhere", None, None).await;
    assert_error(&r, StatusCode::NOT_FOUND, "not_found");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn restart_keeps_selections_and_results() {
    let dir = tempfile::tempdir().unwrap();
    let (selection, job) = {
        let app = router(state(dir.path()));
        let session = new_session(&app).await;
        let id = new_selection(&app, &session).await;
        send(&app, Method::POST, &format!("/selections/{id}/expand"), Some(&session), Some(json!({"depth": 1}))).await;
        let r = send(&app, Method::POST, "/extractions", Some(&session), Some(json!({"config": p2p_config()}))).await;
        let job = r.json()["id"].as_str().unwrap().to_string();
        assert_eq!(wait_for(&app, &job).await["state"], "done");
        let r = send(&app, Method::GET, &format!("/selections/{id}"), None, None).await;
        ((id, r.json(), session), job)
    };

    let app = router(state(dir.path()));
    let (id, before, session) = selection;
    let r = send(&app, Method::GET, &format!("/selections/{id}"), None, None).await;
    assert_eq!(r.json(), before);
    let r = send(&app, Method::GET, &format!("/jobs/{job}"), None, None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_golden("job_restored", r.json());
    let r = send(&app, Method::GET, &format!("/jobs/{job}/result"), None, None).await;
    assert_eq!(r.status, StatusCode::OK);
    assert!(validate_ocel(&r.bytes).is_valid());
    let r = send(&app, Method::GET, "/classes", Some(&session), None).await;
    assert_error(&r, StatusCode::NOT_FOUND, "unknown_session");
}

fn multipart(parts: &[(&str, &str, Vec<u8>)]) -> (String, Vec<u8>) {
    let boundary = "erpgraph-test-boundary";
    let mut body = Vec::new();
    for (field, file, bytes) in parts {
        body.extend_from_slice(
            format!(
                "--{boundary}\r\nContent-Disposition: form-data; name=\"{field}\"; filename=\"{file}\"\r\nContent-Type: text/csv\r\n\r\n"
            )
            .as_bytes(),
        );
        body.extend_from_slice(bytes);
        body.extend_from_slice(b"\r\n");
    }
    body.extend_from_slice(format!("--{boundary}--\r\n").as_bytes());
    (format!("multipart/form-data; boundary={boundary}"), body)
}

async fn upload(app: &Router, parts: &[(&str, &str, Vec<u8>)]) -> Reply {
    let (content_type, body) = multipart(parts);
    let req = Request::builder()
        .method(Method::POST)
        .uri("/datasets")
        .header(header::CONTENT_TYPE, content_type)
        .body(Body::from(body))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply {
        status,
        content_type: None,
        bytes,
    }
}

#[tokio::test]
async fn upload_registers_a_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(dir.path(), Settings::default()).unwrap());
    let sample = sample_dataset_dir();
    let read = |name: &str| std::fs::read(sample.join(name)).unwrap();
    let mut parts = vec![
        ("catalog", "catalog.csv", read("catalog.csv")),
        ("relationships", "relationships.csv", read("relationships.csv")),
        ("classes", "classes.csv", read("classes.csv")),
    ];
    let mut rows: Vec<_> = std::fs::read_dir(sample.join("rows")).unwrap().map(|e| e.unwrap().path()).collect();
    rows.sort();
    let names: Vec<String> = rows.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
    for (path, name) in rows.iter().zip(&names) {
        parts.push(("rows", name.as_str(), std::fs::read(path).unwrap()));
    }

    let r = upload(&app, &parts).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", String::from_utf8_lossy(&r.bytes));
    let body = r.json();
    let dataset = body["dataset_id"].as_str().unwrap().to_string();
    assert_golden("dataset_uploaded", body);

    let r = send(&app, Method::POST, "/sessions", None, Some(json!({"dataset": dataset}))).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let session = r.json()["id"].as_str().unwrap().to_string();
    let r = send(&app, Method::GET, "/classes", Some(&session), None).await;
    assert_eq!(r.json()["classes"].as_array().unwrap().len(), 13);
    let r = send(&app, Method::GET, &format!("/classes?dataset={dataset}"), None, None).await;
    assert_eq!(r.status, StatusCode::OK);

    let r = upload(&app, &parts[1..3]).await;
    assert_error(&r, StatusCode::BAD_REQUEST, "invalid_upload");
    let r = upload(&app, &[("catalog", "catalog.csv", b"name,description\nX,y\n".to_vec()), parts[2].clone()]).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
}

/// Every declared route is wired: none falls through to the 404 fallback or
/// answers 405.
#[tokio::test]
async fn every_route_is_routed() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(state(dir.path()));
    for (method, path) in ROUTES {
        let uri = path.replace("{id}", "abc");
        let method = Method::from_bytes(method.as_bytes()).unwrap();
        let r = send(&app, method.clone(), &uri, None, Some(json!({}))).await;
        assert_ne!(r.status, StatusCode::METHOD_NOT_ALLOWED, "{method} {uri}");
        if r.status == StatusCode::NOT_FOUND {
            assert_ne!(r.json()["error"], "not_found", "{method} {uri}");
        }
    }
}
