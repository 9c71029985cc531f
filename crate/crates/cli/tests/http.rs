use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use efrlab_cli::server::{router, AppState};
use efrlab_core::session::{parse_export, CSV_HEADER};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn json_call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (s, t) = call(app, method, uri, body).await;
    (s, serde_json::from_str(&t).unwrap_or(Value::Null))
}

/// Drives a session to the end, always clicking the left trapdoor and
/// answering `undecided`.
async fn play_through(app: &Router, id: &str, mut ts: u64) -> u64 {
    loop {
        let (_, v) = json_call(app, "GET", &format!("/sessions/{id}/state"), None).await;
        ts += 100;
        let t = json!({ "ts": ts });
        let (status, _) = match v["step"].as_str().unwrap() {
            "ready" => json_call(app, "POST", &format!("/sessions/{id}/start"), Some(t)).await,
            "playing" => {
                json_call(app, "POST", &format!("/sessions/{id}/move"), Some(json!({"side": "left", "ts": ts}))).await
            }
            "question" => {
                json_call(
                    app,
                    "POST",
                    &format!("/sessions/{id}/answer"),
                    Some(json!({"choice": "undecided", "ts": ts})),
                )
                .await
            }
            "over" => json_call(app, "POST", &format!("/sessions/{id}/next"), Some(t)).await,
            "break" => json_call(app, "POST", &format!("/sessions/{id}/resume"), Some(t)).await,
            "finished" => return ts,
            other => panic!("unexpected step {other}"),
        };
        assert_eq!(status, StatusCode::OK, "{v}");
    }
}

#[tokio::test]
async fn full_session_over_http() {
    let app = router(AppState::new(None));
    let (s, v) = json_call(&app, "POST", "/sessions", Some(json!({"group": "A", "seed": 7, "ts": 1000}))).await;
    assert_eq!(s, StatusCode::CREATED);
    let id = v["id"].as_str().unwrap().to_string();
    assert_eq!(v["state"]["step"], "ready");
    assert_eq!(v["state"]["trial_count"], 62);

    let (s, state) = json_call(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(s, StatusCode::OK);
    let nodes = state["nodes"].as_array().unwrap();
    assert!(nodes.iter().any(|n| n["bin"].is_array()));
    assert!(nodes
        .iter()
        .filter(|n| n["owner"].is_string())
        .all(|n| n["actions"][0]["side"] == "left"));

    play_through(&app, &id, 1000).await;

    let (s, csv) = call(&app, "GET", &format!("/sessions/{id}/export"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
    let rows = parse_export(&csv).unwrap();
    assert_eq!(rows.len(), 48);
    let asked: std::collections::BTreeSet<usize> = rows
        .iter()
        .filter(|r| r.question_answer.is_some())
        .map(|r| r.round)
        .collect();
    assert!(asked.is_subset(&[3, 4, 7, 8].into_iter().collect()));

    let (s, log) = call(&app, "GET", &format!("/sessions/{id}/events"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert!(log.lines().count() > 100);
    let (_, meta) = json_call(&app, "GET", &format!("/sessions/{id}/metadata"), None).await;
    assert!(meta["payment_cents"].as_u64().unwrap() >= 1000);
}

#[tokio::test]
async fn errors_map_to_status_codes() {
    let app = router(AppState::new(None));
    let (s, _) = json_call(&app, "GET", "/sessions/nope/state", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (_, v) = json_call(&app, "POST", "/sessions", Some(json!({"group": "B", "seed": 1, "ts": 50}))).await;
    let id = v["id"].as_str().unwrap().to_string();
    let (s, v) = json_call(&app, "POST", &format!("/sessions/{id}/move"), Some(json!({"action": "c", "ts": 60}))).await;
    assert_eq!(s, StatusCode::CONFLICT, "{v}");
    assert!(v["error"].is_string());
    let (s, _) = json_call(&app, "POST", &format!("/sessions/{id}/start"), Some(json!({"ts": 10}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = json_call(&app, "POST", &format!("/sessions/{id}/answer"), Some(json!({"choice": "left", "ts": 70}))).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (s, _) = json_call(&app, "POST", "/sessions", Some(json!({"group": "C", "seed": 1}))).await;
    assert!(s.is_client_error());
    let (s, v) = json_call(&app, "POST", &format!("/sessions/{id}/start"), None).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    let (s, _) = json_call(&app, "POST", &format!("/sessions/{id}/move"), Some(json!({"action": "zz"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn sessions_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState::new(Some(dir.path().to_path_buf())));
    let (_, v) = json_call(
        &app,
        "POST",
        "/sessions",
        Some(json!({"group": "A", "seed": 4, "practice_count": 1, "ts": 5})),
    )
    .await;
    let id = v["id"].as_str().unwrap().to_string();
    json_call(&app, "POST", &format!("/sessions/{id}/start"), Some(json!({"ts": 10}))).await;
    let (_, before) = json_call(&app, "GET", &format!("/sessions/{id}/state"), None).await;

    let state = AppState::new(Some(dir.path().to_path_buf()));
    assert_eq!(state.load_existing().unwrap(), 1);
    let app2 = router(state);
    let (s, after) = json_call(&app2, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(before, after);
    let (_, v) = json_call(&app2, "POST", "/sessions", Some(json!({"group": "B", "seed": 1}))).await;
    assert_ne!(v["id"].as_str().unwrap(), id);
}
