#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use searchenv_cli::server::{router, AppState};
use searchenv_core::trajectory::{JsonlStore, Trajectory};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(Arc::new(AppState::new(common::provider(), 100, None)))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, |b| Body::from(b.to_string()))).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    call(app, "POST", uri, Some(body)).await
}

async fn new_session(app: &Router, question: &str) -> String {
    let (status, body) = post(app, "/session", json!({"question": question})).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    body["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn new_session_has_full_budget() {
    let app = app();
    let (status, body) = post(&app, "/session", json!({"question": common::EPISODE_QUESTION})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["v"], "v1");
    assert_eq!(body["actions_remaining"], 100);
    assert_eq!(body["mode"], "search");
    assert!(body["legal_actions"].as_array().unwrap().contains(&json!("search")));

    let id = body["id"].as_str().unwrap();
    let (status, again) = call(&app, "GET", &format!("/session/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again["state"], body["state"]);

    let (status, small) = post(&app, "/session", json!({"question": "q", "max_actions": 5})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(small["actions_remaining"], 5);
}

#[tokio::test]
async fn illegal_quote_is_a_conflict_and_changes_nothing() {
    let app = app();
    let id = new_session(&app, "麦田怪圈是什么").await;
    let (_, before) = call(&app, "GET", &format!("/session/{id}"), None).await;
    let (status, err) =
        post(&app, &format!("/session/{id}/action"), json!({"kind": "quote", "start": 0, "end": 5})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["code"], "illegal_action");
    assert_eq!(err["v"], "v1");
    let (_, after) = call(&app, "GET", &format!("/session/{id}"), None).await;
    assert_eq!(before, after);
}

#[tokio::test]
async fn request_errors() {
    let app = app();
    let (status, err) = call(&app, "GET", "/session/nope", None).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::NOT_FOUND, Some("not_found")));

    let (status, err) = post(&app, "/session", json!({"question": "  "})).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::BAD_REQUEST, Some("invalid_question")));

    let (status, err) = post(&app, "/session", json!({"text": 1})).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::BAD_REQUEST, Some("bad_request")));

    let id = new_session(&app, "q").await;
    let (status, err) = post(&app, &format!("/session/{id}/action"), json!({"kind": "teleport"})).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::BAD_REQUEST, Some("bad_request")));
    let (status, err) = post(&app, &format!("/session/{id}/action"), json!({"kind": "search", "query": " "})).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::CONFLICT, Some("illegal_action")));
    let (status, err) = post(&app, "/search", json!({"query": " "})).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::BAD_REQUEST, Some("invalid_query")));
}

#[tokio::test]
async fn undo_reset_and_closed_sessions() {
    let app = app();
    let id = new_session(&app, "麦田怪圈是什么").await;
    let act = format!("/session/{id}/action");
    let (_, body) = post(&app, &act, json!({"kind": "search", "query": "麦田怪圈是什么"})).await;
    assert_eq!(body["actions_remaining"], 99);
    let (_, body) = post(&app, &act, json!({"kind": "load_page1"})).await;
    assert_eq!(body["mode"], "browsing");

    let (status, body) = call(&app, "POST", &format!("/session/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!((body["actions_remaining"].as_u64(), body["mode"].as_str()), (Some(99), Some("search")));

    let (status, body) = call(&app, "POST", &format!("/session/{id}/reset"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["actions_remaining"], 100);
    let (status, err) = call(&app, "POST", &format!("/session/{id}/undo"), None).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::CONFLICT, Some("nothing_to_undo")));

    let (_, body) = post(&app, &act, json!({"kind": "finish"})).await;
    assert_eq!(body["finished"], true);
    assert_eq!(body["legal_actions"], json!([]));
    let (status, err) = post(&app, &act, json!({"kind": "search", "query": "x"})).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::CONFLICT, Some("session_closed")));
}

#[tokio::test]
async fn search_and_extract() {
    let app = app();
    let (status, body) = post(&app, "/search", json!({"query": "麦田怪圈是什么"})).await;
    assert_eq!(status, StatusCode::OK);
    let results = body["results"].as_array().unwrap();
    assert_eq!(results.len(), 3);
    assert!(results.iter().all(|r| !r["url"].as_str().unwrap().contains("reddit.com")));
    assert_eq!(body["has_more"], true);

    let url = results[0]["url"].as_str().unwrap();
    let (status, page) = post(&app, "/extract", json!({"url": url})).await;
    assert_eq!(status, StatusCode::OK);
    assert!(!page["body"].as_str().unwrap().is_empty());
    assert!(page["windows"].as_array().unwrap().iter().all(|w| w.as_str().unwrap().chars().count() <= 500));

    let (status, err) = post(&app, "/extract", json!({"url": "https://files.example.org/crop-circle-scan.pdf"})).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::UNSUPPORTED_MEDIA_TYPE, Some("unsupported_content")));
    let (status, err) = post(&app, "/extract", json!({"url": "not a url"})).await;
    assert_eq!((status, err["code"].as_str()), (StatusCode::BAD_REQUEST, Some("invalid_url")));
    let (status, _) = post(&app, "/extract", json!({"url": "https://unknown.example/"})).await;
    assert_eq!(status, StatusCode::BAD_GATEWAY);
}

#[tokio::test]
async fn invalid_trajectory_is_rejected_with_violations() {
    let app = app();
    let mut t = common::episode_trajectory();
    t.max_actions = 10;
    let (status, err) = post(&app, "/record", serde_json::to_value(&t).unwrap()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err["code"], "validation_failed");
    assert!(!err["violations"].as_array().unwrap().is_empty());

    let (status, body) = post(&app, "/record", serde_json::to_value(common::episode_trajectory()).unwrap()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["id"], 1);
}

#[tokio::test]
async fn episode_over_http_matches_in_process_replay() {
    let dir = tempfile::tempdir().unwrap();
    let store = JsonlStore::open(dir.path().join("records.jsonl")).unwrap();
    let app = router(Arc::new(AppState::new(common::provider(), 100, Some(store))));
    let id = new_session(&app, common::EPISODE_QUESTION).await;
    for (i, action) in common::episode_actions().iter().enumerate() {
        let (status, body) = post(&app, &format!("/session/{id}/action"), serde_json::to_value(action).unwrap()).await;
        assert_eq!(status, StatusCode::OK, "step {i}: {body}");
    }
    let (status, body) = post(&app, "/record", json!({"session_id": id})).await;
    assert_eq!(status, StatusCode::OK, "{body}");

    let mut over_http: Trajectory = serde_json::from_value(body["trajectory"].clone()).unwrap();
    let stored = JsonlStore::open(dir.path().join("records.jsonl")).unwrap().load().unwrap();
    assert_eq!(stored.len(), 1);
    assert_eq!(stored[0], over_http);
    over_http.id = None;
    assert_eq!(serde_json::to_vec(&over_http).unwrap(), serde_json::to_vec(&common::episode_trajectory()).unwrap());
}

#[tokio::test]
async fn requests_on_one_session_apply_in_order() {
    let app = app();
    let id = new_session(&app, "crop circles").await;
    let uri = format!("/session/{id}/action");
    let calls = (0..20).map(|i| {
        let app = app.clone();
        let uri = uri.clone();
        tokio::spawn(async move { post(&app, &uri, json!({"kind": "search", "query": format!("q{i}")})).await })
    });
    for c in calls {
        assert_eq!(c.await.unwrap().0, StatusCode::OK);
    }
    let (_, body) = call(&app, "GET", &format!("/session/{id}"), None).await;
    assert_eq!(body["actions_remaining"], 80);
    assert_eq!(body["steps"], 20);
}
