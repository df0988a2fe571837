//! The HTTP API in process: create a session, answer once and read the
//! view back. `rwac serve` exposes the same router on a socket.

use std::sync::Arc;

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use robust_wac::api::router;
use robust_wac::session::SessionStore;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn send(app: &axum::Router, method: &str, uri: &str, body: Value) -> Value {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json").body(Body::from(body.to_string())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    println!("{method} {uri} -> {status}");
    serde_json::from_slice(&bytes).unwrap()
}

#[tokio::main]
async fn main() {
    let app = router(Arc::new(SessionStore::in_memory()));
    let lp = json!({ "a": [[1.0, -1.0, -1.0]], "b": [1.0, 0.0, 0.0], "c": [1.0], "row_labels": ["x<=1", "x>=0", "x>=0 again"] });
    let view = send(&app, "POST", "/sessions", json!({ "problem": { "lp": lp } })).await;
    let id = view["id"].as_str().unwrap().to_string();
    println!("first center x = {}, question {}", view["center"]["x"][0], view["phase"]["query"]["probes"]);

    let answer = json!({ "kind": "priorities", "p": [1.0, 1.2, 0.8, 0.9], "iteration": 0 });
    send(&app, "POST", &format!("/sessions/{id}/answer"), answer).await;
    let view = send(&app, "POST", &format!("/sessions/{id}/step"), Value::Null).await;
    println!("second center x = {}, phase {}", view["center"]["x"][0], view["phase"]["phase"]);

    let missing = send(&app, "GET", "/sessions/unknown", Value::Null).await;
    println!("error body: {missing}");
}
