//! Shared request harness for the integration tests.
#![allow(dead_code)]

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use smartreview::fixture;
use smartreview::repository::{Repository, LOG_FILE};
use smartreview_server::{router, AppState};
use tempfile::TempDir;
use tower::ServiceExt;

pub struct Harness {
    pub dir: TempDir,
    pub app: Router,
}

impl Harness {
    pub fn new(seed: bool) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let mut repo = Repository::open(dir.path()).unwrap();
        if seed {
            fixture::seed(&mut repo.store).unwrap();
        }
        Harness {
            app: router(AppState::new(repo)),
            dir,
        }
    }

    pub fn log_len(&self) -> u64 {
        std::fs::metadata(self.dir.path().join(LOG_FILE)).map_or(0, |m| m.len())
    }

    pub async fn send(&self, method: Method, uri: &str, token: Option<&str>, body: Body) -> (StatusCode, String) {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(t) = token {
            req = req.header(header::AUTHORIZATION, format!("Bearer {t}"));
        }
        let resp = self.app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    }

    pub async fn json(&self, method: Method, uri: &str, token: Option<&str>, body: Value) -> (StatusCode, Value) {
        let (status, text) = self.send(method, uri, token, Body::from(body.to_string())).await;
        (status, serde_json::from_str(&text).unwrap_or(Value::Null))
    }

    pub async fn get(&self, uri: &str) -> (StatusCode, String) {
        self.send(Method::GET, uri, None, Body::empty()).await
    }

    pub async fn register(&self, name: &str) -> (String, String) {
        let (status, body) = self
            .json(Method::POST, "/accounts", None, json!({ "displayName": name }))
            .await;
        assert_eq!(status, StatusCode::CREATED);
        (
            body["userId"].as_str().unwrap().to_owned(),
            body["token"].as_str().unwrap().to_owned(),
        )
    }
}
