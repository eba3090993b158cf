//! Requests to every mutating endpoint without a usable token.

use std::path::Path;

use axum::body::Body;
use axum::http::{header, HeaderValue, Method, Request, StatusCode};
use axum::Router;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use serde_json::{json, Value};
use smartreview::fixture;
use smartreview::repository::{Repository, LOG_FILE};
use smartreview_server::{auth, router, AppState};
use tempfile::TempDir;
use tower::ServiceExt;

pub const MUTATIONS: &[(&str, &str)] = &[
    ("POST", "/articles"),
    ("PATCH", "/articles/{id}"),
    ("POST", "/articles/{id}/sections"),
    ("PUT", "/articles/{id}/sections/order"),
    ("PATCH", "/sections/{id}"),
    ("DELETE", "/sections/{id}"),
    ("POST", "/papers"),
    ("POST", "/comparisons"),
    ("PATCH", "/comparisons/{id}/cells"),
    ("POST", "/visualizations"),
    ("POST", "/articles/{id}/publish"),
    ("POST", "/entities"),
];

/// Bodies that a valid caller could send to some mutating endpoint.
fn plausible_bodies() -> Vec<Value> {
    vec![
        json!({"title": "Injected", "researchField": "R278"}),
        json!({"title": "Renamed"}),
        json!({"heading": "Injected", "body": {"type": "NaturalText", "deoType": "Introduction", "markdown": "x"}}),
        json!({"order": ["R135548"]}),
        json!({"heading": "Renamed"}),
        json!({"title": "Paper", "authors": ["A"]}),
        json!({"title": "C", "columns": [{"paper": "R135401"}], "properties": ["P32"]}),
        json!({"contribution": "R135504", "property": "P7009", "values": [{"literal": "F"}]}),
        json!({"comparison": "R135501", "chartKind": "BarChart", "seriesProperty": "P7009", "label": "x"}),
        json!({"description": "Unauthorised version"}),
        json!({"kind": "Resource", "label": "Injected"}),
    ]
}

#[derive(Debug, Clone)]
pub enum Credential {
    None,
    RandomBearer(String),
    /// The stored hash of a real token presented as the token.
    StoredHash,
    /// A real token with one character changed.
    Tampered(usize),
    /// A real token under a scheme other than Bearer.
    WrongScheme,
    /// A real token in a header the service does not read.
    WrongHeader,
    Garbage(String),
}

#[derive(Debug, Clone)]
pub struct Case {
    pub endpoint: usize,
    pub id: String,
    pub body: Vec<u8>,
    pub credential: Credential,
}

pub fn case_strategy() -> impl Strategy<Value = Case> {
    let ids = prop_oneof![
        Just("R135360".to_owned()),
        Just("R135548".to_owned()),
        Just("R135501".to_owned()),
        "[A-Za-z0-9_-]{1,12}",
    ];
    let bodies = plausible_bodies();
    let body = prop_oneof![
        (0..bodies.len()).prop_map(move |i| bodies[i].to_string().into_bytes()),
        any::<Vec<u8>>(),
        Just(Vec::new()),
    ];
    let credential = prop_oneof![
        Just(Credential::None),
        "[0-9a-f]{64}".prop_map(Credential::RandomBearer),
        Just(Credential::StoredHash),
        (0..64usize).prop_map(Credential::Tampered),
        Just(Credential::WrongScheme),
        Just(Credential::WrongHeader),
        "[ -~]{0,40}".prop_map(Credential::Garbage),
    ];
    (0..MUTATIONS.len(), ids, body, credential).prop_map(|(endpoint, id, body, credential)| Case {
        endpoint,
        id,
        body,
        credential,
    })
}

/// (files, bytes) below `dir`.
pub fn tree_size(dir: &Path) -> (usize, u64) {
    let mut files = 0;
    let mut bytes = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        let meta = entry.metadata().unwrap();
        if meta.is_dir() {
            let (f, b) = tree_size(&entry.path());
            files += f;
            bytes += b;
        } else {
            files += 1;
            bytes += meta.len();
        }
    }
    (files, bytes)
}

/// Builds the request for `case`; `token` is a real, valid token that the
/// credential variants derive their near misses from.
pub fn request(case: &Case, token: &str) -> Request<Body> {
    let (method, template) = MUTATIONS[case.endpoint];
    let mut req = Request::builder()
        .method(method.parse::<Method>().unwrap())
        .uri(template.replace("{id}", &case.id))
        .header(header::CONTENT_TYPE, "application/json");
    req = match &case.credential {
        Credential::None => req,
        Credential::RandomBearer(t) => req.header(header::AUTHORIZATION, format!("Bearer {t}")),
        Credential::StoredHash => req.header(header::AUTHORIZATION, format!("Bearer {}", auth::hash_token(token))),
        Credential::Tampered(i) => {
            let mut chars: Vec<char> = token.chars().collect();
            let i = i % chars.len();
            chars[i] = if chars[i] == '0' { '1' } else { '0' };
            req.header(
                header::AUTHORIZATION,
                format!("Bearer {}", chars.into_iter().collect::<String>()),
            )
        }
        Credential::WrongScheme => req.header(header::AUTHORIZATION, format!("Basic {token}")),
        Credential::WrongHeader => req.header("X-Api-Token", token),
        Credential::Garbage(g) => match HeaderValue::from_str(g) {
            Ok(v) => req.header(header::AUTHORIZATION, v),
            Err(_) => req,
        },
    };
    req.body(Body::from(case.body.clone())).unwrap()
}

/// A seeded service on a temporary data directory, plus one real account.
pub struct Target {
    pub dir: TempDir,
    pub app: Router,
    pub token: String,
}

impl Target {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let mut repo = Repository::open(dir.path()).unwrap();
        fixture::seed(&mut repo.store).unwrap();
        let (_, token) = auth::register(&mut repo.store, "Owner").unwrap();
        Target {
            app: router(AppState::new(repo)),
            dir,
            token,
        }
    }

    pub fn log_len(&self) -> u64 {
        std::fs::metadata(self.dir.path().join(LOG_FILE)).map_or(0, |m| m.len())
    }
}

impl Default for Target {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzReport {
    pub cases: u32,
    pub log_growth: u64,
}

/// Sends `cases` random unauthenticated mutations. Each must get 401 with
/// a challenge header and leave the data directory untouched. A final
/// authenticated write shows the size check can see growth.
pub fn check_unauthenticated(cases: u32) -> Result<FuzzReport, String> {
    let rt = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .unwrap();
    let target = Target::new();
    let log_before = target.log_len();
    let tree_before = tree_size(target.dir.path());

    crate::runner(cases)
        .run(&case_strategy(), |case| {
            let resp = rt
                .block_on(target.app.clone().oneshot(request(&case, &target.token)))
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(resp.status(), StatusCode::UNAUTHORIZED, "{:?}", case);
            prop_assert!(resp.headers().contains_key(header::WWW_AUTHENTICATE));
            prop_assert_eq!(tree_size(target.dir.path()), tree_before, "{:?}", case);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    let log_growth = target.log_len() - log_before;

    let control = Request::builder()
        .method(Method::POST)
        .uri("/articles")
        .header(header::AUTHORIZATION, format!("Bearer {}", target.token))
        .body(Body::from(
            json!({"title": "Authorised", "researchField": "R278"}).to_string(),
        ))
        .unwrap();
    let resp = rt.block_on(target.app.clone().oneshot(control)).unwrap();
    if resp.status() != StatusCode::CREATED || target.log_len() <= log_before {
        return Err(format!("authorised control write was not observed ({})", resp.status()));
    }
    Ok(FuzzReport { cases, log_growth })
}
