use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use tecvis_core::corpus::{synthesize_corpus, write_store};
use tecvis_core::query::{self, AggregateQuery, Params};
use tecvis_core::{Analyzer, Store};
use tecvis_server::{build_app, ServerConfig};

fn store() -> Arc<Store> {
    let analyzer = Analyzer::bundled();
    let tweets = synthesize_corpus(800, 42)
        .into_iter()
        .map(|t| analyzer.analyze(t).unwrap())
        .collect();
    Arc::new(Store::from_records(tweets, 3).unwrap())
}

fn app() -> Router {
    build_app(Some(store()), &ServerConfig::default()).unwrap()
}

async fn get(app: &Router, uri: &str) -> (StatusCode, String) {
    let request = Request::builder().uri(uri).body(Body::empty()).unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn get_json(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (status, body) = get(app, uri).await;
    (status, serde_json::from_str(&body).unwrap())
}

async fn assert_error(app: &Router, uri: &str, status: StatusCode, code: &str) {
    let (got, body) = get_json(app, uri).await;
    assert_eq!(got, status, "{uri}: {body}");
    assert_eq!(body["code"], code, "{uri}");
    assert_eq!(body["status"], status.as_u16());
    assert!(body["message"].as_str().is_some_and(|m| !m.is_empty()));
}

#[tokio::test]
async fn meta_describes_the_store() {
    let app = app();
    let request = Request::builder()
        .uri("/api/meta")
        .body(Body::empty())
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    assert_eq!(response.status(), StatusCode::OK);
    assert_eq!(response.headers()[header::CONTENT_TYPE], "application/json");

    let (_, meta) = get_json(&app, "/api/meta").await;
    assert_eq!(meta["tweet_count"], 800);
    assert_eq!(meta["rejected_count"], 3);
    assert_eq!(meta["emotions"].as_array().unwrap().len(), 8);
    assert_eq!(meta["polarity_colors"]["positive"], "#2ca02c");
}

#[tokio::test]
async fn every_endpoint_reports_missing_store() {
    let app = build_app(None, &ServerConfig::default()).unwrap();
    for uri in [
        "/api/meta",
        "/api/aggregate",
        "/api/compare?a=CA&b=TX",
        "/api/tweets?value=CA",
    ] {
        assert_error(
            &app,
            uri,
            StatusCode::SERVICE_UNAVAILABLE,
            "store_not_loaded",
        )
        .await;
    }
}

#[tokio::test]
async fn aggregate_body_matches_library_rendering() {
    let store = store();
    let app = build_app(Some(store.clone()), &ServerConfig::default()).unwrap();
    let (status, body) = get(
        &app,
        "/api/aggregate?axis=time&granularity=week&states=CA,NY,TX",
    )
    .await;
    assert_eq!(status, StatusCode::OK);

    let params = Params::new([
        ("axis", "time"),
        ("granularity", "week"),
        ("states", "CA,NY,TX"),
    ])
    .unwrap();
    let expected = query::aggregate_body(&store, &AggregateQuery::parse(&params).unwrap());
    assert_eq!(body, expected);
}

#[tokio::test]
async fn aggregate_by_state_covers_every_tweet() {
    let (status, rows) = get_json(&app(), "/api/aggregate").await;
    assert_eq!(status, StatusCode::OK);
    let rows = rows.as_array().unwrap();
    let total: u64 = rows
        .iter()
        .map(|r| r["tweet_count"].as_u64().unwrap())
        .sum();
    assert_eq!(total, 800);
    let keys: Vec<&str> = rows
        .iter()
        .map(|r| r["key"]["value"].as_str().unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[tokio::test]
async fn drill_down_through_restrict_parameters() {
    let app = app();
    let (_, months) = get_json(
        &app,
        "/api/aggregate?axis=time&granularity=month&restrict_axis=state&restrict_value=CA",
    )
    .await;
    let (_, states) = get_json(&app, "/api/aggregate?states=CA").await;
    let month_total: u64 = months
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["tweet_count"].as_u64().unwrap())
        .sum();
    assert_eq!(month_total, states[0]["tweet_count"].as_u64().unwrap());
}

#[tokio::test]
async fn bad_queries_are_400() {
    let app = app();
    for uri in [
        "/api/aggregate?bogus=1",
        "/api/aggregate?axis=state&axis=time",
        "/api/aggregate?min=0.2",
        "/api/aggregate?emotion=joy&min=0.8&max=0.2",
        "/api/aggregate?emotion=joy&min=1.5",
        "/api/aggregate?axis=time&granularity=year",
        "/api/aggregate?states=ZZ",
        "/api/aggregate?from=2021-03-01&to=2021-02-01",
        "/api/meta?x=1",
        "/api/tweets?value=CA&limit=100000",
    ] {
        assert_error(&app, uri, StatusCode::BAD_REQUEST, "bad_query").await;
    }
}

#[tokio::test]
async fn compare_returns_eight_rows() {
    let (status, body) = get_json(&app(), "/api/compare?a=CA&b=TX").await;
    assert_eq!(status, StatusCode::OK);
    let rows = body["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0]["emotion"], "anger");
    for row in rows {
        let (a, b) = (
            row["score_a"].as_f64().unwrap(),
            row["score_b"].as_f64().unwrap(),
        );
        assert!((row["delta"].as_f64().unwrap() - (a - b).abs()).abs() < 1e-15);
    }
}

#[tokio::test]
async fn compare_errors() {
    let app = app();
    assert_error(
        &app,
        "/api/compare?a=CA&b=ca",
        StatusCode::BAD_REQUEST,
        "same_group",
    )
    .await;
    assert_error(
        &app,
        "/api/compare?a=CA&b=2021-01",
        StatusCode::BAD_REQUEST,
        "axis_mismatch",
    )
    .await;
    assert_error(
        &app,
        "/api/compare?a=CA&b=TX&states=CA",
        StatusCode::NOT_FOUND,
        "unknown_group",
    )
    .await;
    assert_error(
        &app,
        "/api/compare?a=CA",
        StatusCode::BAD_REQUEST,
        "bad_query",
    )
    .await;
}

#[tokio::test]
async fn tweets_are_paged_in_time_order() {
    let app = app();
    let (status, page) = get_json(&app, "/api/tweets?value=CA&limit=5&offset=2").await;
    assert_eq!(status, StatusCode::OK);
    let tweets = page["tweets"].as_array().unwrap();
    assert_eq!(tweets.len(), 5);
    assert_eq!(page["offset"], 2);
    assert!(page["total"].as_u64().unwrap() >= 7);
    let times: Vec<&str> = tweets
        .iter()
        .map(|t| t["created_at"].as_str().unwrap())
        .collect();
    assert!(times.windows(2).all(|w| w[0] <= w[1]));
    assert!(tweets.iter().all(|t| t["state"] == "CA"));

    assert_error(
        &app,
        "/api/tweets?value=2030-01&axis=time&granularity=month",
        StatusCode::NOT_FOUND,
        "unknown_group",
    )
    .await;
}

#[tokio::test]
async fn unknown_route_is_json_404() {
    assert_error(&app(), "/api/nope", StatusCode::NOT_FOUND, "not_found").await;
}

#[tokio::test]
async fn cors_origin_is_configurable() {
    let any = app();
    let request = Request::builder()
        .uri("/api/meta")
        .header(header::ORIGIN, "http://example.org")
        .body(Body::empty())
        .unwrap();
    let response = any.oneshot(request).await.unwrap();
    assert_eq!(response.headers()[header::ACCESS_CONTROL_ALLOW_ORIGIN], "*");

    let config = ServerConfig {
        cors_origin: Some("http://localhost:5173".into()),
    };
    let pinned = build_app(Some(store()), &config).unwrap();
    let request = Request::builder()
        .uri("/api/meta")
        .header(header::ORIGIN, "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let response = pinned.oneshot(request).await.unwrap();
    assert_eq!(
        response.headers()[header::ACCESS_CONTROL_ALLOW_ORIGIN],
        "http://localhost:5173"
    );

    let bad = ServerConfig {
        cors_origin: Some("bad\norigin".into()),
    };
    assert!(build_app(None, &bad).is_err());
}

#[tokio::test]
async fn serves_a_store_opened_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.jsonl");
    write_store(&path, store().tweets(), 0).unwrap();
    let opened = Arc::new(Store::open(&path).unwrap());
    let app = build_app(Some(opened), &ServerConfig::default()).unwrap();
    let (status, meta) = get_json(&app, "/api/meta").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(meta["tweet_count"], 800);
}
