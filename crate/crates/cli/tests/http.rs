mod common;

use std::time::Instant;

use axum::http::StatusCode;
use common::{app, call, data, post};
use serde_json::{json, Value};

fn adapted() -> Value {
    serde_json::from_str(&data("klein-zw-adapted.json")).unwrap()
}

fn points_of(cycle: &Value) -> Vec<Value> {
    cycle["points"].as_array().unwrap().iter().map(|p| json!({"re": p["re"], "im": p["im"]})).collect()
}

#[tokio::test]
async fn curve_reports_branch_points_base_and_labels() {
    let app = app();
    let (status, body) = post(&app, "/api/curve", r#"{"model": "klein-zw"}"#).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert!(body["id"].as_str().unwrap().starts_with("c-"));
    assert_eq!(body["sheets"], 7);
    assert_eq!(body["genus"], 3);
    assert_eq!(body["basepoint"], json!({"re": 0.0, "im": 0.0}));
    assert_eq!(body["labels"].as_array().unwrap().len(), 7);
    let finite = body["branch_points"]["finite_points"].as_array().unwrap();
    assert_eq!(finite.len(), 3);
    assert!(finite.iter().all(|b| b["cycle_type"] == json!([7])));

    // same definition, same id
    let (_, again) = post(&app, "/api/curve", r#"{"model": "klein-zw"}"#).await;
    assert_eq!(again["id"], body["id"]);
}

#[tokio::test]
async fn first_a_cycle_lifts_closed_from_sheet_zero() {
    let app = app();
    let file = adapted();
    let a1 = &file["cycles"][0];
    let req = json!({"curve": {"model": "klein-zw"}, "points": points_of(a1), "start_sheet": 0});
    let (status, body) = post(&app, "/api/lift", &req.to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["closes"], true);
    assert_eq!(body["returns_to"], 0);
    let stored: Vec<Value> = a1["points"].as_array().unwrap().iter().map(|p| p["sheet"].clone()).collect();
    assert_eq!(body["sheets"].as_array().unwrap(), &stored);
}

#[tokio::test]
async fn lift_through_a_branch_point_names_the_segment() {
    let app = app();
    let (_, curve) = post(&app, "/api/curve", r#"{"model": "klein-zw"}"#).await;
    let req = json!({
        "curve": curve["id"],
        "points": [{"re": 0.1, "im": 0.05}, {"re": 0.5, "im": 0.0}, {"re": 1.5, "im": 0.0}, {"re": 0.5, "im": 0.4}],
        "start_sheet": 2,
    });
    let (status, body) = post(&app, "/api/lift", &req.to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
    assert_eq!(body["error"], "branch_point");
    assert_eq!(body["segment"], 1);
    assert_eq!(body["sheets"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn adapted_basis_checks_canonical() {
    let app = app();
    let (status, body) = post(&app, "/api/basis-check", &json!({"cycles": adapted()}).to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["canonical"], true);
    let j = json!([
        [0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 1],
        [-1, 0, 0, 0, 0, 0],
        [0, -1, 0, 0, 0, 0],
        [0, 0, -1, 0, 0, 0]
    ]);
    assert_eq!(body["intersection_matrix"], j);
}

#[tokio::test]
async fn single_cycle_gives_one_by_one_zero_matrix() {
    let app = app();
    let mut file = adapted();
    file["cycles"] = json!([file["cycles"][0].clone()]);
    let (status, body) = post(&app, "/api/basis-check", &json!({"cycles": file}).to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["intersection_matrix"], json!([[0]]));
    assert_eq!(body["canonical"], false);
}

#[tokio::test]
async fn broken_cycle_is_rejected_with_its_segment() {
    let app = app();
    let mut file = adapted();
    file["cycles"][1]["points"][0]["sheet"] = json!(6);
    let (status, body) = post(&app, "/api/basis-check", &json!({"cycles": file}).to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
    assert_eq!(body["error"], "invalid_cycle");
    assert_eq!(body["cycle"], "a2");
    assert!(body["segment"].is_u64(), "{body}");
    assert!(body["vertices"].as_array().unwrap().contains(&json!(0)), "{body}");
}

#[tokio::test]
async fn registered_cycle_sets_are_addressed_by_id() {
    let app = app();
    let (status, set) = post(&app, "/api/cycles", &adapted().to_string()).await;
    assert_eq!(status, StatusCode::OK, "{set}");
    assert!(set["validation"].as_array().unwrap().iter().all(|v| v["valid"] == true));
    let id = set["id"].clone();
    for (pair, want) in [(["a1", "b1"], 1), (["b1", "a1"], -1), (["a1", "a1"], 0), (["a2", "b3"], 0)] {
        let (status, body) = post(&app, "/api/intersect", &json!({"cycles": id, "pair": pair}).to_string()).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        assert_eq!(body["intersection"], want, "{pair:?}");
    }
    let (status, body) = post(&app, "/api/intersect", &json!({"cycles": id, "pair": ["a1", "zz"]}).to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "unknown_cycle");
}

#[tokio::test]
async fn loops_with_disjoint_projections_do_not_meet() {
    let app = app();
    let curve = json!({"polynomial": "y^2 - x*(x-1)*(x-2)", "basepoint": {"re": 1.0, "im": 1.0}});
    let circle = |c: f64| -> Vec<Value> {
        (0..32)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * (k % 16) as f64 / 16.0;
                json!({"re": c + 0.3 * t.cos(), "im": 0.3 * t.sin()})
            })
            .collect()
    };
    let mut cycles = Vec::new();
    for (name, c) in [("left", 0.0), ("right", 2.0)] {
        let pts = circle(c);
        let (status, lifted) =
            post(&app, "/api/lift", &json!({"curve": curve, "points": pts, "start_sheet": 0}).to_string()).await;
        assert_eq!(status, StatusCode::OK, "{lifted}");
        assert_eq!(lifted["closes"], true);
        let points: Vec<Value> = pts
            .iter()
            .zip(lifted["sheets"].as_array().unwrap())
            .map(|(p, s)| json!({"re": p["re"], "im": p["im"], "sheet": s}))
            .collect();
        cycles.push(json!({"name": name, "points": points}));
    }
    let file = json!({"curve": curve["polynomial"], "basepoint": curve["basepoint"], "cycles": cycles});
    let (status, body) =
        post(&app, "/api/intersect", &json!({"cycles": file, "pair": ["left", "right"]}).to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["intersection"], 0);
}

#[tokio::test]
async fn transform_between_models_is_symplectic() {
    let app = app();
    let rl: Value = serde_json::from_str(&data("klein-ts-rauch-lewittes.json")).unwrap();
    let (status, body) = post(&app, "/api/transform", &json!({"src": adapted(), "dst": rl}).to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let m: Vec<Vec<i64>> = serde_json::from_value(body["matrix"].clone()).unwrap();
    let m = nalgebra::DMatrix::from_fn(6, 6, |i, j| m[i][j]);
    let j = periodlab::linalg::j_matrix(3);
    assert_eq!(&m * &j * m.transpose(), j);
}

#[tokio::test]
async fn periods_reproduce_the_closed_form() {
    let app = app();
    let (status, body) = post(&app, "/api/periods", &json!({"cycles": adapted()}).to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let tau = &body["tau"];
    let e = ((-1.0f64) / 4.0, 7f64.sqrt() / 4.0);
    for i in 0..3 {
        for k in 0..3 {
            let (re, im) = if i == k { e } else { (0.5, 0.0) };
            let z = &tau[i][k];
            assert!(
                (z["re"].as_f64().unwrap() - re).abs() < 1e-8 && (z["im"].as_f64().unwrap() - im).abs() < 1e-8,
                "{z}"
            );
        }
    }
    assert_eq!(body["diagnostics"]["riemann"]["passed"], true);
}

#[tokio::test]
async fn reference_data_lists_every_transform() {
    let app = app();
    let (status, text) = call(&app, "GET", "/api/klein/reference", "").await;
    assert_eq!(status, StatusCode::OK);
    let body: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(body["transforms"].as_array().unwrap().len(), 6);
    assert_eq!(body["symmetries"].as_array().unwrap().len(), 4);
    assert_eq!(body["tau_adapted"].as_array().unwrap().len(), 3);
}

#[tokio::test]
async fn malformed_requests_get_machine_readable_reasons() {
    let app = app();
    let cases = [
        ("/api/curve", "{", "invalid_json"),
        ("/api/curve", r#"{"model": "klein-zw", "colour": 1}"#, "invalid_request"),
        ("/api/curve", r#"{"model": "klein-abc"}"#, "unknown_model"),
        ("/api/curve", r#"{"polynomial": "y^2 - (x"}"#, "parse_error"),
        ("/api/curve", r#"{}"#, "invalid_request"),
        ("/api/lift", r#"{"curve": "c-0000", "points": [], "start_sheet": 0}"#, "unknown_curve"),
        ("/api/intersect", r#"{"cycles": "s-0000", "pair": ["a", "b"]}"#, "unknown_cycle_set"),
        (
            "/api/lift",
            r#"{"curve": {"model": "klein-zw"}, "points": [{"re": 0.5, "im": 0.5}], "start_sheet": 9}"#,
            "sheet_index",
        ),
    ];
    for (path, body, reason) in cases {
        let (status, resp) = post(&app, path, body).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{path} {body}: {resp}");
        assert_eq!(resp["error"], reason, "{path} {body}: {resp}");
        assert!(resp["message"].is_string());
    }
    let plain = json!({"curve": "y^2 - x*(x-1)*(x-2)", "basepoint": {"re": 1.0, "im": 1.0}, "cycles": []});
    let (status, resp) = post(&app, "/api/periods", &json!({"cycles": plain}).to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(resp["error"], "differentials_required");
    let (status, resp) = post(&app, "/api/periods", &json!({"cycles": adapted(), "tol": -1.0}).to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(resp["error"], "invalid_tolerance");
    let (status, _) = call(&app, "GET", "/api/nowhere", "").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn lifts_are_served_while_periods_run() {
    let app = app();
    let (_, curve) = post(&app, "/api/curve", r#"{"model": "klein-zw"}"#).await;
    let slow = {
        let app = app.clone();
        let req = json!({"cycles": adapted(), "tol": 1e-13}).to_string();
        tokio::spawn(async move { post(&app, "/api/periods", &req).await })
    };
    tokio::time::sleep(std::time::Duration::from_millis(20)).await;
    let start = Instant::now();
    let req =
        json!({"curve": curve["id"], "points": [{"re": 0.2, "im": 0.1}, {"re": 0.3, "im": 0.2}], "start_sheet": 1});
    let (status, _) = post(&app, "/api/lift", &req.to_string()).await;
    let lift_time = start.elapsed();
    assert_eq!(status, StatusCode::OK);
    assert!(!slow.is_finished(), "periods finished before the lift ({lift_time:?}); test is not exercising overlap");
    let (status, body) = slow.await.unwrap();
    assert_eq!(status, StatusCode::OK, "{body}");
}
