//! JSON over HTTP. Every computation runs on the blocking pool so slow
//! period integrations never hold up lifts or intersections.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::api;
use crate::error::ApiError;
use crate::session::Session;

fn json(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error_response(e: &ApiError) -> Response {
    json(StatusCode::from_u16(e.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR), api::payload(e))
}

async fn respond<Req, Resp, F>(session: Arc<Session>, body: Bytes, op: F) -> Response
where
    Req: DeserializeOwned + Send + 'static,
    Resp: Serialize + Send + 'static,
    F: FnOnce(&Session, Req) -> Result<Resp, ApiError> + Send + 'static,
{
    let req = match api::parse_request::<Req>(&body) {
        Ok(r) => r,
        Err(e) => return error_response(&e),
    };
    let done = tokio::task::spawn_blocking(move || op(&session, req).map(|r| api::payload(&r))).await;
    match done {
        Ok(Ok(body)) => json(StatusCode::OK, body),
        Ok(Err(e)) => error_response(&e),
        Err(e) => error_response(&ApiError::internal(format!("worker failed: {e}"))),
    }
}

macro_rules! endpoint {
    ($name:ident, $op:expr) => {
        async fn $name(State(s): State<Arc<Session>>, body: Bytes) -> Response {
            respond(s, body, $op).await
        }
    };
}

endpoint!(curve, api::curve);
endpoint!(monodromy, api::monodromy);
endpoint!(lift, api::lift_path);
endpoint!(cycles, api::load_cycles);
endpoint!(intersect, api::intersect);
endpoint!(basis_check, api::basis_check);
endpoint!(transform, api::transform);
endpoint!(periods, api::periods);
endpoint!(klein_verify, |_: &Session, req| api::klein_verify(req));

async fn klein_reference() -> Response {
    match tokio::task::spawn_blocking(|| api::payload(&api::klein_reference())).await {
        Ok(body) => json(StatusCode::OK, body),
        Err(e) => error_response(&ApiError::internal(e.to_string())),
    }
}

async fn not_found() -> Response {
    error_response(&ApiError { status: 404, ..ApiError::bad_request("not_found", "no such endpoint") })
}

pub fn router(session: Arc<Session>) -> Router {
    Router::new()
        .route("/api/curve", post(curve))
        .route("/api/monodromy", post(monodromy))
        .route("/api/lift", post(lift))
        .route("/api/cycles", post(cycles))
        .route("/api/intersect", post(intersect))
        .route("/api/basis-check", post(basis_check))
        .route("/api/transform", post(transform))
        .route("/api/periods", post(periods))
        .route("/api/klein/reference", get(klein_reference))
        .route("/api/klein/verify", post(klein_verify))
        .fallback(not_found)
        .with_state(session)
}

pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("periodlab listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(Session::new()))).await
}
