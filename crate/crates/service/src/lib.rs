//! HTTP and WebSocket front end for live paintings.
//!
//! * `POST /sessions` starts a session from `{config?, timeline, time_scale?, duration?}`.
//! * `GET /sessions` lists sessions; `GET /sessions/{id}` adds the config.
//! * `GET /sessions/{id}/painting.png` renders the current canvas.
//! * `DELETE /sessions/{id}` stops and forgets a session.
//! * `GET /sessions/{id}/stream` upgrades to the frame protocol in [`protocol`].

pub mod protocol;
pub mod session;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use musicswarm_core::emotion::Palette;
use musicswarm_core::music::load_timeline;
use musicswarm_core::sim::{SimConfig, SimState};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::broadcast::error::RecvError;

use protocol::{parse_client_frame, Ack, ClientFrame, ServerFrame};
pub use session::{Progress, Session, Status, StreamSettings};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Sessions that may run at once; finished ones do not count.
    pub max_sessions: usize,
    pub stream: StreamSettings,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self { max_sessions: 8, stream: StreamSettings::default() }
    }
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    config: ServiceConfig,
    palette: Palette,
    sessions: Mutex<BTreeMap<u64, Arc<Session>>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self {
            inner: Arc::new(Inner {
                config,
                palette: Palette::default(),
                sessions: Mutex::new(BTreeMap::new()),
                next_id: AtomicU64::new(1),
            }),
        }
    }

    fn session(&self, id: u64) -> Option<Arc<Session>> {
        self.inner.sessions.lock().unwrap().get(&id).cloned()
    }

    /// Stops every session; used on shutdown.
    pub fn shutdown(&self) {
        let sessions: Vec<_> = std::mem::take(&mut *self.inner.sessions.lock().unwrap()).into_values().collect();
        for s in sessions {
            s.stop();
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", get(list_sessions).post(create_session))
        .route("/sessions/{id}", get(session_info).delete(delete_session))
        .route("/sessions/{id}/painting.png", get(painting))
        .route("/sessions/{id}/stream", get(stream))
        .with_state(state)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    #[serde(default)]
    config: SimConfig,
    timeline: serde_json::Value,
    /// Simulated seconds per wall-clock second.
    #[serde(default = "one")]
    time_scale: f64,
    /// Seconds of music to play; the whole timeline by default.
    duration: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Serialize)]
struct SessionSummary {
    id: u64,
    #[serde(flatten)]
    progress: Progress,
    duration: f64,
    time_scale: f64,
}

fn summary(s: &Session) -> SessionSummary {
    SessionSummary { id: s.id, progress: s.progress(), duration: s.duration, time_scale: s.time_scale }
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

fn unknown(id: &str) -> Response {
    error(StatusCode::NOT_FOUND, format!("no session {id}"))
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> Response {
    let request: CreateSession = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("request body: {e}")),
    };
    if !(request.time_scale.is_finite() && request.time_scale > 0.0) {
        return error(StatusCode::UNPROCESSABLE_ENTITY, format!("time_scale {} must be positive", request.time_scale));
    }
    let timeline = match load_timeline(&request.timeline.to_string()) {
        Ok(t) => t,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, format!("timeline: {e}")),
    };
    let duration = request.duration.unwrap_or(timeline.duration);
    if !(duration.is_finite() && duration >= 0.0) {
        return error(StatusCode::UNPROCESSABLE_ENTITY, format!("duration {duration} must be non-negative"));
    }
    let sim = match SimState::new(request.config, timeline, &state.inner.palette) {
        Ok(s) => s,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
    };

    let mut sessions = state.inner.sessions.lock().unwrap();
    let live = sessions.values().filter(|s| s.progress().status != Status::Finished).count();
    if live >= state.inner.config.max_sessions {
        return error(
            StatusCode::TOO_MANY_REQUESTS,
            format!("session limit of {} reached", state.inner.config.max_sessions),
        );
    }
    let id = state.inner.next_id.fetch_add(1, Ordering::Relaxed);
    let session = Session::start(id, sim, duration, request.time_scale, state.inner.config.stream.clone());
    sessions.insert(id, session);
    log::info!("started session {id}");
    (
        StatusCode::CREATED,
        Json(json!({ "id": id, "status": "running", "stream": format!("/sessions/{id}/stream") })),
    )
        .into_response()
}

async fn list_sessions(State(state): State<AppState>) -> Response {
    let sessions = state.inner.sessions.lock().unwrap();
    Json(sessions.values().map(|s| summary(s)).collect::<Vec<_>>()).into_response()
}

async fn session_info(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    match id.parse().ok().and_then(|id| state.session(id)) {
        Some(s) => Json(json!({ "session": summary(&s), "config": s.config })).into_response(),
        None => unknown(&id),
    }
}

async fn delete_session(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    let removed = id.parse().ok().and_then(|n: u64| state.inner.sessions.lock().unwrap().remove(&n));
    match removed {
        Some(s) => {
            let _ = tokio::task::spawn_blocking(move || s.stop()).await;
            StatusCode::NO_CONTENT.into_response()
        }
        None => unknown(&id),
    }
}

async fn painting(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    let Some(session) = id.parse().ok().and_then(|id| state.session(id)) else {
        return unknown(&id);
    };
    match session.painting().await {
        Ok(png) => ([(header::CONTENT_TYPE, "image/png")], png).into_response(),
        Err(e) => error(StatusCode::GONE, e),
    }
}

async fn stream(State(state): State<AppState>, Path(id): Path<String>, upgrade: WebSocketUpgrade) -> Response {
    let session = id.parse().ok().and_then(|id| state.session(id));
    upgrade.on_upgrade(move |socket| serve_stream(socket, session, id))
}

async fn send(socket: &mut WebSocket, text: &str) -> bool {
    socket.send(Message::Text(text.into())).await.is_ok()
}

async fn close_with_error(mut socket: WebSocket, message: String) {
    let _ = send(&mut socket, &ServerFrame::error(message).to_json()).await;
    let _ = socket.send(Message::Close(None)).await;
}

async fn serve_stream(mut socket: WebSocket, session: Option<Arc<Session>>, id: String) {
    let Some(session) = session else {
        return close_with_error(socket, format!("no session {id}")).await;
    };
    let Some(subscription) = session.subscribe().await else {
        return close_with_error(socket, "session closed".into()).await;
    };
    if !send(&mut socket, &subscription.first.to_json()).await {
        return;
    }
    let Some(mut frames) = subscription.frames else {
        let _ = socket.send(Message::Close(None)).await;
        return;
    };

    loop {
        tokio::select! {
            frame = frames.recv() => match frame {
                Ok(text) => {
                    if !send(&mut socket, &text).await {
                        return;
                    }
                }
                Err(RecvError::Lagged(n)) => {
                    log::warn!("session {id}: dropping subscriber {n} frames behind");
                    return close_with_error(socket, format!("subscriber fell {n} frames behind")).await;
                }
                Err(RecvError::Closed) => {
                    let _ = socket.send(Message::Close(None)).await;
                    return;
                }
            },
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Text(text))) => {
                    let reply = match parse_client_frame(&text) {
                        Ok(ClientFrame::Command(wire)) => session.submit(wire).err().map(ServerFrame::error),
                        Err((Some(id), reason)) => Some(ServerFrame::Ack(Ack {
                            id,
                            accepted: false,
                            step: session.progress().step,
                            reason: Some(reason),
                        })),
                        Err((None, reason)) => Some(ServerFrame::error(reason)),
                    };
                    if let Some(frame) = reply {
                        if !send(&mut socket, &frame.to_json()).await {
                            return;
                        }
                    }
                }
                Some(Ok(Message::Binary(_))) => {
                    if !send(&mut socket, &ServerFrame::error("binary frames are not supported").to_json()).await {
                        return;
                    }
                }
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                Some(Ok(_)) => {}
            },
        }
    }
}
