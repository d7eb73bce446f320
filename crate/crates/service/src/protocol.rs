//! JSON frames exchanged on `/sessions/{id}/stream`.

use musicswarm_core::sim::{SimSnapshot, Stamp, UserCommand};
use serde::{Deserialize, Serialize};

/// Client-assigned command id, echoed in the acknowledgement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CommandId {
    Number(u64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireCommand {
    pub id: CommandId,
    pub command: UserCommand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum ClientFrame {
    Command(WireCommand),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotPayload {
    #[serde(flatten)]
    pub state: SimSnapshot,
    /// Discs stamped since the previous snapshot, in deposition order.
    pub stamps: Vec<Stamp>,
    /// Base64 PNG of the canvas after `stamps`, sent every few seconds and
    /// as the first frame of each subscription.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keyframe: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ack {
    pub id: CommandId,
    pub accepted: bool,
    /// Step index at which the command took effect, or the current step for
    /// a rejection.
    pub step: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DonePayload {
    pub step: u64,
    pub clock: f64,
    /// Path of the final painting on this server.
    pub painting: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum ServerFrame {
    Snapshot(Box<SnapshotPayload>),
    Ack(Ack),
    Error(ErrorPayload),
    Done(DonePayload),
}

impl ServerFrame {
    pub fn error(message: impl Into<String>) -> Self {
        ServerFrame::Error(ErrorPayload { message: message.into() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("frames serialize")
    }
}

/// Parses a client text frame. When the frame is malformed but still names
/// an id, the error comes back as a rejection for that id.
pub fn parse_client_frame(text: &str) -> Result<ClientFrame, (Option<CommandId>, String)> {
    serde_json::from_str(text).map_err(|e| {
        let id = serde_json::from_str::<serde_json::Value>(text)
            .ok()
            .and_then(|v| v.get("payload")?.get("id").cloned())
            .and_then(|id| serde_json::from_value(id).ok());
        (id, format!("malformed frame: {e}"))
    })
}
