//! The one codec both bindings use: a TCP line or a WebSocket text frame
//! carries exactly one message.

use cryptopath_core::channel::{Payload, WireMessage};

/// Sender name on everything the server itself says.
pub const SERVER_NAME: &str = "server";

pub fn encode(message: &WireMessage) -> String {
    message.to_line()
}

/// Decodes one line; blank lines are not messages either.
pub fn decode(line: &str) -> Result<WireMessage, String> {
    let line = line.trim_end_matches(['\r', '\n']);
    if line.trim().is_empty() {
        return Err("malformed message: empty line".into());
    }
    WireMessage::from_line(line).map_err(|e| e.to_string())
}

pub fn server_error(room: &str, seq: u64, reason: impl Into<String>, expected_seq: Option<u64>) -> WireMessage {
    WireMessage {
        room: room.to_string(),
        sender: SERVER_NAME.to_string(),
        seq,
        payload: Payload::error(reason, expected_seq),
    }
}

pub fn pong(room: &str) -> WireMessage {
    WireMessage::new(room, SERVER_NAME, Payload::Pong)
}
