//! Hosts classroom rooms over a line-delimited JSON protocol, on plain TCP
//! and on WebSocket (one message per text frame).
//!
//! Each room has one executor that owns its state, runs its bots and
//! appends every delivered message to `<transcript_dir>/<room>-<date>.log`.

pub mod client;
pub mod codec;
pub mod config;
pub mod link;
mod net;
mod room;

pub use config::{BotSpec, RoomConfig, ServerConfig};
pub use link::ClientParams;
pub use net::{serve, start, ServerHandle};
pub use room::RoomSnapshot;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("config: {0}")]
    Config(String),
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(std::io::Error),
    #[error("no such room {0}")]
    NoSuchRoom(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("server stopped")]
    Stopped,
}
