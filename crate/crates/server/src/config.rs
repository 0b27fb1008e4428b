use std::collections::HashSet;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use cryptopath_core::channel::{BotRole, ChannelMode, PeerRole, ScenarioConfig};
use cryptopath_core::dh::DhParams;
use serde::{Deserialize, Serialize};

use crate::ServerError;

/// Overrides the port of `listen`.
pub const PORT_ENV: &str = "CRYPTOPATH_PORT";
/// Overrides the port of `ws_listen`.
pub const WS_PORT_ENV: &str = "CRYPTOPATH_WS_PORT";

pub const DEFAULT_LISTEN: &str = "127.0.0.1:7878";

fn default_listen() -> String {
    DEFAULT_LISTEN.to_string()
}

fn default_transcripts() -> PathBuf {
    PathBuf::from("transcripts")
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerConfig {
    #[serde(default = "default_listen")]
    pub listen: String,
    /// WebSocket binding of the same line protocol; off when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ws_listen: Option<String>,
    pub rooms: Vec<RoomConfig>,
    #[serde(default = "default_transcripts")]
    pub transcript_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Record wall-clock time next to each transcript line.
    #[serde(default = "default_true")]
    pub wall_clock: bool,
    /// Fixed `YYYY-MM-DD` for transcript file names instead of today.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomConfig {
    pub name: String,
    #[serde(default = "broadcast")]
    pub mode: ChannelMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<PathBuf>,
    /// Pairs of students who work together. When non-empty, only listed
    /// names (plus bots and the attacker) may join.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairings: Vec<[String; 2]>,
    /// Bots started together with the room.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bots: Vec<BotSpec>,
    /// Parameters a scripted peer proposes.
    #[serde(default)]
    pub params: DhParams,
}

fn broadcast() -> ChannelMode {
    ChannelMode::Broadcast
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BotSpec {
    pub role: BotRole,
    pub name: String,
    /// Derived from the server seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Whom a scripted peer exchanges with; its pairing partner by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peer: Option<String>,
    /// A scripted peer proposes parameters and opens by default.
    #[serde(default = "initiator")]
    pub side: PeerRole,
}

fn initiator() -> PeerRole {
    PeerRole::Initiator
}

impl BotSpec {
    pub fn attacker(name: impl Into<String>, seed: Option<u64>) -> Self {
        Self {
            role: BotRole::Attacker,
            name: name.into(),
            seed,
            peer: None,
            side: PeerRole::Initiator,
        }
    }

    pub fn peer(name: impl Into<String>, seed: u64, peer: impl Into<String>) -> Self {
        Self {
            role: BotRole::ScriptedPeer,
            name: name.into(),
            seed: Some(seed),
            peer: Some(peer.into()),
            side: PeerRole::Initiator,
        }
    }
}

impl RoomConfig {
    pub fn new(name: impl Into<String>, mode: ChannelMode) -> Self {
        Self {
            name: name.into(),
            mode,
            scenario: None,
            pairings: Vec::new(),
            bots: Vec::new(),
            params: DhParams::default(),
        }
    }

    pub fn partner_of(&self, name: &str) -> Option<&str> {
        self.pairings.iter().find_map(|[a, b]| match name {
            n if n == a => Some(b.as_str()),
            n if n == b => Some(a.as_str()),
            _ => None,
        })
    }

    pub fn admits(&self, name: &str) -> bool {
        self.pairings.is_empty()
            || self.partner_of(name).is_some()
            || self.mode.attacker() == Some(name)
            || self.bots.iter().any(|b| b.name == name)
    }
}

impl ServerConfig {
    pub fn new(rooms: Vec<RoomConfig>) -> Self {
        Self {
            listen: default_listen(),
            ws_listen: None,
            rooms,
            transcript_dir: default_transcripts(),
            seed: 0,
            wall_clock: true,
            date: None,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ServerError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ServerError::Config(format!("{}: {e}", path.display())))?;
        let mut config: Self = serde_json::from_str(&text).map_err(|e| ServerError::Config(format!("{}: {e}", path.display())))?;
        // scenario paths are relative to the config file
        if let Some(dir) = path.parent() {
            for room in &mut config.rooms {
                if let Some(s) = &mut room.scenario {
                    if s.is_relative() {
                        *s = dir.join(&*s);
                    }
                }
            }
        }
        config.validate()?;
        Ok(config)
    }

    /// Applies the port environment overrides.
    pub fn with_env(mut self) -> Result<Self, ServerError> {
        if let Ok(port) = std::env::var(PORT_ENV) {
            self.listen = replace_port(&self.listen, &port)?;
        }
        if let (Ok(port), Some(ws)) = (std::env::var(WS_PORT_ENV), &self.ws_listen) {
            self.ws_listen = Some(replace_port(ws, &port)?);
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ServerError> {
        let bad = |m: String| Err(ServerError::Config(m));
        let mut names = HashSet::new();
        for room in &self.rooms {
            if room.name.is_empty() {
                return bad("room names must not be empty".into());
            }
            if !names.insert(&room.name) {
                return bad(format!("room {} is configured twice", room.name));
            }
            if let Some(path) = &room.scenario {
                ScenarioConfig::load(path).map_err(|e| ServerError::Config(e.to_string()))?;
            }
            let mut bots = HashSet::new();
            for bot in &room.bots {
                if !bots.insert(&bot.name) {
                    return bad(format!("bot {} appears twice in room {}", bot.name, room.name));
                }
                if bot.role == BotRole::Attacker && room.mode.attacker() != Some(bot.name.as_str()) {
                    return bad(format!(
                        "attacker bot {} needs room {} in relay mode with it as attacker",
                        bot.name, room.name
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn room(&self, name: &str) -> Option<&RoomConfig> {
        self.rooms.iter().find(|r| r.name == name)
    }
}

fn replace_port(addr: &str, port: &str) -> Result<String, ServerError> {
    let port: u16 = port
        .parse()
        .map_err(|_| ServerError::Config(format!("port override {port:?} is not a port number")))?;
    let mut sock: SocketAddr = addr
        .parse()
        .map_err(|_| ServerError::Config(format!("{addr} is not an address")))?;
    sock.set_port(port);
    Ok(sock.to_string())
}

/// Seed for a bot without one: a mix of the server seed, room and name.
pub fn derive_seed(server_seed: u64, room: &str, name: &str) -> u64 {
    // FNV-1a, stable across platforms and releases
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ server_seed;
    for b in room.bytes().chain([0]).chain(name.bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}
