//! Rooms, delivery semantics and transcripts.
//!
//! In broadcast mode every member, the sender included, gets an identical
//! copy: anyone can listen. In relay mode the attacker sees each message
//! first and decides what the other members get.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::wire::{MessageType, Payload, WireMessage};
use crate::dh::DhParams;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelMode {
    Broadcast,
    Relay { attacker: String },
}

impl ChannelMode {
    pub fn attacker(&self) -> Option<&str> {
        match self {
            ChannelMode::Broadcast => None,
            ChannelMode::Relay { attacker } => Some(attacker),
        }
    }
}

/// What the attacker does with an intercepted message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Forward,
    /// Deliver this payload instead, still under the original sender's name.
    Substitute(Payload),
    Drop,
}

/// Whoever sits in the middle of a relay room.
pub trait Interceptor {
    fn intercept(&mut self, message: &WireMessage) -> Decision;
}

/// Forwards everything untouched.
pub struct PassThrough;

impl Interceptor for PassThrough {
    fn intercept(&mut self, _: &WireMessage) -> Decision {
        Decision::Forward
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChannelError {
    #[error("{0} is not a member of this room")]
    NotMember(String),
    #[error("name {0} is already taken in this room")]
    NameTaken(String),
    #[error("stale sequence number {got}, expected {expected}")]
    StaleSeq { got: u64, expected: u64 },
    #[error("message is for room {got}, not {expected}")]
    WrongRoom { got: String, expected: String },
    #[error("public value {value} is outside [1, {p})")]
    PublicOutOfRange { value: u64, p: u64 },
    #[error("{0:?} messages are not room traffic")]
    NotRoomTraffic(MessageType),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    pub recipient: String,
    pub message: WireMessage,
}

/// One transcript line: the message as the other members got it, plus the
/// original when the attacker changed or dropped it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    #[serde(flatten)]
    pub message: WireMessage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original: Option<WireMessage>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dropped: bool,
    /// Wall-clock metadata, excluded from golden comparisons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<String>,
}

impl TranscriptEntry {
    pub fn seq(&self) -> u64 {
        self.message.seq
    }

    /// The message as its sender wrote it.
    pub fn sent(&self) -> &WireMessage {
        self.original.as_ref().unwrap_or(&self.message)
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("transcript entries serialize")
    }
}

/// Append-only record of everything a room delivered, in seq order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SessionTranscript {
    entries: Vec<TranscriptEntry>,
}

impl SessionTranscript {
    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn push(&mut self, entry: TranscriptEntry) {
        self.entries.push(entry);
    }

    pub fn to_lines(&self) -> String {
        self.entries.iter().map(|e| e.to_line() + "\n").collect()
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        let entries = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        Ok(Self { entries })
    }

    /// Messages `name` received, in order, under the delivery rules of `mode`.
    pub fn view_of(&self, name: &str, mode: &ChannelMode) -> Vec<WireMessage> {
        let is_attacker = mode.attacker() == Some(name);
        let mut member = false;
        let mut out = Vec::new();
        for entry in &self.entries {
            let sent = entry.sent();
            if sent.sender == name && sent.kind() == MessageType::Join {
                member = true;
            }
            if member {
                if is_attacker || sent.sender == name {
                    out.push(sent.clone());
                } else if !entry.dropped {
                    out.push(entry.message.clone());
                }
            }
            if sent.sender == name && sent.kind() == MessageType::Leave {
                member = false;
            }
        }
        out
    }
}

/// State of one room, owned by exactly one executor.
#[derive(Debug, Clone)]
pub struct RoomState {
    name: String,
    mode: ChannelMode,
    members: Vec<String>,
    last_seq: u64,
    params: Option<DhParams>,
    transcript: SessionTranscript,
}

impl RoomState {
    pub fn new(name: impl Into<String>, mode: ChannelMode) -> Self {
        Self {
            name: name.into(),
            mode,
            members: Vec::new(),
            last_seq: 0,
            params: None,
            transcript: SessionTranscript::default(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mode(&self) -> &ChannelMode {
        &self.mode
    }

    pub fn members(&self) -> &[String] {
        &self.members
    }

    pub fn is_member(&self, name: &str) -> bool {
        self.members.iter().any(|m| m == name)
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    pub fn next_seq(&self) -> u64 {
        self.last_seq + 1
    }

    pub fn params(&self) -> Option<DhParams> {
        self.params
    }

    pub fn transcript(&self) -> &SessionTranscript {
        &self.transcript
    }

    /// Stamps a draft with this room's name and next sequence number.
    pub fn stamp(&self, mut draft: WireMessage) -> WireMessage {
        draft.room = self.name.clone();
        draft.seq = self.next_seq();
        draft
    }
}

/// Delivers one message through the room and records it.
///
/// `message.seq` must be exactly one past the room's last sequence number.
/// A `join` admits its sender (and gets the member list filled in); every
/// other message must come from a member. In relay mode the attacker is
/// asked for a [`Decision`] on every message it did not send itself; the
/// attacker and the sender see the original, everyone else the decision's
/// outcome. On error nothing changes.
pub fn channel_deliver(
    room: &mut RoomState,
    mut message: WireMessage,
    interceptor: &mut dyn Interceptor,
) -> Result<Vec<Delivery>, ChannelError> {
    if message.room != room.name {
        return Err(ChannelError::WrongRoom {
            got: message.room,
            expected: room.name.clone(),
        });
    }
    if message.seq != room.next_seq() {
        return Err(ChannelError::StaleSeq {
            got: message.seq,
            expected: room.next_seq(),
        });
    }
    match &mut message.payload {
        Payload::Join(join) => {
            if room.is_member(&message.sender) {
                return Err(ChannelError::NameTaken(message.sender));
            }
            join.members = room.members.clone();
            join.members.push(message.sender.clone());
        }
        Payload::Error(_) | Payload::Ping | Payload::Pong | Payload::Scenario(_) => {
            return Err(ChannelError::NotRoomTraffic(message.kind()));
        }
        _ if !room.is_member(&message.sender) => {
            return Err(ChannelError::NotMember(message.sender));
        }
        Payload::DhPublic(public) => {
            if let Some(params) = room.params {
                if public.value < 1 || public.value >= params.p() {
                    return Err(ChannelError::PublicOutOfRange {
                        value: public.value,
                        p: params.p(),
                    });
                }
            }
        }
        _ => {}
    }

    if let Payload::Join(_) = message.payload {
        room.members.push(message.sender.clone());
    }
    if let Payload::DhParams(params) = message.payload {
        room.params = Some(params);
    }

    let attacker = room
        .mode
        .attacker()
        .filter(|a| *a != message.sender && room.is_member(a))
        .map(str::to_string);
    let decision = match &attacker {
        Some(_) => interceptor.intercept(&message),
        None => Decision::Forward,
    };

    let mut deliveries = Vec::with_capacity(room.members.len());
    let mut entry = TranscriptEntry {
        message: message.clone(),
        original: None,
        dropped: false,
        wall_time: None,
    };
    match (&attacker, decision) {
        (None, _) | (Some(_), Decision::Forward) => {
            for m in &room.members {
                deliveries.push(Delivery {
                    recipient: m.clone(),
                    message: message.clone(),
                });
            }
        }
        (Some(attacker), decision) => {
            let forwarded = match decision {
                Decision::Substitute(payload) => {
                    let mut changed = message.clone();
                    changed.payload = payload;
                    entry.message = changed.clone();
                    Some(changed)
                }
                _ => {
                    entry.dropped = true;
                    None
                }
            };
            entry.original = Some(message.clone());
            deliveries.push(Delivery {
                recipient: attacker.clone(),
                message: message.clone(),
            });
            for m in room.members.iter().filter(|m| *m != attacker) {
                if *m == message.sender {
                    deliveries.push(Delivery {
                        recipient: m.clone(),
                        message: message.clone(),
                    });
                } else if let Some(f) = &forwarded {
                    deliveries.push(Delivery {
                        recipient: m.clone(),
                        message: f.clone(),
                    });
                }
            }
        }
    }

    if let Payload::Leave = message.payload {
        room.members.retain(|m| *m != message.sender);
    }
    room.last_seq = message.seq;
    room.transcript.push(entry);
    Ok(deliveries)
}
