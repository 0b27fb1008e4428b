//! Line-delimited JSON messages for the public chat.
//!
//! One message per line, fields in the order `type, room, sender, seq,
//! payload`. Unknown fields are ignored on read and never written.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::scenario::ScenarioAnnouncement;
use crate::dh::{ColorSwatch, DhParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageType {
    Join,
    Leave,
    Chat,
    DhParams,
    DhPublic,
    DhDone,
    Scenario,
    Error,
    Ping,
    Pong,
}

/// Server-side helper a joining connection may ask for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BotRole {
    Attacker,
    ScriptedPeer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BotRequest {
    pub role: BotRole,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinPayload {
    /// Room members after this join, filled in by the room.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bot: Option<BotRequest>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatPayload {
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DhPublicPayload {
    pub value: u64,
    pub color: ColorSwatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_seq: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Empty {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Join(JoinPayload),
    Leave,
    Chat(ChatPayload),
    DhParams(DhParams),
    DhPublic(DhPublicPayload),
    DhDone,
    Scenario(Box<ScenarioAnnouncement>),
    Error(ErrorPayload),
    Ping,
    Pong,
}

impl Payload {
    pub fn kind(&self) -> MessageType {
        match self {
            Payload::Join(_) => MessageType::Join,
            Payload::Leave => MessageType::Leave,
            Payload::Chat(_) => MessageType::Chat,
            Payload::DhParams(_) => MessageType::DhParams,
            Payload::DhPublic(_) => MessageType::DhPublic,
            Payload::DhDone => MessageType::DhDone,
            Payload::Scenario(_) => MessageType::Scenario,
            Payload::Error(_) => MessageType::Error,
            Payload::Ping => MessageType::Ping,
            Payload::Pong => MessageType::Pong,
        }
    }

    pub fn chat(text: impl Into<String>) -> Self {
        Payload::Chat(ChatPayload { text: text.into() })
    }

    pub fn error(reason: impl Into<String>, expected_seq: Option<u64>) -> Self {
        Payload::Error(ErrorPayload {
            reason: reason.into(),
            expected_seq,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireMessage {
    pub room: String,
    pub sender: String,
    pub seq: u64,
    pub payload: Payload,
}

#[derive(Debug, Error)]
pub enum WireError {
    #[error("malformed message: {0}")]
    Malformed(#[from] serde_json::Error),
}

impl WireMessage {
    /// A draft with `seq` 0; the room assigns the real sequence number.
    pub fn new(room: impl Into<String>, sender: impl Into<String>, payload: Payload) -> Self {
        Self {
            room: room.into(),
            sender: sender.into(),
            seq: 0,
            payload,
        }
    }

    pub fn kind(&self) -> MessageType {
        self.payload.kind()
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("wire messages serialize")
    }

    pub fn from_line(line: &str) -> Result<Self, WireError> {
        Ok(serde_json::from_str(line.trim_end_matches(['\r', '\n']))?)
    }
}

impl Serialize for WireMessage {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("WireMessage", 5)?;
        st.serialize_field("type", &self.kind())?;
        st.serialize_field("room", &self.room)?;
        st.serialize_field("sender", &self.sender)?;
        st.serialize_field("seq", &self.seq)?;
        match &self.payload {
            Payload::Join(p) => st.serialize_field("payload", p)?,
            Payload::Chat(p) => st.serialize_field("payload", p)?,
            Payload::DhParams(p) => st.serialize_field("payload", p)?,
            Payload::DhPublic(p) => st.serialize_field("payload", p)?,
            Payload::Scenario(p) => st.serialize_field("payload", p)?,
            Payload::Error(p) => st.serialize_field("payload", p)?,
            Payload::Leave | Payload::DhDone | Payload::Ping | Payload::Pong => {
                st.serialize_field("payload", &Empty {})?
            }
        }
        st.end()
    }
}

#[derive(Deserialize)]
struct RawMessage {
    #[serde(rename = "type")]
    kind: MessageType,
    room: String,
    sender: String,
    #[serde(default)]
    seq: u64,
    #[serde(default)]
    payload: Option<serde_json::Value>,
}

impl<'de> Deserialize<'de> for WireMessage {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;

        let raw = RawMessage::deserialize(deserializer)?;
        let body = raw
            .payload
            .unwrap_or_else(|| serde_json::Value::Object(Default::default()));
        fn decode<T: serde::de::DeserializeOwned, E: Error>(v: serde_json::Value) -> Result<T, E> {
            serde_json::from_value(v).map_err(E::custom)
        }
        let payload = match raw.kind {
            MessageType::Join => Payload::Join(decode(body)?),
            MessageType::Leave => Payload::Leave,
            MessageType::Chat => Payload::Chat(decode(body)?),
            MessageType::DhParams => Payload::DhParams(decode(body)?),
            MessageType::DhPublic => Payload::DhPublic(decode(body)?),
            MessageType::DhDone => Payload::DhDone,
            MessageType::Scenario => Payload::Scenario(Box::new(decode(body)?)),
            MessageType::Error => Payload::Error(decode(body)?),
            MessageType::Ping => Payload::Ping,
            MessageType::Pong => Payload::Pong,
        };
        Ok(WireMessage {
            room: raw.room,
            sender: raw.sender,
            seq: raw.seq,
            payload,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dh::residue_to_color;

    #[test]
    fn dh_public_line_is_stable() {
        let params = DhParams::new(23, 5).unwrap();
        let msg = WireMessage {
            room: "r1".into(),
            sender: "alice".into(),
            seq: 3,
            payload: Payload::DhPublic(DhPublicPayload {
                value: 4,
                color: residue_to_color(4, &params).unwrap(),
            }),
        };
        assert_eq!(
            msg.to_line(),
            r#"{"type":"dh_public","room":"r1","sender":"alice","seq":3,"payload":{"value":4,"color":{"residue":4,"hue":63,"saturation":80,"lightness":50}}}"#
        );
        assert_eq!(WireMessage::from_line(&msg.to_line()).unwrap(), msg);
    }

    #[test]
    fn unit_payloads_and_unknown_fields() {
        let line = r#"{"type":"leave","room":"r","sender":"bob","seq":9,"payload":{},"extra":true}"#;
        let msg = WireMessage::from_line(line).unwrap();
        assert_eq!(msg.payload, Payload::Leave);
        assert_eq!(
            msg.to_line(),
            r#"{"type":"leave","room":"r","sender":"bob","seq":9,"payload":{}}"#
        );
        let no_payload = WireMessage::from_line(r#"{"type":"ping","room":"","sender":"x"}"#).unwrap();
        assert_eq!(no_payload.payload, Payload::Ping);
        assert_eq!(no_payload.seq, 0);
    }

    #[test]
    fn rejects_malformed() {
        assert!(WireMessage::from_line("not-a-message").is_err());
        assert!(WireMessage::from_line(r#"{"type":"shout","room":"r","sender":"x"}"#).is_err());
        assert!(WireMessage::from_line(r#"{"type":"chat","room":"r","sender":"x","payload":{}}"#).is_err());
        // invalid group parameters never make it past the codec
        assert!(WireMessage::from_line(
            r#"{"type":"dh_params","room":"r","sender":"x","payload":{"p":24,"g":5}}"#
        )
        .is_err());
    }

    #[test]
    fn join_fields_are_optional() {
        let msg = WireMessage::from_line(r#"{"type":"join","room":"r","sender":"a","payload":{}}"#).unwrap();
        assert_eq!(msg.payload, Payload::Join(JoinPayload::default()));
        let bot = WireMessage::new(
            "r",
            "mallory",
            Payload::Join(JoinPayload {
                members: vec![],
                bot: Some(BotRequest {
                    role: BotRole::Attacker,
                    seed: 7,
                }),
            }),
        );
        assert!(bot.to_line().contains(r#""bot":{"role":"attacker","seed":7}"#));
    }
}
