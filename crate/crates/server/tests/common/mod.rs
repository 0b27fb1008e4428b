#![allow(dead_code)]

use std::path::Path;

use cryptopath_core::channel::{Autopilot, PeerRole, SessionTranscript, TranscriptEntry, WireMessage};
use cryptopath_core::dh::{residue_to_color, DhParams};
use cryptopath_server::client::{drive, run_scripted_peer, LineClient};
use cryptopath_server::{ServerConfig, ServerHandle};
use serde_json::Value;

pub const SEED_A: u64 = 1_234;
pub const SEED_B: u64 = 5_678;

pub fn config(dir: &Path, rooms: Vec<cryptopath_server::RoomConfig>) -> ServerConfig {
    let mut c = ServerConfig::new(rooms);
    c.listen = "127.0.0.1:0".into();
    c.ws_listen = Some("127.0.0.1:0".into());
    c.transcript_dir = dir.to_path_buf();
    c.seed = 42;
    c.date = Some("2024-03-05".into());
    c
}

pub fn pilots(room: &str, params: DhParams) -> (Autopilot, Autopilot) {
    (
        Autopilot::new(PeerRole::Initiator, "alice", room, params, SEED_A).with_peer("bob"),
        Autopilot::new(PeerRole::Responder, "bob", room, params, SEED_B).with_peer("alice"),
    )
}

/// Two scripted clients play a full exchange over TCP, then leave one after
/// the other.
pub async fn scripted_pair(server: &ServerHandle, room: &str, params: DhParams) -> (Autopilot, Autopilot) {
    let (a, b) = pilots(room, params);
    let mut ca = LineClient::connect(server.local_addr()).await.unwrap();
    let echo = ca.join(room, "alice").await.unwrap();
    let alice = tokio::spawn(async move {
        let (pilot, _) = drive(&mut ca, a, vec![echo]).await.unwrap();
        (pilot, ca)
    });
    let mut cb = LineClient::connect(server.local_addr()).await.unwrap();
    let (bob, _) = run_scripted_peer(&mut cb, b).await.unwrap();
    let (alice, mut ca) = alice.await.unwrap();
    ca.leave(room, "alice").await.unwrap();
    cb.leave(room, "bob").await.unwrap();
    (alice, bob)
}

/// The transcript text with wall-clock metadata removed.
pub fn without_wall_time(text: &str) -> String {
    text.lines()
        .map(|l| {
            let mut e: TranscriptEntry = serde_json::from_str(l).unwrap();
            e.wall_time = None;
            e.to_line() + "\n"
        })
        .collect()
}

fn numbers(v: &Value, out: &mut Vec<(String, u64)>, key: &str) {
    match v {
        Value::Number(n) => out.extend(n.as_u64().map(|n| (key.to_string(), n))),
        Value::Array(a) => a.iter().for_each(|x| numbers(x, out, key)),
        Value::Object(o) => {
            for (k, x) in o {
                assert!(!k.contains("secret"), "field {k} in transcript");
                // swatch fields are derived from the public value, checked below
                if k != "color" {
                    numbers(x, out, k);
                }
            }
        }
        _ => {}
    }
}

/// Fails if a secret can be read off the transcript: no field may be named
/// after one, every `value` must be one of the exchanged public values, no
/// other number may equal a secret, and every swatch must be the color of
/// its own public value.
pub fn assert_no_secret(text: &str, params: DhParams, secrets: &[u64], publics: &[u64]) {
    scan(text, params, secrets, Some(publics));
}

/// Stricter: no number other than a sequence number equals a secret at all.
pub fn assert_secrets_absent(text: &str, params: DhParams, secrets: &[u64]) {
    scan(text, params, secrets, None);
}

fn scan(text: &str, params: DhParams, secrets: &[u64], publics: Option<&[u64]>) {
    let transcript = SessionTranscript::parse(text).unwrap();
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        let mut found = Vec::new();
        numbers(&v, &mut found, "");
        for (key, n) in found {
            match (key.as_str(), publics) {
                ("seq", _) => continue,
                ("value", Some(publics)) => {
                    assert!(publics.contains(&n), "value {n} is not a public value in {line}")
                }
                _ => assert!(!secrets.contains(&n), "secret {n} appears as {key} in {line}"),
            }
        }
    }
    for e in transcript.entries() {
        for m in std::iter::once(&e.message).chain(&e.original) {
            if let cryptopath_core::channel::Payload::DhPublic(p) = &m.payload {
                assert_eq!(p.color, residue_to_color(p.value, &params).unwrap());
            }
        }
    }
}

pub fn kinds(view: &[WireMessage]) -> Vec<String> {
    view.iter().map(|m| format!("{:?}", m.kind())).collect()
}
