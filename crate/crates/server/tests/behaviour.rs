mod common;

use std::time::Duration;

use common::*;
use cryptopath_core::channel::{
    Autopilot, BotRequest, BotRole, ChannelMode, JoinPayload, MessageType, Payload, PeerRole,
    WireMessage,
};
use cryptopath_core::dh::DhParams;
use cryptopath_server::client::{drive, run_scripted_peer, LineClient};
use cryptopath_server::{BotSpec, RoomConfig, ServerError};

const WAIT: Duration = Duration::from_secs(5);

fn relay(name: &str) -> RoomConfig {
    RoomConfig::new(
        name,
        ChannelMode::Relay {
            attacker: "mallory".into(),
        },
    )
}

fn error_reason(m: &WireMessage) -> &str {
    match &m.payload {
        Payload::Error(e) => &e.reason,
        other => panic!("expected an error, got {other:?}"),
    }
}

#[tokio::test]
async fn chat_is_echoed_to_its_sender() {
    let dir = tempfile::tempdir().unwrap();
    let server = cryptopath_server::start(config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]))
        .await
        .unwrap();
    let mut c = LineClient::connect(server.local_addr()).await.unwrap();
    let join = c.join("r", "ana").await.unwrap();
    assert_eq!(join.seq, 1);
    c.send(&WireMessage::new("r", "ana", Payload::chat("hi"))).await.unwrap();
    let echo = c.recv_within(WAIT).await.unwrap();
    assert_eq!((echo.seq, echo.payload), (2, Payload::chat("hi")));
}

#[tokio::test]
async fn malformed_line_gets_an_error_and_keeps_the_connection() {
    let dir = tempfile::tempdir().unwrap();
    let server = cryptopath_server::start(config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]))
        .await
        .unwrap();
    let mut c = LineClient::connect(server.local_addr()).await.unwrap();
    c.send_raw("not-a-message").await.unwrap();
    let err = c.recv_within(WAIT).await.unwrap();
    assert!(error_reason(&err).starts_with("malformed message"));

    c.join("r", "ana").await.unwrap();
    c.send_raw("not-a-message").await.unwrap();
    let err = c.recv_within(WAIT).await.unwrap();
    assert!(error_reason(&err).starts_with("malformed message"));
    assert_eq!(err.seq, 1, "seq unchanged");
    c.send(&WireMessage::new("r", "ana", Payload::chat("still here"))).await.unwrap();
    assert_eq!(c.recv_within(WAIT).await.unwrap().seq, 2);
    assert_eq!(server.snapshot("r").await.unwrap().transcript.entries().len(), 2);
}

#[tokio::test]
async fn ping_is_answered_with_pong_before_and_after_joining() {
    let dir = tempfile::tempdir().unwrap();
    let server = cryptopath_server::start(config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]))
        .await
        .unwrap();
    let mut c = LineClient::connect(server.local_addr()).await.unwrap();
    c.send(&WireMessage::new("", "probe", Payload::Ping)).await.unwrap();
    assert_eq!(c.recv_within(WAIT).await.unwrap().kind(), MessageType::Pong);
    c.join("r", "ana").await.unwrap();
    c.send(&WireMessage::new("r", "ana", Payload::Ping)).await.unwrap();
    assert_eq!(c.recv_within(WAIT).await.unwrap().kind(), MessageType::Pong);
    assert_eq!(server.snapshot("r").await.unwrap().last_seq, 1);
}

#[tokio::test]
async fn stale_seq_is_rejected_with_the_expected_one() {
    let dir = tempfile::tempdir().unwrap();
    let server = cryptopath_server::start(config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]))
        .await
        .unwrap();
    let mut c = LineClient::connect(server.local_addr()).await.unwrap();
    c.join("r", "ana").await.unwrap();
    let mut m = WireMessage::new("r", "ana", Payload::chat("late"));
    m.seq = 1;
    c.send(&m).await.unwrap();
    let err = c.recv_within(WAIT).await.unwrap();
    let Payload::Error(e) = err.payload else { panic!() };
    assert_eq!(e.expected_seq, Some(2));
    m.seq = 2;
    c.send(&m).await.unwrap();
    assert_eq!(c.recv_within(WAIT).await.unwrap().seq, 2);
}

#[tokio::test]
async fn connections_speak_only_for_their_own_member() {
    let dir = tempfile::tempdir().unwrap();
    let server = cryptopath_server::start(config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]))
        .await
        .unwrap();
    let mut c = LineClient::connect(server.local_addr()).await.unwrap();
    c.send(&WireMessage::new("r", "ana", Payload::chat("hi"))).await.unwrap();
    assert_eq!(error_reason(&c.recv_within(WAIT).await.unwrap()), "join the room first");
    c.send(&WireMessage::new("nowhere", "ana", Payload::Join(Default::default()))).await.unwrap();
    assert!(error_reason(&c.recv_within(WAIT).await.unwrap()).contains("no such room"));
    c.join("r", "ana").await.unwrap();
    c.send(&WireMessage::new("r", "ben", Payload::chat("hi"))).await.unwrap();
    assert!(error_reason(&c.recv_within(WAIT).await.unwrap()).contains("speaks for ana"));

    let mut d = LineClient::connect(server.local_addr()).await.unwrap();
    assert!(matches!(d.join("r", "ana").await, Err(cryptopath_server::client::ClientError::Refused(r)) if r.contains("taken")));
    d.join("r", "ben").await.unwrap();
}

#[tokio::test]
async fn broadcast_delivers_each_message_to_all_before_the_next() {
    let dir = tempfile::tempdir().unwrap();
    let server = cryptopath_server::start(config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]))
        .await
        .unwrap();
    let names = ["ana", "ben", "cai"];
    let mut clients = Vec::new();
    for n in names {
        let mut c = LineClient::connect(server.local_addr()).await.unwrap();
        c.join("r", n).await.unwrap();
        clients.push(c);
    }
    // the earlier joiners still have the later joins queued
    for (i, c) in clients.iter_mut().enumerate() {
        for _ in i + 1..names.len() {
            c.recv_within(WAIT).await.unwrap();
        }
    }
    let per_client = 20;
    let mut tasks = Vec::new();
    for (c, n) in clients.into_iter().zip(names) {
        tasks.push(tokio::spawn(async move {
            let mut c = c;
            for i in 0..per_client {
                c.send(&WireMessage::new("r", n, Payload::chat(format!("{n}{i}")))).await.unwrap();
            }
            let mut log = Vec::new();
            while log.len() < per_client * names.len() {
                log.push(c.recv_within(WAIT).await.unwrap());
            }
            log
        }));
    }
    let mut logs = Vec::new();
    for t in tasks {
        logs.push(t.await.unwrap());
    }
    for log in &logs {
        assert_eq!(log, &logs[0]);
        assert!(log.windows(2).all(|w| w[1].seq == w[0].seq + 1));
    }
}

#[tokio::test]
async fn attacker_is_refused_in_a_broadcast_room() {
    let dir = tempfile::tempdir().unwrap();
    let server = cryptopath_server::start(config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]))
        .await
        .unwrap();
    let err = server.run_bot("r", BotSpec::attacker("mallory", Some(1))).await.unwrap_err();
    assert!(matches!(&err, ServerError::Refused(r) if r.contains("relay")), "{err}");

    let mut c = LineClient::connect(server.local_addr()).await.unwrap();
    let join = Payload::Join(JoinPayload {
        members: vec![],
        bot: Some(BotRequest {
            role: BotRole::Attacker,
            seed: 9,
        }),
    });
    c.send(&WireMessage::new("r", "mallory", join)).await.unwrap();
    assert!(error_reason(&c.recv_within(WAIT).await.unwrap()).contains("relay mode"));
    assert!(server.snapshot("r").await.unwrap().members.is_empty());
    // the refused connection may still join normally
    c.join("r", "mallory").await.unwrap();
}

#[tokio::test]
async fn scripted_peer_bot_completes_an_honest_exchange() {
    let dir = tempfile::tempdir().unwrap();
    let server = cryptopath_server::start(config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]))
        .await
        .unwrap();
    let mut c = LineClient::connect(server.local_addr()).await.unwrap();
    let join = Payload::Join(JoinPayload {
        members: vec![],
        bot: Some(BotRequest {
            role: BotRole::ScriptedPeer,
            seed: 77,
        }),
    });
    c.send(&WireMessage::new("r", "ana", join)).await.unwrap();
    let pilot = Autopilot::new(PeerRole::Responder, "ana", "r", DhParams::default(), SEED_B).with_peer("ana-bot");
    let (ana, _) = drive(&mut c, pilot, vec![]).await.unwrap();

    let snap = server.snapshot("r").await.unwrap();
    assert_eq!(snap.members, ["ana", "ana-bot"]);
    let bot = &snap.bots[0];
    assert_eq!(bot.shared(), ana.state().shared());
    assert!(ana.state().shared().is_some());
    // the seed in the request never reaches the transcript
    let text = std::fs::read_to_string(&snap.transcript_path).unwrap();
    assert!(!text.contains("\"bot\""));
    assert_no_secret(
        &text,
        DhParams::default(),
        &[bot.keypair().unwrap().secret(), ana.state().keypair().unwrap().secret()],
        &[bot.keypair().unwrap().public_value(), ana.state().public_value().unwrap()],
    );
}

async fn mitm_run(seed: u64) -> (Autopilot, Autopilot, cryptopath_server::RoomSnapshot, String) {
    let dir = tempfile::tempdir().unwrap();
    let mut room = relay("r");
    room.bots.push(BotSpec::attacker("mallory", Some(seed)));
    let server = cryptopath_server::start(config(dir.path(), vec![room])).await.unwrap();
    let (alice, bob) = scripted_pair(&server, "r", DhParams::default()).await;
    let snap = server.snapshot("r").await.unwrap();
    let text = std::fs::read_to_string(&snap.transcript_path).unwrap();
    (alice, bob, snap, text)
}

#[tokio::test]
async fn attacker_bot_ends_up_sharing_each_victims_secret() {
    let mut distinct = 0;
    let runs = 40;
    for seed in 0..runs {
        let (alice, bob, snap, text) = mitm_run(seed as u64).await;
        let mallory = snap.attacker.as_ref().unwrap();
        let a = alice.state().shared().unwrap().value;
        let b = bob.state().shared().unwrap().value;
        assert_eq!(mallory.side_secret("alice"), Some(a), "seed {seed}");
        assert_eq!(mallory.side_secret("bob"), Some(b), "seed {seed}");
        distinct += (a != b) as u32;

        let substituted = snap.transcript.entries().iter().filter(|e| e.original.is_some()).count();
        assert_eq!(substituted, 2, "both public values replaced");
        let mut secrets = vec![
            alice.state().keypair().unwrap().secret(),
            bob.state().keypair().unwrap().secret(),
        ];
        let mut publics = vec![alice.state().public_value().unwrap(), bob.state().public_value().unwrap()];
        for v in ["alice", "bob"] {
            let kp = &mallory.side(v).unwrap().keypair;
            secrets.push(kp.secret());
            publics.push(kp.public_value());
        }
        assert_no_secret(&text, DhParams::default(), &secrets, &publics);
    }
    assert_eq!(distinct, runs);
}

#[tokio::test]
async fn pairings_limit_who_may_join_and_pick_the_bots_peer() {
    let dir = tempfile::tempdir().unwrap();
    let mut room = RoomConfig::new("r", ChannelMode::Broadcast);
    room.pairings.push(["ana".into(), "bob".into()]);
    room.bots.push(BotSpec {
        peer: None,
        ..BotSpec::peer("bob", 3, "unused")
    });
    let server = cryptopath_server::start(config(dir.path(), vec![room])).await.unwrap();
    let mut eve = LineClient::connect(server.local_addr()).await.unwrap();
    assert!(eve.join("r", "eve").await.is_err());

    let mut ana = LineClient::connect(server.local_addr()).await.unwrap();
    let pilot = Autopilot::new(PeerRole::Responder, "ana", "r", DhParams::default(), 8).with_peer("bob");
    let (pilot, _) = run_scripted_peer(&mut ana, pilot).await.unwrap();
    let snap = server.snapshot("r").await.unwrap();
    assert_eq!(snap.bots[0].peer(), Some("ana"));
    assert_eq!(snap.bots[0].shared(), pilot.state().shared());
}

#[tokio::test]
async fn dropped_connection_leaves_and_the_name_can_rejoin() {
    let dir = tempfile::tempdir().unwrap();
    let server = cryptopath_server::start(config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]))
        .await
        .unwrap();
    let mut watcher = LineClient::connect(server.local_addr()).await.unwrap();
    watcher.join("r", "w").await.unwrap();
    let mut c = LineClient::connect(server.local_addr()).await.unwrap();
    c.join("r", "ana").await.unwrap();
    watcher.recv_within(WAIT).await.unwrap();
    drop(c);
    let leave = watcher.recv_within(WAIT).await.unwrap();
    assert_eq!((leave.kind(), leave.sender.as_str()), (MessageType::Leave, "ana"));
    let mut again = LineClient::connect(server.local_addr()).await.unwrap();
    again.join("r", "ana").await.unwrap();
}

#[tokio::test]
async fn scenario_is_announced_to_each_joiner() {
    let dir = tempfile::tempdir().unwrap();
    let mut room = RoomConfig::new("r", ChannelMode::Broadcast);
    room.scenario = Some(std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios/dh.json"));
    let server = cryptopath_server::start(config(dir.path(), vec![room])).await.unwrap();
    let mut c = LineClient::connect(server.local_addr()).await.unwrap();
    c.join("r", "ana").await.unwrap();
    let ann = c.recv_within(WAIT).await.unwrap();
    let Payload::Scenario(s) = ann.payload else { panic!("{ann:?}") };
    assert_eq!(s.name, "dh");
    assert!(s.script.is_some());
    assert_eq!(server.snapshot("r").await.unwrap().transcript.entries().len(), 1);
}

#[tokio::test]
async fn busy_port_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let first = cryptopath_server::start(config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]))
        .await
        .unwrap();
    let mut cfg = config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]);
    cfg.listen = first.local_addr().to_string();
    let err = cryptopath_server::start(cfg).await.err().unwrap();
    assert!(matches!(err, ServerError::Bind { .. }));
    assert!(err.to_string().starts_with("cannot listen on"));
}

#[tokio::test]
async fn port_comes_from_the_environment_when_set() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]);
    cfg.ws_listen = None;
    std::env::set_var(cryptopath_server::config::PORT_ENV, "0");
    cfg.listen = "127.0.0.1:1".into();
    let cfg = cfg.with_env().unwrap();
    std::env::remove_var(cryptopath_server::config::PORT_ENV);
    assert_eq!(cfg.listen, "127.0.0.1:0");
    let server = cryptopath_server::start(cfg).await.unwrap();
    assert_ne!(server.local_addr().port(), 0);
}

#[tokio::test]
async fn websocket_speaks_the_same_protocol() {
    use futures_util::{SinkExt, StreamExt};
    use tokio_tungstenite::tungstenite::Message;

    let dir = tempfile::tempdir().unwrap();
    let server = cryptopath_server::start(config(dir.path(), vec![RoomConfig::new("r", ChannelMode::Broadcast)]))
        .await
        .unwrap();
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{}", server.ws_addr().unwrap()))
        .await
        .unwrap();
    let send = [
        WireMessage::new("r", "ana", Payload::Join(Default::default())).to_line(),
        "not-a-message".to_string(),
        WireMessage::new("r", "ana", Payload::chat("hi")).to_line(),
    ];
    for s in send {
        ws.send(Message::text(s)).await.unwrap();
    }
    let mut got = Vec::new();
    while got.len() < 3 {
        if let Message::Text(t) = ws.next().await.unwrap().unwrap() {
            got.push(cryptopath_server::codec::decode(&t).unwrap());
        }
    }
    assert_eq!(got[0].kind(), MessageType::Join);
    assert!(error_reason(&got[1]).starts_with("malformed"));
    assert_eq!((got[2].seq, &got[2].payload), (2, &Payload::chat("hi")));
}

#[tokio::test]
async fn client_link_leads_a_browser_into_the_room() {
    use futures_util::{SinkExt, StreamExt};
    use tokio_tungstenite::tungstenite::Message;

    let dir = tempfile::tempdir().unwrap();
    let server = cryptopath_server::start(config(dir.path(), vec![RoomConfig::new("pair-3", ChannelMode::Broadcast)]))
        .await
        .unwrap();
    let link = cryptopath_server::ClientParams::for_room(server.ws_addr().unwrap(), "pair-3")
        .with_name("ana")
        .link("http://localhost/dh.html")
        .unwrap();
    // what the page does with its own URL
    let params = cryptopath_server::ClientParams::parse(&link).unwrap();
    let name = params.name.unwrap();
    let (mut ws, _) = tokio_tungstenite::connect_async(params.server).await.unwrap();
    let join = WireMessage::new(&params.room, &name, Payload::Join(Default::default()));
    ws.send(Message::text(join.to_line())).await.unwrap();
    let echo = loop {
        if let Message::Text(t) = ws.next().await.unwrap().unwrap() {
            break cryptopath_server::codec::decode(&t).unwrap();
        }
    };
    assert_eq!((echo.kind(), echo.room.as_str(), echo.sender.as_str()), (MessageType::Join, "pair-3", "ana"));
    assert_eq!(server.snapshot("pair-3").await.unwrap().members, ["ana"]);
}
