use std::io::Write as _;

use anyhow::{Context, Result};
use cryptopath_core::channel::{
    Autopilot, BotRequest, BotRole, ChannelMode, JoinPayload, Payload, PeerRole, WireMessage,
};
use cryptopath_core::dh::{residue_to_color, DhParams};
use cryptopath_server::client::{run_scripted_peer, ClientError, LineClient};
use cryptopath_server::codec::encode;
use cryptopath_server::{ClientParams, RoomConfig, ServerConfig};
use serde_json::json;

use crate::args::{BotCmd, ServeArgs, Side};
use crate::CommandResult;

fn runtime() -> Result<tokio::runtime::Runtime> {
    tokio::runtime::Runtime::new().context("starting the async runtime")
}

/// The configuration `serve` would run with.
pub fn serve_config(args: &ServeArgs, seed: Option<u64>) -> Result<ServerConfig> {
    let mut config = match &args.config {
        Some(path) => ServerConfig::load(path)?,
        None => ServerConfig::new(
            args.rooms
                .iter()
                .map(|r| RoomConfig::new(r.clone(), ChannelMode::Broadcast))
                .collect(),
        ),
    };
    if let Some(l) = &args.listen {
        config.listen = l.clone();
    }
    if let Some(w) = &args.ws {
        config.ws_listen = Some(w.clone());
    }
    if let Some(t) = &args.transcripts {
        config.transcript_dir = t.clone();
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    let config = config.with_env()?;
    config.validate()?;
    Ok(config)
}

pub fn serve(args: ServeArgs, seed: Option<u64>) -> Result<CommandResult> {
    let config = serve_config(&args, seed)?;
    let rooms: Vec<String> = config.rooms.iter().map(|r| r.name.clone()).collect();
    let dir = config.transcript_dir.clone();
    runtime()?.block_on(async move {
        let handle = cryptopath_server::start(config).await?;
        println!("listening on {}", handle.local_addr());
        if let Some(ws) = handle.ws_addr() {
            println!("websocket on ws://{ws}");
            for room in &rooms {
                println!("  {room}: ?{}", ClientParams::for_room(ws, room.as_str()).query());
            }
        }
        println!("rooms: {}; transcripts in {}", rooms.join(", "), dir.display());
        let _ = std::io::stdout().flush();
        tokio::signal::ctrl_c().await.context("waiting for ctrl-c")?;
        handle.shutdown();
        Ok::<_, anyhow::Error>(())
    })?;
    Ok(CommandResult::ok("stopped", json!({ "stopped": true })))
}

pub fn bot(cmd: BotCmd, seed: u64) -> Result<CommandResult> {
    runtime()?.block_on(async move {
        match cmd {
            BotCmd::Attacker { conn, count } => {
                let mut client = LineClient::connect(&conn.server)
                    .await
                    .with_context(|| format!("connecting to {}", conn.server))?;
                let join = Payload::Join(JoinPayload {
                    members: vec![],
                    bot: Some(BotRequest { role: BotRole::Attacker, seed }),
                });
                client.send(&WireMessage::new(&conn.room, &conn.name, join)).await?;
                let mut seen = Vec::new();
                while count == 0 || seen.len() < count {
                    let msg = match client.recv().await {
                        Ok(m) => m,
                        Err(ClientError::Closed) => break,
                        Err(e) => return Err(e.into()),
                    };
                    if let Payload::Error(e) = &msg.payload {
                        anyhow::bail!("server refused: {}", e.reason);
                    }
                    println!("{}", encode(&msg));
                    let _ = std::io::stdout().flush();
                    seen.push(msg);
                }
                let report = format!("{} messages observed", seen.len());
                Ok(CommandResult::ok(report, json!({ "messages": seen })))
            }
            BotCmd::Peer { conn, peer, side, p, g } => {
                let params = DhParams::new(p, g)?;
                let role = match side {
                    Side::Initiator => PeerRole::Initiator,
                    Side::Responder => PeerRole::Responder,
                };
                let mut pilot = Autopilot::new(role, &conn.name, &conn.room, params, seed);
                if let Some(peer) = peer {
                    pilot = pilot.with_peer(peer);
                }
                let mut client = LineClient::connect(&conn.server)
                    .await
                    .with_context(|| format!("connecting to {}", conn.server))?;
                let (pilot, _) = run_scripted_peer(&mut client, pilot).await?;
                client.leave(&conn.room, &conn.name).await?;
                let state = pilot.state();
                let params = state.params().context("no parameters were agreed")?;
                let shared = state.shared().context("no shared value was computed")?;
                let color = |v: u64| residue_to_color(v, &params).map(|c| c.css());
                let public = state.public_value().unwrap_or_default();
                let peer_public = state.peer_public().unwrap_or_default();
                let report = format!(
                    "p={} g={}\nmine={public}  {}\npeer={peer_public}  {}\nshared={}  {}",
                    params.p(),
                    params.g(),
                    color(public)?,
                    color(peer_public)?,
                    shared.value,
                    color(shared.value)?
                );
                let json = json!({
                    "params": params,
                    "public": public,
                    "peer": state.peer(),
                    "peer_public": peer_public,
                    "shared": shared.value,
                });
                Ok(CommandResult::ok(report, json))
            }
        }
    })
}
