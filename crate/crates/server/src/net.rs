use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use cryptopath_core::channel::{MessageType, ScenarioConfig};
use futures_util::{SinkExt, StreamExt};
use tokio::io::{AsyncBufReadExt, AsyncWriteExt, BufReader};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::{mpsc, oneshot, watch};
use tokio_tungstenite::tungstenite::Message;

use crate::codec::{decode, encode, pong, server_error};
use crate::config::{BotSpec, ServerConfig};
use crate::room::{ConnId, ConnTx, Outgoing, Room, RoomCommand, RoomSettings, RoomSnapshot};
use crate::ServerError;

struct Router {
    rooms: HashMap<String, mpsc::UnboundedSender<RoomCommand>>,
    next_conn: AtomicU64,
}

/// A running server. Dropping it leaves the server running; call
/// [`ServerHandle::shutdown`] to stop accepting connections.
pub struct ServerHandle {
    addr: SocketAddr,
    ws_addr: Option<SocketAddr>,
    router: Arc<Router>,
    stop: watch::Sender<bool>,
}

/// Starts every room and binds the listeners.
pub async fn start(config: ServerConfig) -> Result<ServerHandle, ServerError> {
    config.validate()?;
    let bind = |addr: String| async move {
        TcpListener::bind(&addr)
            .await
            .map_err(|source| ServerError::Bind { addr, source })
    };
    let tcp = bind(config.listen.clone()).await?;
    let ws = match &config.ws_listen {
        Some(a) => Some(bind(a.clone()).await?),
        None => None,
    };

    let date = config
        .date
        .clone()
        .unwrap_or_else(|| chrono::Local::now().format("%Y-%m-%d").to_string());
    let mut rooms = HashMap::new();
    for rc in &config.rooms {
        let scenario = match &rc.scenario {
            Some(path) => Some(
                ScenarioConfig::load(path)
                    .map_err(|e| ServerError::Config(e.to_string()))?
                    .announcement(),
            ),
            None => None,
        };
        let room = Room::open(RoomSettings {
            config: rc.clone(),
            scenario,
            transcript_dir: &config.transcript_dir,
            date: &date,
            wall_clock: config.wall_clock,
            server_seed: config.seed,
        })
        .map_err(ServerError::Io)?;
        let (tx, rx) = mpsc::unbounded_channel();
        tokio::spawn(room.run(rx));
        rooms.insert(rc.name.clone(), tx);
    }
    let router = Arc::new(Router {
        rooms,
        next_conn: AtomicU64::new(1),
    });
    let handle = ServerHandle {
        addr: tcp.local_addr().map_err(ServerError::Io)?,
        ws_addr: ws.as_ref().map(|l| l.local_addr()).transpose().map_err(ServerError::Io)?,
        router: router.clone(),
        stop: watch::channel(false).0,
    };
    // configured bots are in their rooms before anyone can connect
    for rc in &config.rooms {
        for bot in &rc.bots {
            handle.run_bot(&rc.name, bot.clone()).await?;
        }
    }

    tokio::spawn(accept_loop(tcp, router.clone(), handle.stop.subscribe(), false));
    if let Some(ws) = ws {
        tokio::spawn(accept_loop(ws, router, handle.stop.subscribe(), true));
    }
    Ok(handle)
}

/// Runs until Ctrl-C.
pub async fn serve(config: ServerConfig) -> Result<(), ServerError> {
    let handle = start(config).await?;
    tokio::signal::ctrl_c().await.map_err(ServerError::Io)?;
    handle.shutdown();
    Ok(())
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn ws_addr(&self) -> Option<SocketAddr> {
        self.ws_addr
    }

    fn room(&self, name: &str) -> Result<&mpsc::UnboundedSender<RoomCommand>, ServerError> {
        self.router
            .rooms
            .get(name)
            .ok_or_else(|| ServerError::NoSuchRoom(name.to_string()))
    }

    /// Puts a bot into `room`; attackers are refused outside relay rooms.
    pub async fn run_bot(&self, room: &str, spec: BotSpec) -> Result<(), ServerError> {
        let (reply, rx) = oneshot::channel();
        self.room(room)?
            .send(RoomCommand::StartBot { spec, reply })
            .map_err(|_| ServerError::Stopped)?;
        rx.await.map_err(|_| ServerError::Stopped)?.map_err(ServerError::Refused)
    }

    pub async fn snapshot(&self, room: &str) -> Result<RoomSnapshot, ServerError> {
        let (reply, rx) = oneshot::channel();
        self.room(room)?
            .send(RoomCommand::Snapshot { reply })
            .map_err(|_| ServerError::Stopped)?;
        rx.await.map_err(|_| ServerError::Stopped)
    }

    /// Stops accepting new connections.
    pub fn shutdown(&self) {
        let _ = self.stop.send(true);
    }
}

async fn accept_loop(listener: TcpListener, router: Arc<Router>, mut stop: watch::Receiver<bool>, ws: bool) {
    loop {
        tokio::select! {
            _ = stop.changed() => return,
            accepted = listener.accept() => {
                let Ok((stream, _)) = accepted else { continue };
                let router = router.clone();
                if ws {
                    tokio::spawn(serve_ws(stream, router));
                } else {
                    tokio::spawn(serve_tcp(stream, router));
                }
            }
        }
    }
}

/// Per-connection protocol state, shared by both bindings.
struct Session {
    id: ConnId,
    router: Arc<Router>,
    out: ConnTx,
    room: Option<String>,
}

impl Session {
    fn new(router: Arc<Router>, out: ConnTx) -> Self {
        Self {
            id: router.next_conn.fetch_add(1, Ordering::Relaxed),
            router,
            out,
            room: None,
        }
    }

    fn reply(&self, msg: cryptopath_core::channel::WireMessage) {
        let _ = self.out.send(Outgoing::Line(encode(&msg)));
    }

    fn on_line(&mut self, line: &str) {
        let msg = match decode(line) {
            Ok(m) => m,
            Err(reason) => {
                match self.room.as_ref().and_then(|r| self.router.rooms.get(r)) {
                    Some(tx) => {
                        let _ = tx.send(RoomCommand::Reject { out: self.out.clone(), reason });
                    }
                    None => self.reply(server_error("", 0, reason, None)),
                }
                return;
            }
        };
        if msg.kind() == MessageType::Ping {
            return self.reply(pong(&msg.room));
        }
        let room = match (&self.room, msg.kind()) {
            (Some(r), _) => r.clone(),
            (None, MessageType::Join) => msg.room.clone(),
            (None, _) => return self.reply(server_error(&msg.room, 0, "join the room first", None)),
        };
        match self.router.rooms.get(&room) {
            None => self.reply(server_error(&room, 0, format!("no such room {room}"), None)),
            Some(tx) => {
                self.room = Some(room);
                let _ = tx.send(RoomCommand::Submit {
                    conn: self.id,
                    out: self.out.clone(),
                    message: msg,
                });
            }
        }
    }

    /// Returns the line to write, if any.
    fn on_outgoing(&mut self, item: Outgoing) -> Option<String> {
        match item {
            Outgoing::Line(l) => Some(l),
            Outgoing::Unbind => {
                self.room = None;
                None
            }
        }
    }

    fn close(&self) {
        if let Some(tx) = self.room.as_ref().and_then(|r| self.router.rooms.get(r)) {
            let _ = tx.send(RoomCommand::Disconnect { conn: self.id });
        }
    }
}

async fn serve_tcp(stream: TcpStream, router: Arc<Router>) {
    let (read, mut write) = stream.into_split();
    let mut lines = BufReader::new(read).lines();
    let (out, mut rx) = mpsc::unbounded_channel();
    let mut session = Session::new(router, out);
    loop {
        tokio::select! {
            // outgoing first, so an unbind is seen before the next request
            biased;
            Some(item) = rx.recv() => {
                if let Some(line) = session.on_outgoing(item) {
                    if write.write_all(format!("{line}\n").as_bytes()).await.is_err() {
                        break;
                    }
                }
            }
            line = lines.next_line() => match line {
                Ok(Some(line)) => session.on_line(&line),
                _ => break,
            },
        }
    }
    session.close();
}

async fn serve_ws(stream: TcpStream, router: Arc<Router>) {
    let Ok(ws) = tokio_tungstenite::accept_async(stream).await else { return };
    let (mut sink, mut frames) = ws.split();
    let (out, mut rx) = mpsc::unbounded_channel();
    let mut session = Session::new(router, out);
    loop {
        tokio::select! {
            biased;
            Some(item) = rx.recv() => {
                if let Some(line) = session.on_outgoing(item) {
                    if sink.send(Message::text(line)).await.is_err() {
                        break;
                    }
                }
            }
            frame = frames.next() => match frame {
                Some(Ok(Message::Text(text))) => {
                    for line in text.lines() {
                        session.on_line(line);
                    }
                }
                Some(Ok(Message::Binary(_))) => {
                    session.on_line("");
                }
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                Some(Ok(_)) => {}
            },
        }
    }
    session.close();
}
