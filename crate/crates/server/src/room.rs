//! One executor per room. Everything that touches a room's state — client
//! messages, bot replies, disconnects — goes through its single queue, so a
//! message is delivered to every member before the next one is looked at.
//! Bots live inside the executor and their replies are handled before the
//! next external command, which keeps seeded runs reproducible.

use std::collections::{HashMap, VecDeque};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use cryptopath_core::channel::{
    channel_deliver, Attacker, BotRole, ChannelError, ChannelMode, DhParticipant, Interceptor,
    PassThrough, Payload, RoomState, ScenarioAnnouncement, SessionTranscript, WireMessage, Autopilot,
};
use tokio::sync::{mpsc, oneshot};

use crate::codec::{encode, server_error, SERVER_NAME};
use crate::config::{derive_seed, BotSpec, RoomConfig};

pub(crate) type ConnId = u64;

pub(crate) enum Outgoing {
    Line(String),
    /// The connection no longer speaks for anyone in its room.
    Unbind,
}

pub(crate) type ConnTx = mpsc::UnboundedSender<Outgoing>;

pub(crate) enum RoomCommand {
    Submit {
        conn: ConnId,
        out: ConnTx,
        message: WireMessage,
    },
    /// A line from a connection in this room that did not parse.
    Reject {
        out: ConnTx,
        reason: String,
    },
    Disconnect {
        conn: ConnId,
    },
    StartBot {
        spec: BotSpec,
        reply: oneshot::Sender<Result<(), String>>,
    },
    Snapshot {
        reply: oneshot::Sender<RoomSnapshot>,
    },
}

/// A copy of a room's state for inspection.
#[derive(Debug, Clone)]
pub struct RoomSnapshot {
    pub name: String,
    pub mode: ChannelMode,
    pub members: Vec<String>,
    pub last_seq: u64,
    pub transcript: SessionTranscript,
    pub transcript_path: PathBuf,
    pub attacker: Option<Attacker>,
    pub bots: Vec<DhParticipant>,
}

pub(crate) struct RoomSettings<'a> {
    pub config: RoomConfig,
    pub scenario: Option<ScenarioAnnouncement>,
    pub transcript_dir: &'a Path,
    pub date: &'a str,
    pub wall_clock: bool,
    pub server_seed: u64,
}

pub(crate) fn transcript_path(dir: &Path, room: &str, date: &str) -> PathBuf {
    dir.join(format!("{room}-{date}.log"))
}

pub(crate) struct Room {
    config: RoomConfig,
    state: RoomState,
    scenario: Option<ScenarioAnnouncement>,
    conns: HashMap<String, (ConnId, ConnTx)>,
    attacker: Option<Attacker>,
    bots: Vec<Autopilot>,
    queue: VecDeque<WireMessage>,
    path: PathBuf,
    file: File,
    wall_clock: bool,
    server_seed: u64,
}

impl Room {
    pub fn open(settings: RoomSettings<'_>) -> std::io::Result<Self> {
        std::fs::create_dir_all(settings.transcript_dir)?;
        let path = transcript_path(settings.transcript_dir, &settings.config.name, settings.date);
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self {
            state: RoomState::new(settings.config.name.clone(), settings.config.mode.clone()),
            config: settings.config,
            scenario: settings.scenario,
            conns: HashMap::new(),
            attacker: None,
            bots: Vec::new(),
            queue: VecDeque::new(),
            path,
            file,
            wall_clock: settings.wall_clock,
            server_seed: settings.server_seed,
        })
    }

    pub async fn run(mut self, mut commands: mpsc::UnboundedReceiver<RoomCommand>) {
        while let Some(cmd) = commands.recv().await {
            self.handle(cmd);
        }
    }

    pub fn handle(&mut self, cmd: RoomCommand) {
        match cmd {
            RoomCommand::Submit { conn, out, message } => self.submit(Some((conn, out)), message),
            RoomCommand::Reject { out, reason } => {
                let _ = out.send(Outgoing::Line(encode(&self.error(reason, None))));
            }
            RoomCommand::Disconnect { conn } => {
                let name = self.conns.iter().find(|(_, (id, _))| *id == conn).map(|(n, _)| n.clone());
                if let Some(name) = name {
                    self.conns.remove(&name);
                    self.submit(None, WireMessage::new(self.state.name(), name, Payload::Leave));
                }
            }
            RoomCommand::StartBot { spec, reply } => {
                let _ = reply.send(self.start_bot(spec));
            }
            RoomCommand::Snapshot { reply } => {
                let _ = reply.send(self.snapshot());
            }
        }
        while let Some(draft) = self.queue.pop_front() {
            self.submit(None, draft);
        }
    }

    fn snapshot(&self) -> RoomSnapshot {
        RoomSnapshot {
            name: self.state.name().to_string(),
            mode: self.state.mode().clone(),
            members: self.state.members().to_vec(),
            last_seq: self.state.last_seq(),
            transcript: self.state.transcript().clone(),
            transcript_path: self.path.clone(),
            attacker: self.attacker.clone(),
            bots: self.bots.iter().map(|b| b.state().clone()).collect(),
        }
    }

    fn error(&self, reason: impl Into<String>, expected_seq: Option<u64>) -> WireMessage {
        server_error(self.state.name(), self.state.last_seq(), reason, expected_seq)
    }

    fn refuse(&self, out: &ConnTx, reason: impl Into<String>, expected_seq: Option<u64>, unbind: bool) {
        let _ = out.send(Outgoing::Line(encode(&self.error(reason, expected_seq))));
        if unbind {
            let _ = out.send(Outgoing::Unbind);
        }
    }

    fn attacker_refusal(&self, name: &str) -> Option<String> {
        match self.state.mode().attacker() {
            None => Some("attacker bots need a room in relay mode".into()),
            Some(a) if a != name => Some(format!("only {a} can be the attacker in this room")),
            _ if self.attacker.is_some() => Some("this room already has an attacker".into()),
            _ => None,
        }
    }

    fn unique_bot_name(&self, base: &str) -> String {
        let taken = |n: &str| self.state.is_member(n) || self.bots.iter().any(|b| b.state().name() == n);
        let mut name = base.to_string();
        let mut i = 2;
        while taken(&name) {
            name = format!("{base}{i}");
            i += 1;
        }
        name
    }

    fn start_bot(&mut self, spec: BotSpec) -> Result<(), String> {
        if self.state.is_member(&spec.name) {
            return Err(format!("{} is already in room {}", spec.name, self.state.name()));
        }
        let seed = spec
            .seed
            .unwrap_or_else(|| derive_seed(self.server_seed, self.state.name(), &spec.name));
        match spec.role {
            BotRole::Attacker => {
                if let Some(reason) = self.attacker_refusal(&spec.name) {
                    return Err(reason);
                }
                self.attacker = Some(Attacker::new(spec.name.clone(), seed));
            }
            BotRole::ScriptedPeer => {
                let mut bot = Autopilot::new(
                    spec.side,
                    spec.name.clone(),
                    self.state.name(),
                    self.config.params,
                    seed,
                );
                if let Some(peer) = spec.peer.as_deref().or(self.config.partner_of(&spec.name)) {
                    bot = bot.with_peer(peer);
                }
                self.bots.push(bot);
            }
        }
        let join = WireMessage::new(self.state.name(), spec.name, Payload::Join(Default::default()));
        self.submit(None, join);
        Ok(())
    }

    /// Routes one message through the channel. `conn` is the connection it
    /// came in on; bot messages have none.
    fn submit(&mut self, conn: Option<(ConnId, ConnTx)>, mut message: WireMessage) {
        let mut bot_request = None;
        if let Some((id, out)) = &conn {
            let bound = self.conns.iter().find(|(_, (c, _))| c == id).map(|(n, _)| n.clone());
            match (&mut message.payload, bound) {
                (Payload::Join(_), Some(name)) => {
                    return self.refuse(out, format!("this connection already joined as {name}"), None, false);
                }
                (Payload::Join(join), None) => {
                    if message.room == self.state.name() && !self.config.admits(&message.sender) {
                        let reason = format!("{} is not paired in this room", message.sender);
                        return self.refuse(out, reason, None, true);
                    }
                    // the request names a seed; it must not reach the transcript
                    bot_request = join.bot.take();
                    if let Some(req) = bot_request {
                        if req.role == BotRole::Attacker {
                            if let Some(reason) = self.attacker_refusal(&message.sender) {
                                return self.refuse(out, reason, None, true);
                            }
                        }
                    }
                }
                (_, Some(name)) if name != message.sender => {
                    let reason = format!("this connection speaks for {name}, not {}", message.sender);
                    return self.refuse(out, reason, None, false);
                }
                (_, None) => return self.refuse(out, "join the room first", None, true),
                _ => {}
            }
        }

        if message.seq == 0 {
            message = self.state.stamp(message);
        }
        let interceptor: &mut dyn Interceptor = match &mut self.attacker {
            Some(a) => a,
            None => &mut PassThrough,
        };
        let deliveries = match channel_deliver(&mut self.state, message, interceptor) {
            Ok(d) => d,
            Err(e) => {
                if let Some((_, out)) = &conn {
                    let expected = match e {
                        ChannelError::StaleSeq { expected, .. } => Some(expected),
                        _ => None,
                    };
                    let unbind = !self.conns.values().any(|(_, o)| o.same_channel(out));
                    self.refuse(out, e.to_string(), expected, unbind);
                }
                return;
            }
        };

        let mut entry = self.state.transcript().entries().last().expect("delivered").clone();
        if self.wall_clock {
            entry.wall_time = Some(chrono::Local::now().to_rfc3339());
        }
        // a line that cannot be persisted must not go unnoticed
        writeln!(self.file, "{}", entry.to_line())
            .and_then(|_| self.file.flush())
            .unwrap_or_else(|e| panic!("writing {}: {e}", self.path.display()));

        let sent = entry.sent().clone();
        if let (Payload::Join(_), Some((id, out))) = (&sent.payload, &conn) {
            self.conns.insert(sent.sender.clone(), (*id, out.clone()));
        }
        for d in &deliveries {
            if let Some((_, out)) = self.conns.get(&d.recipient) {
                let _ = out.send(Outgoing::Line(encode(&d.message)));
            }
            if let Some(bot) = self.bots.iter_mut().find(|b| b.state().name() == d.recipient) {
                // a bot that cannot follow simply stops taking part
                if let Ok(replies) = bot.on_message(&d.message) {
                    self.queue.extend(replies);
                }
            }
        }

        match &sent.payload {
            Payload::Join(_) => {
                if let (Some(ann), Some((_, out))) = (&self.scenario, self.conns.get(&sent.sender)) {
                    let msg = WireMessage {
                        room: self.state.name().to_string(),
                        sender: SERVER_NAME.to_string(),
                        seq: self.state.last_seq(),
                        payload: Payload::Scenario(Box::new(ann.clone())),
                    };
                    let _ = out.send(Outgoing::Line(encode(&msg)));
                }
                if let Some(req) = bot_request {
                    let spec = match req.role {
                        BotRole::Attacker => {
                            self.attacker = Some(Attacker::new(sent.sender.clone(), req.seed));
                            None
                        }
                        BotRole::ScriptedPeer => Some(BotSpec::peer(
                            self.unique_bot_name(&format!("{}-bot", sent.sender)),
                            req.seed,
                            sent.sender.clone(),
                        )),
                    };
                    if let Some(spec) = spec {
                        if let Err(reason) = self.start_bot(spec) {
                            if let Some((_, out)) = self.conns.get(&sent.sender) {
                                self.refuse(out, reason, None, false);
                            }
                        }
                    }
                }
            }
            Payload::Leave => {
                if let Some((_, out)) = self.conns.remove(&sent.sender) {
                    let _ = out.send(Outgoing::Unbind);
                }
            }
            _ => {}
        }
    }
}
