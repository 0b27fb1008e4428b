//! One participant's side of a Diffie-Hellman exchange over the public chat.
//!
//! The state machine only moves forward, one step per action, and an action
//! taken out of turn is refused with the state untouched. Incoming messages
//! never advance the phase on their own except for agreeing on parameters;
//! a peer's public value waits in the inbox until it is explicitly received.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::wire::{DhPublicPayload, Payload, WireMessage};
use crate::dh::{dh_keygen, dh_shared_secret, residue_to_color, DhKeyPair, DhParams, SharedSecret};
use crate::error::MathError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    AwaitParams,
    ParamsAgreed,
    SecretChosen,
    PublicSent,
    PeerReceived,
    SharedComputed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalAction {
    ProposeParams(DhParams),
    PickSecret(u64),
    SendPublic,
    ReceivePublic,
    ComputeShared,
    AnnounceDone,
}

impl LocalAction {
    pub fn name(&self) -> &'static str {
        match self {
            LocalAction::ProposeParams(_) => "propose-params",
            LocalAction::PickSecret(_) => "pick-secret",
            LocalAction::SendPublic => "send-public",
            LocalAction::ReceivePublic => "receive-public",
            LocalAction::ComputeShared => "compute-shared",
            LocalAction::AnnounceDone => "announce-done",
        }
    }
}

#[derive(Debug, Clone)]
pub enum SessionInput {
    Local(LocalAction),
    Incoming(WireMessage),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("{action} is not allowed while {phase:?}")]
    OutOfOrder { action: &'static str, phase: Phase },
    #[error("no public value from the peer has arrived yet")]
    NothingReceived,
    #[error("{got} sent a public value, but the peer is {expected}")]
    UnexpectedPeer { got: String, expected: String },
    #[error("parameters {got:?} conflict with the agreed {agreed:?}")]
    ParamsConflict { agreed: DhParams, got: DhParams },
    #[error("the peer already sent {first}, now {second}")]
    PublicChanged { first: u64, second: u64 },
    #[error(transparent)]
    Math(#[from] MathError),
}

/// Everything one participant knows. The secret never leaves this struct
/// except through [`DhParticipant::keypair`] for the local reveal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DhParticipant {
    name: String,
    room: String,
    phase: Phase,
    params: Option<DhParams>,
    keypair: Option<DhKeyPair>,
    peer: Option<String>,
    inbox: Option<u64>,
    peer_public: Option<u64>,
    shared: Option<SharedSecret>,
    done_sent: bool,
    peer_done: bool,
}

impl DhParticipant {
    pub fn new(name: impl Into<String>, room: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            room: room.into(),
            phase: Phase::AwaitParams,
            params: None,
            keypair: None,
            peer: None,
            inbox: None,
            peer_public: None,
            shared: None,
            done_sent: false,
            peer_done: false,
        }
    }

    /// Only public values from `peer` will be accepted.
    pub fn with_peer(mut self, peer: impl Into<String>) -> Self {
        self.peer = Some(peer.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn room(&self) -> &str {
        &self.room
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn params(&self) -> Option<DhParams> {
        self.params
    }

    pub fn keypair(&self) -> Option<&DhKeyPair> {
        self.keypair.as_ref()
    }

    pub fn public_value(&self) -> Option<u64> {
        self.keypair.as_ref().map(DhKeyPair::public_value)
    }

    pub fn peer(&self) -> Option<&str> {
        self.peer.as_deref()
    }

    /// A public value that arrived but has not been received yet.
    pub fn inbox(&self) -> Option<u64> {
        self.inbox
    }

    pub fn peer_public(&self) -> Option<u64> {
        self.peer_public
    }

    pub fn shared(&self) -> Option<SharedSecret> {
        self.shared
    }

    pub fn done_sent(&self) -> bool {
        self.done_sent
    }

    pub fn peer_done(&self) -> bool {
        self.peer_done
    }

    fn draft(&self, payload: Payload) -> WireMessage {
        WireMessage::new(self.room.clone(), self.name.clone(), payload)
    }
}

/// Advances `state` by one input, returning the new state and the messages
/// to send. On error the caller keeps the old state.
pub fn dh_session_step(
    state: &DhParticipant,
    input: SessionInput,
) -> Result<(DhParticipant, Vec<WireMessage>), SessionError> {
    let mut next = state.clone();
    let mut out = Vec::new();
    match input {
        SessionInput::Local(action) => {
            let refuse = || SessionError::OutOfOrder {
                action: action.name(),
                phase: state.phase,
            };
            match action {
                LocalAction::ProposeParams(params) => {
                    if state.phase != Phase::AwaitParams {
                        return Err(refuse());
                    }
                    next.params = Some(params);
                    next.phase = Phase::ParamsAgreed;
                    out.push(next.draft(Payload::DhParams(params)));
                }
                LocalAction::PickSecret(secret) => {
                    let (Phase::ParamsAgreed, Some(params)) = (state.phase, state.params) else {
                        return Err(refuse());
                    };
                    next.keypair = Some(DhKeyPair::from_secret(&params, secret)?);
                    next.phase = Phase::SecretChosen;
                }
                LocalAction::SendPublic => {
                    let (Phase::SecretChosen, Some(params), Some(pair)) =
                        (state.phase, state.params, &state.keypair)
                    else {
                        return Err(refuse());
                    };
                    let value = pair.public_value();
                    out.push(next.draft(Payload::DhPublic(DhPublicPayload {
                        value,
                        color: residue_to_color(value, &params)?,
                    })));
                    next.phase = Phase::PublicSent;
                }
                LocalAction::ReceivePublic => {
                    if state.phase != Phase::PublicSent {
                        return Err(refuse());
                    }
                    let value = state.inbox.ok_or(SessionError::NothingReceived)?;
                    let params = state.params.expect("params agreed before sending");
                    params.check_residue(value, 1)?;
                    next.peer_public = Some(value);
                    next.inbox = None;
                    next.phase = Phase::PeerReceived;
                }
                LocalAction::ComputeShared => {
                    let (Phase::PeerReceived, Some(params), Some(pair), Some(peer)) =
                        (state.phase, state.params, &state.keypair, state.peer_public)
                    else {
                        return Err(refuse());
                    };
                    next.shared = Some(dh_shared_secret(pair, peer, &params)?);
                    next.phase = Phase::SharedComputed;
                }
                LocalAction::AnnounceDone => {
                    if state.phase != Phase::SharedComputed || state.done_sent {
                        return Err(refuse());
                    }
                    next.done_sent = true;
                    out.push(next.draft(Payload::DhDone));
                }
            }
        }
        SessionInput::Incoming(msg) => {
            if msg.sender == state.name {
                return Ok((next, out));
            }
            match msg.payload {
                Payload::DhParams(params) => match state.params {
                    None => {
                        next.params = Some(params);
                        next.phase = Phase::ParamsAgreed;
                    }
                    Some(agreed) if agreed == params => {}
                    Some(agreed) => {
                        return Err(SessionError::ParamsConflict {
                            agreed,
                            got: params,
                        })
                    }
                },
                Payload::DhPublic(public) => {
                    match &state.peer {
                        Some(peer) if *peer != msg.sender => {
                            return Err(SessionError::UnexpectedPeer {
                                got: msg.sender,
                                expected: peer.clone(),
                            })
                        }
                        Some(_) => {}
                        None => next.peer = Some(msg.sender),
                    }
                    if let Some(first) = state.inbox.or(state.peer_public) {
                        if first != public.value {
                            return Err(SessionError::PublicChanged {
                                first,
                                second: public.value,
                            });
                        }
                    } else {
                        next.inbox = Some(public.value);
                    }
                }
                Payload::DhDone if state.peer.as_deref() == Some(msg.sender.as_str()) => {
                    next.peer_done = true;
                }
                _ => {}
            }
        }
    }
    Ok((next, out))
}

/// Which side an automated participant plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeerRole {
    /// Proposes parameters and sends first, as soon as a peer is present.
    Initiator,
    /// Waits for parameters and for the initiator's public value.
    Responder,
}

/// An honest participant that plays its role without a human.
///
/// Every message it sends answers exactly one message it received, so with
/// a fixed seed the whole exchange is reproducible:
///
/// 1. initiator, once a peer is in the room: `dh_params`, `dh_public`
/// 2. responder, on the initiator's public value: `dh_public`
/// 3. initiator, on the responder's public value: `dh_done`
/// 4. responder, on the initiator's `dh_done`: `dh_done`
#[derive(Debug, Clone)]
pub struct Autopilot {
    role: PeerRole,
    params: DhParams,
    rng: ChaCha8Rng,
    state: DhParticipant,
}

impl Autopilot {
    /// `params` is what an initiator proposes; a responder takes whatever
    /// it is offered.
    pub fn new(
        role: PeerRole,
        name: impl Into<String>,
        room: impl Into<String>,
        params: DhParams,
        seed: u64,
    ) -> Self {
        Self {
            role,
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            state: DhParticipant::new(name, room),
        }
    }

    pub fn with_peer(mut self, peer: impl Into<String>) -> Self {
        self.state = self.state.with_peer(peer);
        self
    }

    pub fn role(&self) -> PeerRole {
        self.role
    }

    pub fn state(&self) -> &DhParticipant {
        &self.state
    }

    pub fn is_finished(&self) -> bool {
        self.state.phase == Phase::SharedComputed && self.state.done_sent
    }

    fn act(&mut self, action: LocalAction, out: &mut Vec<WireMessage>) -> Result<(), SessionError> {
        let (next, sent) = dh_session_step(&self.state, SessionInput::Local(action))?;
        self.state = next;
        out.extend(sent);
        Ok(())
    }

    fn pick_secret(&mut self, out: &mut Vec<WireMessage>) -> Result<(), SessionError> {
        let params = self.state.params.expect("params agreed");
        let secret = dh_keygen(&params, &mut self.rng).secret();
        self.act(LocalAction::PickSecret(secret), out)
    }

    /// Feeds one delivered message and returns what to send in reply.
    pub fn on_message(&mut self, msg: &WireMessage) -> Result<Vec<WireMessage>, SessionError> {
        let mut out = Vec::new();
        let before = self.state.phase;
        let (next, _) = dh_session_step(&self.state, SessionInput::Incoming(msg.clone()))?;
        self.state = next;
        let own = msg.sender == self.state.name;

        match self.role {
            PeerRole::Initiator => {
                let peer_present = match &msg.payload {
                    Payload::Join(join) => {
                        let others = |m: &String| *m != self.state.name;
                        match &self.state.peer {
                            Some(peer) => join.members.contains(peer),
                            None => join.members.iter().any(others),
                        }
                    }
                    _ => false,
                };
                if peer_present && self.state.phase == Phase::AwaitParams {
                    if self.state.peer.is_none() {
                        if let Payload::Join(join) = &msg.payload {
                            let peer = join.members.iter().find(|m| **m != self.state.name);
                            self.state.peer = peer.cloned();
                        }
                    }
                    let params = self.params;
                    self.act(LocalAction::ProposeParams(params), &mut out)?;
                    self.pick_secret(&mut out)?;
                    self.act(LocalAction::SendPublic, &mut out)?;
                } else if !own
                    && matches!(msg.payload, Payload::DhPublic(_))
                    && self.state.phase == Phase::PublicSent
                {
                    self.act(LocalAction::ReceivePublic, &mut out)?;
                    self.act(LocalAction::ComputeShared, &mut out)?;
                    self.act(LocalAction::AnnounceDone, &mut out)?;
                }
            }
            PeerRole::Responder => {
                if before == Phase::AwaitParams && self.state.phase == Phase::ParamsAgreed {
                    self.pick_secret(&mut out)?;
                }
                if !own
                    && matches!(msg.payload, Payload::DhPublic(_))
                    && self.state.phase == Phase::SecretChosen
                {
                    self.act(LocalAction::SendPublic, &mut out)?;
                    self.act(LocalAction::ReceivePublic, &mut out)?;
                    self.act(LocalAction::ComputeShared, &mut out)?;
                }
                if !own
                    && matches!(msg.payload, Payload::DhDone)
                    && self.state.peer_done
                    && self.state.phase == Phase::SharedComputed
                    && !self.state.done_sent
                {
                    self.act(LocalAction::AnnounceDone, &mut out)?;
                }
            }
        }
        Ok(out)
    }

    /// Rebuilds a participant from the messages it was delivered, in order.
    /// With the same seed this reproduces the live final state exactly.
    pub fn replay<'a>(
        mut self,
        delivered: impl IntoIterator<Item = &'a WireMessage>,
    ) -> Result<Self, SessionError> {
        for msg in delivered {
            self.on_message(msg)?;
        }
        Ok(self)
    }
}
