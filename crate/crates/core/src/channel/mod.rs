//! The public chat as an insecure channel: wire messages, rooms in
//! broadcast or relay mode, per-participant exchange state machines, the
//! bundled attacker, guided role scripts and scenario playgrounds.

mod mitm;
mod playground;
mod room;
mod scenario;
mod script;
mod session;
mod wire;

pub use mitm::{mitm_attack, Attacker, AttackerSide};
pub use playground::{OpCall, Playground, PlaygroundError};
pub use room::{
    channel_deliver, ChannelError, ChannelMode, Decision, Delivery, Interceptor, PassThrough,
    RoomState, SessionTranscript, TranscriptEntry,
};
pub use scenario::{
    bundled_scenario, bundled_scenarios, scenario_check, Challenge, CheckerRule, Milestone, OpId,
    ScenarioAnnouncement, ScenarioConfig, ScenarioError, Submission, Verdict,
    REASON_NOT_IN_PLAYGROUND, REASON_NO_ANSWER,
};
pub use script::{
    GuidedSession, RoleScript, ScriptAction, ScriptError, ScriptStep, StepInput, StepOutcome,
    Validation,
};
pub use session::{
    dh_session_step, Autopilot, DhParticipant, LocalAction, PeerRole, Phase, SessionError,
    SessionInput,
};
pub use wire::{
    BotRequest, BotRole, ChatPayload, DhPublicPayload, ErrorPayload, JoinPayload, MessageType,
    Payload, WireError, WireMessage,
};
