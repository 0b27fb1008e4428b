//! Guided role scripts: a fixed sequence of prompts that walks one student
//! through their side of the exchange, accepting only the expected action.
//!
//! Prompts describe what to do, never how the numbers are computed; the
//! arithmetic is shown only by the final reveal.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::session::{dh_session_step, DhParticipant, LocalAction, Phase, SessionError, SessionInput};
use super::wire::WireMessage;
use crate::dh::{dh_transcript_explain, ExchangeRecord, Explanation, PartyRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptAction {
    PickSecret,
    SendPublic,
    ReceivePublic,
    ComputeShared,
    Reveal,
}

/// What an action must satisfy before the script advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validation {
    /// The secret must lie in `[1, p - 1)`.
    SecretInRange,
    /// A public value from the peer must be waiting.
    PeerPublicWaiting,
    /// The state machine accepts it; nothing more.
    Accepted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptStep {
    pub prompt: String,
    pub action: ScriptAction,
    pub validation: Validation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleScript {
    pub steps: Vec<ScriptStep>,
}

impl Default for RoleScript {
    fn default() -> Self {
        let step = |prompt: &str, action, validation| ScriptStep {
            prompt: prompt.to_string(),
            action,
            validation,
        };
        Self {
            steps: vec![
                step(
                    "Choose your secret number. Keep it to yourself.",
                    ScriptAction::PickSecret,
                    Validation::SecretInRange,
                ),
                step(
                    "Mix your secret into the shared starting color and post the result in the chat.",
                    ScriptAction::SendPublic,
                    Validation::Accepted,
                ),
                step(
                    "Wait for your partner's color to appear in the chat, then take it.",
                    ScriptAction::ReceivePublic,
                    Validation::PeerPublicWaiting,
                ),
                step(
                    "Mix your secret into your partner's color.",
                    ScriptAction::ComputeShared,
                    Validation::Accepted,
                ),
                step(
                    "Compare colors with your partner, then see how it worked.",
                    ScriptAction::Reveal,
                    Validation::Accepted,
                ),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("the current step expects {expected:?}, not {got:?}")]
    WrongStep { expected: ScriptAction, got: ScriptAction },
    #[error("the script is finished")]
    Finished,
    #[error("group parameters have not been agreed yet")]
    NoParams,
    #[error(transparent)]
    Session(#[from] SessionError),
}

/// A student's input for the current step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepInput {
    PickSecret(u64),
    SendPublic,
    ReceivePublic,
    ComputeShared,
    Reveal,
}

impl StepInput {
    pub fn action(self) -> ScriptAction {
        match self {
            StepInput::PickSecret(_) => ScriptAction::PickSecret,
            StepInput::SendPublic => ScriptAction::SendPublic,
            StepInput::ReceivePublic => ScriptAction::ReceivePublic,
            StepInput::ComputeShared => ScriptAction::ComputeShared,
            StepInput::Reveal => ScriptAction::Reveal,
        }
    }
}

/// A role script bound to one participant.
#[derive(Debug, Clone)]
pub struct GuidedSession {
    script: RoleScript,
    cursor: usize,
    state: DhParticipant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Sent(Vec<WireMessage>),
    Revealed(Explanation),
}

impl GuidedSession {
    pub fn new(script: RoleScript, state: DhParticipant) -> Self {
        Self {
            script,
            cursor: 0,
            state,
        }
    }

    pub fn state(&self) -> &DhParticipant {
        &self.state
    }

    /// The step waiting for input, if any.
    pub fn current(&self) -> Option<&ScriptStep> {
        self.script.steps.get(self.cursor)
    }

    pub fn is_finished(&self) -> bool {
        self.cursor >= self.script.steps.len()
    }

    /// Delivers a chat message to the participant; never advances the script.
    pub fn deliver(&mut self, msg: &WireMessage) -> Result<(), ScriptError> {
        let (next, _) = dh_session_step(&self.state, SessionInput::Incoming(msg.clone()))?;
        self.state = next;
        Ok(())
    }

    /// Performs the current step. A wrong or invalid input leaves both the
    /// script position and the participant untouched.
    pub fn perform(&mut self, input: StepInput) -> Result<StepOutcome, ScriptError> {
        let step = self.current().ok_or(ScriptError::Finished)?;
        if step.action != input.action() {
            return Err(ScriptError::WrongStep {
                expected: step.action,
                got: input.action(),
            });
        }
        if step.validation == Validation::PeerPublicWaiting && self.state.inbox().is_none() {
            return Err(SessionError::NothingReceived.into());
        }
        let action = match input {
            StepInput::PickSecret(secret) => {
                if self.state.params().is_none() {
                    return Err(ScriptError::NoParams);
                }
                LocalAction::PickSecret(secret)
            }
            StepInput::SendPublic => LocalAction::SendPublic,
            StepInput::ReceivePublic => LocalAction::ReceivePublic,
            StepInput::ComputeShared => LocalAction::ComputeShared,
            StepInput::Reveal => {
                if self.state.phase() != Phase::SharedComputed {
                    return Err(SessionError::OutOfOrder {
                        action: "reveal",
                        phase: self.state.phase(),
                    }
                    .into());
                }
                self.cursor += 1;
                return Ok(StepOutcome::Revealed(self.reveal()));
            }
        };
        let (next, out) = dh_session_step(&self.state, SessionInput::Local(action))?;
        self.state = next;
        self.cursor += 1;
        Ok(StepOutcome::Sent(out))
    }

    /// The explanation from this participant's point of view: their own
    /// secret is known, the partner's is not.
    pub fn reveal(&self) -> Explanation {
        dh_transcript_explain(&ExchangeRecord {
            params: self.state.params(),
            first: PartyRecord {
                name: self.state.name().to_string(),
                secret: self.state.keypair().map(|k| k.secret()),
                public: self.state.public_value(),
            },
            second: PartyRecord {
                name: self.state.peer().unwrap_or_default().to_string(),
                secret: None,
                public: self.state.peer_public(),
            },
        })
    }
}
