//! Scenario playgrounds: a narrative, a challenge, the short list of
//! operations a student may use, and a rule that decides the answer.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::script::RoleScript;
use crate::alphabet::{Alphabet, TextMode};
use crate::analysis::otp_key_for;
use crate::classical::{caesar_encrypt, railfence_encrypt, RailKey, ShiftKey};
use crate::dh::DhParams;
use crate::modmath::{discrete_log_bruteforce, modpow};
use crate::work::WorkCount;

/// Every operation a playground can expose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpId {
    CaesarEncrypt,
    CaesarDecrypt,
    CaesarBruteforce,
    CaesarFrequencyAttack,
    LetterFrequencies,
    RailfenceEncrypt,
    RailfenceDecrypt,
    OtpEncrypt,
    OtpDecrypt,
    OtpKeyFor,
    OtpBruteforce,
    CharsToBits,
    BitsToChars,
    ToyblockEncrypt,
    ToyblockDecrypt,
    Modpow,
    DiscreteLog,
    ResidueColor,
    Multiply,
    Factor,
    RsaPublicTransform,
    RsaPrivateTransform,
    HybridSeal,
    HybridOpen,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Challenge {
    pub text: String,
    /// Starting material handed to the student, e.g. a ciphertext.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub data: serde_json::Value,
}

/// Why a system was introduced and what breaks it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Milestone {
    pub step: u32,
    pub motivation: String,
    pub limitation: String,
}

/// How a submitted answer is judged. Rules that ask for a key re-encrypt
/// the hidden plaintext with the submitted key instead of comparing keys,
/// so any key that works is accepted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CheckerRule {
    /// Letters of the answer, uppercased, equal `expected`'s; everything
    /// else is ignored.
    ExactText { expected: String },
    CaesarShift { plaintext: String, ciphertext: String },
    OtpKey { plaintext: String, ciphertext: String },
    RailCount { plaintext: String, ciphertext: String },
    /// The shared secret behind two public values.
    DhShared { params: DhParams, public_a: u64, public_b: u64 },
    /// Any non-trivial factor of `n`.
    Factor { n: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub narrative: String,
    pub allowed_ops: Vec<OpId>,
    pub challenge: Challenge,
    pub checker: CheckerRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<RoleScript>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub milestone: Option<Milestone>,
}

/// The part of a scenario every participant may see: no checker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioAnnouncement {
    pub name: String,
    pub narrative: String,
    pub allowed_ops: Vec<OpId>,
    pub challenge: Challenge,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<RoleScript>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub milestone: Option<Milestone>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario {name}: {reason}")]
    Invalid { name: String, reason: String },
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn announcement(&self) -> ScenarioAnnouncement {
        ScenarioAnnouncement {
            name: self.name.clone(),
            narrative: self.narrative.clone(),
            allowed_ops: self.allowed_ops.clone(),
            challenge: self.challenge.clone(),
            script: self.script.clone(),
            milestone: self.milestone.clone(),
        }
    }

    pub fn allows(&self, op: OpId) -> bool {
        self.allowed_ops.contains(&op)
    }

    /// Checks that the rule's hidden data is self-consistent, so that a
    /// correct answer exists.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |reason: &str| ScenarioError::Invalid {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if self.name.trim().is_empty() {
            return Err(invalid("empty name"));
        }
        if self.allowed_ops.is_empty() {
            return Err(invalid("no operations allowed"));
        }
        let latin = Alphabet::latin();
        let solvable = match &self.checker {
            CheckerRule::ExactText { expected } => !expected.trim().is_empty(),
            CheckerRule::CaesarShift {
                plaintext,
                ciphertext,
            } => (0..latin.len() as i64).any(|s| caesar_matches(plaintext, ciphertext, s, &latin)),
            CheckerRule::OtpKey {
                plaintext,
                ciphertext,
            } => otp_key_for(plaintext, ciphertext, &latin).is_ok(),
            CheckerRule::RailCount {
                plaintext,
                ciphertext,
            } => (2..=plaintext.chars().count().max(2)).any(|r| rail_matches(plaintext, ciphertext, r)),
            CheckerRule::DhShared {
                params,
                public_a,
                public_b,
            } => {
                params.check_residue(*public_a, 1).is_ok() && params.check_residue(*public_b, 1).is_ok()
            }
            CheckerRule::Factor { n } => *n >= 4 && !crate::modmath::is_prime(*n),
        };
        if !solvable {
            return Err(invalid("checker has no correct answer"));
        }
        Ok(())
    }
}

fn caesar_matches(plaintext: &str, ciphertext: &str, shift: i64, alphabet: &Alphabet) -> bool {
    ShiftKey::new(shift, alphabet)
        .and_then(|k| caesar_encrypt(plaintext, k, alphabet, TextMode::Preserve))
        .is_ok_and(|c| c == ciphertext)
}

fn rail_matches(plaintext: &str, ciphertext: &str, rails: usize) -> bool {
    RailKey::new(rails).is_ok_and(|k| railfence_encrypt(plaintext, k) == ciphertext)
}

fn letters(text: &str) -> String {
    text.chars()
        .filter(char::is_ascii_alphabetic)
        .map(|c| c.to_ascii_uppercase())
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Submission {
    #[serde(default)]
    pub answer: String,
    #[serde(default)]
    pub ops_used: Vec<OpId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { reason: String },
}

impl Verdict {
    fn fail(reason: impl Into<String>) -> Self {
        Verdict::Fail {
            reason: reason.into(),
        }
    }

    pub fn passed(&self) -> bool {
        *self == Verdict::Pass
    }
}

pub const REASON_NOT_IN_PLAYGROUND: &str = "operation not in playground";
pub const REASON_NO_ANSWER: &str = "no answer";

/// Judges a submission. Using an operation outside the playground fails
/// even when the answer is right.
pub fn scenario_check(config: &ScenarioConfig, submission: &Submission) -> Verdict {
    if submission.ops_used.iter().any(|op| !config.allows(*op)) {
        return Verdict::fail(REASON_NOT_IN_PLAYGROUND);
    }
    let answer = submission.answer.trim();
    if answer.is_empty() {
        return Verdict::fail(REASON_NO_ANSWER);
    }
    let latin = Alphabet::latin();
    let number = || answer.parse::<u64>().ok();
    let ok = match &config.checker {
        CheckerRule::ExactText { expected } => letters(answer) == letters(expected),
        CheckerRule::CaesarShift {
            plaintext,
            ciphertext,
        } => answer
            .parse::<i64>()
            .is_ok_and(|s| caesar_matches(plaintext, ciphertext, s, &latin)),
        CheckerRule::OtpKey {
            plaintext,
            ciphertext,
        } => crate::classical::PadKey::new(answer, &latin)
            .and_then(|k| crate::classical::otp_encrypt(plaintext, &k, &latin, TextMode::Preserve))
            .is_ok_and(|c| c == *ciphertext),
        CheckerRule::RailCount {
            plaintext,
            ciphertext,
        } => number().is_some_and(|r| rail_matches(plaintext, ciphertext, r as usize)),
        CheckerRule::DhShared {
            params,
            public_a,
            public_b,
        } => {
            let mut work = WorkCount::default();
            let shared = discrete_log_bruteforce(params.g(), *public_a, params.p(), &mut work)
                .ok()
                .flatten()
                .and_then(|a| modpow(*public_b, a, params.p()).ok());
            shared.is_some() && number() == shared
        }
        CheckerRule::Factor { n } => number().is_some_and(|f| f > 1 && f < *n && n % f == 0),
    };
    if ok {
        Verdict::Pass
    } else {
        Verdict::fail("wrong answer")
    }
}

/// The milestone scenarios shipped with the suite, in ladder order.
pub fn bundled_scenarios() -> Vec<ScenarioConfig> {
    BUNDLED
        .iter()
        .map(|(_, text)| ScenarioConfig::parse(text).expect("bundled scenarios are valid"))
        .collect()
}

/// Looks up a bundled scenario by file stem or scenario name.
pub fn bundled_scenario(name: &str) -> Option<ScenarioConfig> {
    BUNDLED
        .iter()
        .map(|(stem, text)| (stem, ScenarioConfig::parse(text).expect("bundled scenarios are valid")))
        .find(|(stem, c)| **stem == name || c.name == name)
        .map(|(_, c)| c)
}

const BUNDLED: &[(&str, &str)] = &[
    ("caesar", include_str!("../../scenarios/caesar.json")),
    ("otp", include_str!("../../scenarios/otp.json")),
    ("toyblock", include_str!("../../scenarios/toyblock.json")),
    ("dh", include_str!("../../scenarios/dh.json")),
    ("mitm", include_str!("../../scenarios/mitm.json")),
    ("rsa", include_str!("../../scenarios/rsa.json")),
    ("hybrid", include_str!("../../scenarios/hybrid.json")),
];
