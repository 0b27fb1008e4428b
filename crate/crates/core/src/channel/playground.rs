//! Runs suite operations on behalf of a student, refusing any operation the
//! scenario does not list, and remembers which ones were used.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::scenario::{scenario_check, OpId, ScenarioConfig, Submission, Verdict};
use crate::alphabet::{Alphabet, TextMode};
use crate::analysis::{
    caesar_bruteforce, caesar_frequency_attack, letter_frequencies, otp_bruteforce, otp_key_for,
    FrequencyTable,
};
use crate::asym::{private_transform, public_transform, rsa_keygen, RsaPublicKey};
use crate::classical::{
    bits_to_chars, caesar_decrypt, caesar_encrypt, chars_to_bits, otp_decrypt, otp_encrypt,
    railfence_decrypt, railfence_encrypt, toyblock_decrypt_bytes, toyblock_encrypt_bytes,
    BitPermutation, BitString, PadKey, RailKey, ShiftKey, ToyBlockKey,
};
use crate::dh::{residue_to_color, DhParams};
use crate::hybrid::{hybrid_open, hybrid_seal, HybridEnvelope};
use crate::modmath::{discrete_log_bruteforce, modpow_counted, multiply, smallest_factor};
use crate::work::WorkCount;

/// One operation call with its arguments, as a student's client sends it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OpCall {
    CaesarEncrypt { text: String, shift: i64 },
    CaesarDecrypt { text: String, shift: i64 },
    CaesarBruteforce { text: String },
    CaesarFrequencyAttack { text: String },
    LetterFrequencies { text: String },
    RailfenceEncrypt { text: String, rails: usize },
    RailfenceDecrypt { text: String, rails: usize },
    OtpEncrypt { text: String, key: String },
    OtpDecrypt { text: String, key: String },
    OtpKeyFor { plaintext: String, ciphertext: String },
    /// The first `limit` candidates of the exhaustive search.
    OtpBruteforce { text: String, limit: usize },
    CharsToBits { text: String },
    BitsToChars { bits: String },
    ToyblockEncrypt { hex: String, round_keys: Vec<u8> },
    ToyblockDecrypt { hex: String, round_keys: Vec<u8> },
    Modpow { base: u64, exponent: u64, modulus: u64 },
    DiscreteLog { g: u64, target: u64, p: u64 },
    ResidueColor { residue: u64, p: u64, g: u64 },
    Multiply { a: u64, b: u64 },
    Factor { n: u64 },
    RsaPublicTransform { m: u64, n: u64, e: u64 },
    RsaPrivateTransform { c: u64, p: u64, q: u64, e: u64 },
    HybridSeal { message: String, n: u64, e: u64, seed: u64 },
    HybridOpen { envelope: HybridEnvelope, p: u64, q: u64, e: u64 },
}

impl OpCall {
    pub fn op(&self) -> OpId {
        match self {
            OpCall::CaesarEncrypt { .. } => OpId::CaesarEncrypt,
            OpCall::CaesarDecrypt { .. } => OpId::CaesarDecrypt,
            OpCall::CaesarBruteforce { .. } => OpId::CaesarBruteforce,
            OpCall::CaesarFrequencyAttack { .. } => OpId::CaesarFrequencyAttack,
            OpCall::LetterFrequencies { .. } => OpId::LetterFrequencies,
            OpCall::RailfenceEncrypt { .. } => OpId::RailfenceEncrypt,
            OpCall::RailfenceDecrypt { .. } => OpId::RailfenceDecrypt,
            OpCall::OtpEncrypt { .. } => OpId::OtpEncrypt,
            OpCall::OtpDecrypt { .. } => OpId::OtpDecrypt,
            OpCall::OtpKeyFor { .. } => OpId::OtpKeyFor,
            OpCall::OtpBruteforce { .. } => OpId::OtpBruteforce,
            OpCall::CharsToBits { .. } => OpId::CharsToBits,
            OpCall::BitsToChars { .. } => OpId::BitsToChars,
            OpCall::ToyblockEncrypt { .. } => OpId::ToyblockEncrypt,
            OpCall::ToyblockDecrypt { .. } => OpId::ToyblockDecrypt,
            OpCall::Modpow { .. } => OpId::Modpow,
            OpCall::DiscreteLog { .. } => OpId::DiscreteLog,
            OpCall::ResidueColor { .. } => OpId::ResidueColor,
            OpCall::Multiply { .. } => OpId::Multiply,
            OpCall::Factor { .. } => OpId::Factor,
            OpCall::RsaPublicTransform { .. } => OpId::RsaPublicTransform,
            OpCall::RsaPrivateTransform { .. } => OpId::RsaPrivateTransform,
            OpCall::HybridSeal { .. } => OpId::HybridSeal,
            OpCall::HybridOpen { .. } => OpId::HybridOpen,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlaygroundError {
    #[error("operation not in playground: {0:?}")]
    NotAllowed(OpId),
    #[error("{0}")]
    Failed(String),
}

fn failed(e: impl std::fmt::Display) -> PlaygroundError {
    PlaygroundError::Failed(e.to_string())
}

fn decode_hex(hex: &str) -> Result<Vec<u8>, PlaygroundError> {
    hex::decode(hex.trim()).map_err(failed)
}

fn toy_key(round_keys: Vec<u8>) -> Result<ToyBlockKey, PlaygroundError> {
    ToyBlockKey::new(round_keys, BitPermutation::nibble_swap()).map_err(failed)
}

/// A scenario's playground for one student.
#[derive(Debug, Clone)]
pub struct Playground {
    config: ScenarioConfig,
    used: Vec<OpId>,
}

impl Playground {
    pub fn new(config: ScenarioConfig) -> Self {
        Self {
            config,
            used: Vec::new(),
        }
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// Distinct operations used so far, in first-use order.
    pub fn ops_used(&self) -> &[OpId] {
        &self.used
    }

    pub fn call(&mut self, call: OpCall) -> Result<Value, PlaygroundError> {
        let op = call.op();
        if !self.config.allows(op) {
            return Err(PlaygroundError::NotAllowed(op));
        }
        if !self.used.contains(&op) {
            self.used.push(op);
        }
        run(call)
    }

    pub fn submit(&self, answer: impl Into<String>) -> Verdict {
        scenario_check(
            &self.config,
            &Submission {
                answer: answer.into(),
                ops_used: self.used.clone(),
            },
        )
    }
}

fn run(call: OpCall) -> Result<Value, PlaygroundError> {
    let latin = Alphabet::latin();
    let shift = |s: i64| ShiftKey::new(s, &latin).map_err(failed);
    let pad = |k: &str| PadKey::new(k, &latin).map_err(failed);
    let rails = |r: usize| RailKey::new(r).map_err(failed);
    let out = match call {
        OpCall::CaesarEncrypt { text, shift: s } => {
            json!({ "text": caesar_encrypt(&text, shift(s)?, &latin, TextMode::Preserve).map_err(failed)? })
        }
        OpCall::CaesarDecrypt { text, shift: s } => {
            json!({ "text": caesar_decrypt(&text, shift(s)?, &latin, TextMode::Preserve).map_err(failed)? })
        }
        OpCall::CaesarBruteforce { text } => {
            json!({ "candidates": caesar_bruteforce(&text, &latin).map_err(failed)? })
        }
        OpCall::CaesarFrequencyAttack { text } => {
            json!({ "ranking": caesar_frequency_attack(&text, &FrequencyTable::english(), &latin).map_err(failed)? })
        }
        OpCall::LetterFrequencies { text } => {
            json!({ "frequencies": letter_frequencies(&text, &latin).map_err(failed)? })
        }
        OpCall::RailfenceEncrypt { text, rails: r } => json!({ "text": railfence_encrypt(&text, rails(r)?) }),
        OpCall::RailfenceDecrypt { text, rails: r } => json!({ "text": railfence_decrypt(&text, rails(r)?) }),
        OpCall::OtpEncrypt { text, key } => {
            json!({ "text": otp_encrypt(&text, &pad(&key)?, &latin, TextMode::Preserve).map_err(failed)? })
        }
        OpCall::OtpDecrypt { text, key } => {
            json!({ "text": otp_decrypt(&text, &pad(&key)?, &latin, TextMode::Preserve).map_err(failed)? })
        }
        OpCall::OtpKeyFor {
            plaintext,
            ciphertext,
        } => json!({ "key": otp_key_for(&plaintext, &ciphertext, &latin).map_err(failed)?.as_str() }),
        OpCall::OtpBruteforce { text, limit } => {
            let candidates: Vec<_> = otp_bruteforce(&text, &latin).map_err(failed)?.take(limit).collect();
            json!({ "candidates": candidates })
        }
        OpCall::CharsToBits { text } => json!({ "bits": chars_to_bits(&text).map_err(failed)?.to_string() }),
        OpCall::BitsToChars { bits } => {
            let bits: BitString = bits.parse().map_err(failed)?;
            json!({ "text": bits_to_chars(&bits).map_err(failed)? })
        }
        OpCall::ToyblockEncrypt { hex, round_keys } => {
            let out = toyblock_encrypt_bytes(&decode_hex(&hex)?, &toy_key(round_keys)?);
            json!({ "hex": hex::encode(out) })
        }
        OpCall::ToyblockDecrypt { hex, round_keys } => {
            let out = toyblock_decrypt_bytes(&decode_hex(&hex)?, &toy_key(round_keys)?);
            json!({ "hex": hex::encode(&out), "bits": BitString::from_bytes(&out).to_string() })
        }
        OpCall::Modpow {
            base,
            exponent,
            modulus,
        } => {
            let mut work = WorkCount::default();
            let value = modpow_counted(base, exponent, modulus, &mut work).map_err(failed)?;
            json!({ "value": value, "work": work })
        }
        OpCall::DiscreteLog { g, target, p } => {
            let mut work = WorkCount::default();
            let exponent = discrete_log_bruteforce(g, target, p, &mut work).map_err(failed)?;
            json!({ "exponent": exponent, "work": work })
        }
        OpCall::ResidueColor { residue, p, g } => {
            let params = DhParams::new(p, g).map_err(failed)?;
            json!({ "color": residue_to_color(residue, &params).map_err(failed)? })
        }
        OpCall::Multiply { a, b } => {
            let mut work = WorkCount::default();
            let product = multiply(a, b, &mut work);
            json!({ "product": product.to_string(), "work": work })
        }
        OpCall::Factor { n } => {
            if n < 2 {
                return Err(PlaygroundError::Failed(format!("cannot factor {n}")));
            }
            let mut work = WorkCount::default();
            let factor = smallest_factor(n, &mut work);
            json!({ "factor": factor, "work": work })
        }
        OpCall::RsaPublicTransform { m, n, e } => {
            json!({ "value": public_transform(m, &RsaPublicKey { n, e }).map_err(failed)? })
        }
        OpCall::RsaPrivateTransform { c, p, q, e } => {
            let pair = rsa_keygen(p, q, e).map_err(failed)?;
            json!({ "value": private_transform(c, &pair).map_err(failed)? })
        }
        OpCall::HybridSeal { message, n, e, seed } => {
            json!({ "envelope": hybrid_seal(&message, &RsaPublicKey { n, e }, None, seed).map_err(failed)? })
        }
        OpCall::HybridOpen { envelope, p, q, e } => {
            let pair = rsa_keygen(p, q, e).map_err(failed)?;
            let (message, authenticity) = hybrid_open(&envelope, &pair, None).map_err(failed)?;
            json!({ "message": message, "authenticity": authenticity })
        }
    };
    Ok(out)
}
