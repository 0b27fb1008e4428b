//! Hybrid sealing: a toy block cipher encrypts the message, the recipient's
//! public key wraps the symmetric key seed, and the sender's private key
//! optionally signs a checksum of the ciphertext.

use serde::{Deserialize, Serialize};

use crate::asym::{private_transform, public_transform, RsaPublicKey, ToyRsaKeyPair};
use crate::classical::{
    toyblock_decrypt_bytes, toyblock_encrypt_bytes, BitPermutation, ToyBlockKey, DEFAULT_ROUNDS,
};
use crate::error::{CipherError, HybridError};

/// Checksum multiplier. A single flipped bit changes the checksum modulo
/// any `n` that is odd and not a multiple of 31.
const CHECKSUM_BASE: u64 = 31;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridEnvelope {
    pub wrapped_key: u64,
    #[serde(with = "hex::serde")]
    pub body: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<u64>,
}

impl HybridEnvelope {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("envelope serializes")
    }

    pub fn from_line(line: &str) -> Result<Self, HybridError> {
        serde_json::from_str(line).map_err(|e| HybridError::Malformed(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Authenticity {
    Verified,
    Unverified,
    Failed,
}

impl std::fmt::Display for Authenticity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Authenticity::Verified => "verified",
            Authenticity::Unverified => "unverified",
            Authenticity::Failed => "FAILED",
        })
    }
}

/// Polynomial rolling checksum `sum(b_i * 31^(L-1-i)) mod n`.
pub fn body_checksum(body: &[u8], n: u64) -> u64 {
    body.iter()
        .fold(0u64, |h, &b| (h * CHECKSUM_BASE + b as u64) % n)
}

/// Round keys for the body cipher, expanded from the seed.
pub fn symmetric_key(seed: u64) -> ToyBlockKey {
    ToyBlockKey::from_seed(seed, DEFAULT_ROUNDS, BitPermutation::nibble_swap())
        .expect("default rounds > 0")
}

pub fn hybrid_seal(
    message: &str,
    recipient: &RsaPublicKey,
    sender: Option<&ToyRsaKeyPair>,
    seed: u64,
) -> Result<HybridEnvelope, HybridError> {
    if message.is_empty() {
        return Err(HybridError::EmptyMessage);
    }
    if seed >= recipient.n {
        return Err(HybridError::SeedTooLarge {
            seed,
            n: recipient.n,
        });
    }
    let plain = message
        .chars()
        .enumerate()
        .map(|(position, c)| {
            if c.is_ascii() {
                Ok(c as u8)
            } else {
                Err(CipherError::NotEightBit {
                    symbol: c,
                    position,
                })
            }
        })
        .collect::<Result<Vec<u8>, _>>()?;
    let body = toyblock_encrypt_bytes(&plain, &symmetric_key(seed));
    let wrapped_key = public_transform(seed, recipient)?;
    let signature = sender
        .map(|pair| private_transform(body_checksum(&body, pair.n()), pair))
        .transpose()?;
    Ok(HybridEnvelope {
        wrapped_key,
        body,
        signature,
    })
}

/// Unwraps the key, decrypts the body and checks the signature if both a
/// signature and a sender key are at hand.
pub fn hybrid_open(
    envelope: &HybridEnvelope,
    recipient: &ToyRsaKeyPair,
    sender_public: Option<&RsaPublicKey>,
) -> Result<(String, Authenticity), HybridError> {
    if envelope.body.is_empty() {
        return Err(HybridError::Malformed("empty body".into()));
    }
    if envelope.wrapped_key >= recipient.n() {
        return Err(HybridError::Malformed(format!(
            "wrapped key {} is not below the recipient modulus {}",
            envelope.wrapped_key,
            recipient.n()
        )));
    }
    let seed = private_transform(envelope.wrapped_key, recipient)?;
    let plain = toyblock_decrypt_bytes(&envelope.body, &symmetric_key(seed));
    let message: String = plain.into_iter().map(char::from).collect();
    let authenticity = match (envelope.signature, sender_public) {
        (Some(sig), Some(key)) => {
            let expected = body_checksum(&envelope.body, key.n);
            match public_transform(sig, key) {
                Ok(h) if h == expected => Authenticity::Verified,
                _ => Authenticity::Failed,
            }
        }
        _ => Authenticity::Unverified,
    };
    Ok((message, authenticity))
}
