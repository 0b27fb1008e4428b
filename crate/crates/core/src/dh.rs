//! Diffie-Hellman over a small prime, with every residue rendered as a color.
//!
//! "Mixing" two colors is modular exponentiation on the numbers behind
//! them; the color is only a rendering of the residue.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::MathError;
use crate::modmath::{is_prime, is_primitive_root, modpow};

/// Largest modulus whose residues all fit the 0-99 color slots.
pub const CLASSROOM_MAX_P: u64 = 100;
/// Largest modulus accepted in demo mode.
pub const DEMO_MAX_P: u64 = 1 << 31;

pub const SATURATION: u8 = 80;
pub const LIGHTNESS: u8 = 50;

/// Public group parameters: a prime modulus and a primitive root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct DhParams {
    p: u64,
    g: u64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    p: u64,
    g: u64,
}

impl TryFrom<RawParams> for DhParams {
    type Error = MathError;

    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        DhParams::new(raw.p, raw.g)
    }
}

impl From<DhParams> for RawParams {
    fn from(params: DhParams) -> Self {
        RawParams {
            p: params.p,
            g: params.g,
        }
    }
}

impl DhParams {
    /// Demo-mode parameters: any prime below 2^31 with a primitive root `g`.
    pub fn new(p: u64, g: u64) -> Result<Self, MathError> {
        if p >= DEMO_MAX_P {
            return Err(MathError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(MathError::NotPrime(p));
        }
        if g < 2 || g >= p {
            return Err(MathError::OutOfRange {
                value: g,
                low: 2,
                high: p,
            });
        }
        if !is_primitive_root(g, p)? {
            return Err(MathError::NotGenerator { g, p });
        }
        Ok(Self { p, g })
    }

    /// Parameters whose residues all have a slot in the 0-99 color range.
    pub fn classroom(p: u64, g: u64) -> Result<Self, MathError> {
        if p > CLASSROOM_MAX_P {
            return Err(MathError::ModulusTooLarge {
                p,
                limit: CLASSROOM_MAX_P,
            });
        }
        Self::new(p, g)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn g(&self) -> u64 {
        self.g
    }

    pub fn is_classroom(&self) -> bool {
        self.p <= CLASSROOM_MAX_P
    }

    /// Checks `low <= value < p`.
    pub fn check_residue(&self, value: u64, low: u64) -> Result<(), MathError> {
        if value < low || value >= self.p {
            return Err(MathError::OutOfRange {
                value,
                low,
                high: self.p,
            });
        }
        Ok(())
    }
}

/// p = 97, g = 5: the largest prime below 100 and its smallest generator.
impl Default for DhParams {
    fn default() -> Self {
        Self { p: 97, g: 5 }
    }
}

/// A secret exponent and its public value `g^secret mod p`.
///
/// Not serializable, and `Debug` hides the secret.
#[derive(Clone, PartialEq, Eq)]
pub struct DhKeyPair {
    secret: u64,
    public_value: u64,
}

impl DhKeyPair {
    /// Builds a pair from a chosen secret in `[1, p - 1)`.
    pub fn from_secret(params: &DhParams, secret: u64) -> Result<Self, MathError> {
        if secret < 1 || secret >= params.p - 1 {
            return Err(MathError::OutOfRange {
                value: secret,
                low: 1,
                high: params.p - 1,
            });
        }
        Ok(Self {
            secret,
            public_value: modpow(params.g, secret, params.p)?,
        })
    }

    pub fn secret(&self) -> u64 {
        self.secret
    }

    pub fn public_value(&self) -> u64 {
        self.public_value
    }
}

impl fmt::Debug for DhKeyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DhKeyPair")
            .field("secret", &"<hidden>")
            .field("public_value", &self.public_value)
            .finish()
    }
}

/// Draws a secret uniformly from `[1, p - 1)`.
///
/// A secret of 1 is possible and simply gives public value `g`.
pub fn dh_keygen<R: Rng + ?Sized>(params: &DhParams, rng: &mut R) -> DhKeyPair {
    let secret = if params.p <= 3 {
        1
    } else {
        rng.gen_range(1..params.p - 1)
    };
    DhKeyPair::from_secret(params, secret).expect("secret drawn in range")
}

/// Why a shared secret is trivially predictable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degenerate {
    /// Peer sent 1: the shared secret is 1 whatever the own secret.
    PeerIsOne,
    /// Peer sent p - 1: the shared secret is 1 or p - 1.
    PeerIsMinusOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedSecret {
    pub value: u64,
    pub warning: Option<Degenerate>,
}

/// `peer_public^own.secret mod p`. Peer values outside `[1, p)` are refused;
/// weak ones are accepted with a warning.
pub fn dh_shared_secret(
    own: &DhKeyPair,
    peer_public: u64,
    params: &DhParams,
) -> Result<SharedSecret, MathError> {
    params.check_residue(peer_public, 1)?;
    let warning = if peer_public == 1 {
        Some(Degenerate::PeerIsOne)
    } else if peer_public == params.p - 1 {
        Some(Degenerate::PeerIsMinusOne)
    } else {
        None
    };
    Ok(SharedSecret {
        value: modpow(peer_public, own.secret, params.p)?,
        warning,
    })
}

/// A residue drawn as an HSL color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColorSwatch {
    pub residue: u64,
    pub hue: u16,
    pub saturation: u8,
    pub lightness: u8,
}

impl ColorSwatch {
    pub fn css(&self) -> String {
        format!("hsl({}, {}%, {}%)", self.hue, self.saturation, self.lightness)
    }
}

/// Hue is `round(residue * 360 / p) mod 360` with halves rounded up;
/// saturation and lightness are fixed. Injective whenever `p <= 360`.
pub fn residue_to_color(residue: u64, params: &DhParams) -> Result<ColorSwatch, MathError> {
    params.check_residue(residue, 0)?;
    let p = params.p as u128;
    let hue = ((2 * residue as u128 * 360 + p) / (2 * p)) % 360;
    Ok(ColorSwatch {
        residue,
        hue: hue as u16,
        saturation: SATURATION,
        lightness: LIGHTNESS,
    })
}

/// What one party of an exchange did, as known to whoever explains it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartyRecord {
    pub name: String,
    pub secret: Option<u64>,
    pub public: Option<u64>,
}

/// A completed (or partial) two-party exchange, secrets included.
///
/// This is local reveal data; it never travels over the channel.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExchangeRecord {
    pub params: Option<DhParams>,
    pub first: PartyRecord,
    pub second: PartyRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplainStep {
    pub number: usize,
    pub label: String,
    pub value: u64,
    pub color: Option<ColorSwatch>,
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepGap {
    pub step: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Explanation {
    pub steps: Vec<ExplainStep>,
    pub incomplete: Option<StepGap>,
}

/// Pairs each color of an exchange with its number and the calculation
/// that produced it:
///
/// step 1 the modulus, step 2 the shared starting color `g`, steps 3-4
/// each public value `g^secret mod p`, steps 5-6 each side's shared value
/// `peer^secret mod p`.
///
/// A party whose secret is unknown still gets its public step, written
/// `g^? mod p`. Stops at the first step whose inputs are missing and
/// records the gap.
pub fn dh_transcript_explain(record: &ExchangeRecord) -> Explanation {
    let mut out = Explanation::default();
    let Some(params) = record.params else {
        return out;
    };
    let (p, g) = (params.p, params.g);
    let color = |v: u64| residue_to_color(v, &params).ok();
    let mut push = |label: String, value: u64, formula: String| {
        let number = out.steps.len() + 1;
        out.steps.push(ExplainStep {
            number,
            label,
            value,
            color: color(value),
            formula,
        });
    };
    push("public modulus".into(), p, format!("p = {p}"));
    push("shared starting color".into(), g, format!("g = {g}"));

    let parties = [&record.first, &record.second];
    let mut publics = [0u64; 2];
    for (i, party) in parties.iter().enumerate() {
        let step = 3 + i;
        let Some(public) = party.public else {
            out.incomplete = Some(StepGap {
                step,
                reason: format!("public value of {} is missing", display_name(party, i)),
            });
            return out;
        };
        let formula = match party.secret {
            Some(secret) => {
                let computed = modpow(g, secret, p).unwrap_or(u64::MAX);
                if computed != public {
                    out.incomplete = Some(StepGap {
                        step,
                        reason: format!(
                            "{} announced {public} but {g}^{secret} mod {p} = {computed}",
                            display_name(party, i)
                        ),
                    });
                    return out;
                }
                format!("{g}^{secret} mod {p} = {public}")
            }
            // someone else's exchange: only the public half is known
            None => format!("{g}^? mod {p} = {public}"),
        };
        publics[i] = public;
        push(format!("public color of {}", display_name(party, i)), public, formula);
    }
    for (i, party) in parties.iter().enumerate() {
        let Some(secret) = party.secret else {
            out.incomplete = Some(StepGap {
                step: 5 + i,
                reason: format!("the secret of {} stays with them", display_name(party, i)),
            });
            return out;
        };
        let peer = publics[1 - i];
        let shared = modpow(peer, secret, p).unwrap_or_default();
        push(
            format!("shared color computed by {}", display_name(party, i)),
            shared,
            format!("{peer}^{secret} mod {p} = {shared}"),
        );
    }
    out
}

fn display_name(party: &PartyRecord, index: usize) -> String {
    if party.name.is_empty() {
        ["first party", "second party"][index].to_string()
    } else {
        party.name.clone()
    }
}
