//! The bundled person-in-the-middle strategy.
//!
//! The attacker keeps one key pair per victim. Each public value travelling
//! toward a victim is swapped for the attacker's own public value for that
//! victim, so each victim unknowingly agrees a secret with the attacker.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::room::{Decision, Interceptor};
use super::wire::{DhPublicPayload, Payload, WireMessage};
use crate::dh::{dh_keygen, dh_shared_secret, residue_to_color, DhKeyPair, DhParams};
use crate::error::MathError;

/// How many times a side key is redrawn to keep the two secrets apart.
const REDRAWS: usize = 64;

/// The attacker's half of the exchange with one victim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackerSide {
    pub keypair: DhKeyPair,
    /// The victim's real public value, once intercepted.
    pub victim_public: Option<u64>,
    /// Secret shared with the victim, once both halves are known.
    pub secret: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Attacker {
    name: String,
    rng: ChaCha8Rng,
    fixed: BTreeMap<String, u64>,
    params: Option<DhParams>,
    victims: Vec<String>,
    sides: BTreeMap<String, AttackerSide>,
    seen: BTreeMap<String, u64>,
}

impl Attacker {
    pub fn new(name: impl Into<String>, seed: u64) -> Self {
        Self {
            name: name.into(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            fixed: BTreeMap::new(),
            params: None,
            victims: Vec::new(),
            sides: BTreeMap::new(),
            seen: BTreeMap::new(),
        }
    }

    /// Uses `secret` as the exponent toward `victim` instead of drawing one.
    pub fn with_fixed_secret(mut self, victim: impl Into<String>, secret: u64) -> Self {
        self.fixed.insert(victim.into(), secret);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> Option<DhParams> {
        self.params
    }

    /// The two members being attacked, in the order they joined.
    pub fn victims(&self) -> &[String] {
        &self.victims
    }

    pub fn side(&self, victim: &str) -> Option<&AttackerSide> {
        self.sides.get(victim)
    }

    /// The secret the attacker shares with `victim`, once known.
    pub fn side_secret(&self, victim: &str) -> Option<u64> {
        self.sides.get(victim).and_then(|s| s.secret)
    }

    fn note_member(&mut self, name: &str) {
        if name != self.name && self.victims.len() < 2 && !self.victims.iter().any(|v| v == name) {
            self.victims.push(name.to_string());
        }
    }

    fn other_victim(&self, sender: &str) -> Option<String> {
        match self.victims.as_slice() {
            [a, b] if a == sender => Some(b.clone()),
            [a, b] if b == sender => Some(a.clone()),
            _ => None,
        }
    }

    fn settle(&mut self, victim: &str, params: &DhParams) -> Result<(), MathError> {
        let public = self.seen.get(victim).copied();
        if let (Some(side), Some(public)) = (self.sides.get_mut(victim), public) {
            side.victim_public = Some(public);
            side.secret = Some(dh_shared_secret(&side.keypair, public, params)?.value);
        }
        Ok(())
    }

    /// Creates the key pair toward `victim` on first use.
    ///
    /// If the other side's secret is already settled and this victim's
    /// public value is known, the draw is repeated (a bounded number of
    /// times) until the two secrets differ, so the attack always ends with
    /// two different colors. A fixed secret is used as given.
    fn ensure_side(&mut self, victim: &str, params: &DhParams) -> Result<(), MathError> {
        if self.sides.contains_key(victim) {
            return Ok(());
        }
        let keypair = match self.fixed.get(victim) {
            Some(&secret) => DhKeyPair::from_secret(params, secret)?,
            None => {
                let avoid = self
                    .sides
                    .iter()
                    .find(|(name, _)| *name != victim)
                    .and_then(|(_, s)| s.secret);
                let mut keypair = dh_keygen(params, &mut self.rng);
                if let (Some(avoid), Some(&public)) = (avoid, self.seen.get(victim)) {
                    for _ in 0..REDRAWS {
                        if dh_shared_secret(&keypair, public, params)?.value != avoid {
                            break;
                        }
                        keypair = dh_keygen(params, &mut self.rng);
                    }
                }
                keypair
            }
        };
        self.sides.insert(
            victim.to_string(),
            AttackerSide {
                keypair,
                victim_public: None,
                secret: None,
            },
        );
        Ok(())
    }
}

/// Decides what happens to one intercepted message.
///
/// Parameters and everything that is not a public value between the two
/// victims are forwarded. A public value from one victim is replaced by the
/// attacker's public value for the other victim, under the same sender name.
pub fn mitm_attack(attacker: &mut Attacker, message: &WireMessage) -> Decision {
    match &message.payload {
        Payload::Join(join) => {
            for m in &join.members {
                attacker.note_member(m);
            }
            attacker.note_member(&message.sender);
            Decision::Forward
        }
        Payload::DhParams(params) => {
            attacker.params.get_or_insert(*params);
            Decision::Forward
        }
        Payload::DhPublic(public) => {
            let (Some(params), Some(toward)) = (attacker.params, attacker.other_victim(&message.sender))
            else {
                return Decision::Forward;
            };
            attacker.seen.insert(message.sender.clone(), public.value);
            let result = (|| -> Result<Payload, MathError> {
                attacker.settle(&message.sender, &params)?;
                attacker.ensure_side(&toward, &params)?;
                attacker.settle(&toward, &params)?;
                let value = attacker.sides[&toward].keypair.public_value();
                Ok(Payload::DhPublic(DhPublicPayload {
                    value,
                    color: residue_to_color(value, &params)?,
                }))
            })();
            match result {
                Ok(payload) => Decision::Substitute(payload),
                Err(_) => Decision::Forward,
            }
        }
        _ => Decision::Forward,
    }
}

impl Interceptor for Attacker {
    fn intercept(&mut self, message: &WireMessage) -> Decision {
        mitm_attack(self, message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::wire::JoinPayload;

    fn p23() -> DhParams {
        DhParams::new(23, 5).unwrap()
    }

    fn public(sender: &str, value: u64) -> WireMessage {
        WireMessage::new(
            "r",
            sender,
            Payload::DhPublic(DhPublicPayload {
                value,
                color: residue_to_color(value, &p23()).unwrap(),
            }),
        )
    }

    fn primed(attacker: Attacker) -> Attacker {
        let mut attacker = attacker;
        for n in ["alice", "bob"] {
            let join = WireMessage::new("r", n, Payload::Join(JoinPayload::default()));
            assert_eq!(mitm_attack(&mut attacker, &join), Decision::Forward);
        }
        let params = WireMessage::new("r", "alice", Payload::DhParams(p23()));
        assert_eq!(mitm_attack(&mut attacker, &params), Decision::Forward);
        attacker
    }

    #[test]
    fn worked_substitution() {
        // Alice a=4 (A=4), Bob b=3 (B=10), attacker m=6 (M=8) on both sides
        let mut m = primed(
            Attacker::new("mallory", 0)
                .with_fixed_secret("alice", 6)
                .with_fixed_secret("bob", 6),
        );
        let Decision::Substitute(Payload::DhPublic(to_bob)) = mitm_attack(&mut m, &public("alice", 4)) else {
            panic!()
        };
        assert_eq!(to_bob.value, 8);
        let Decision::Substitute(Payload::DhPublic(to_alice)) = mitm_attack(&mut m, &public("bob", 10)) else {
            panic!()
        };
        assert_eq!(to_alice.value, 8);
        // 8^4 mod 23 = 2 = 4^6 mod 23; 8^3 mod 23 = 6 = 10^6 mod 23
        assert_eq!(m.side_secret("alice"), Some(2));
        assert_eq!(m.side_secret("bob"), Some(6));
        assert_eq!(m.side("alice").unwrap().victim_public, Some(4));
    }

    #[test]
    fn unknown_senders_and_other_traffic_pass() {
        let mut m = primed(Attacker::new("mallory", 1));
        assert_eq!(mitm_attack(&mut m, &public("carol", 4)), Decision::Forward);
        let chat = WireMessage::new("r", "alice", Payload::chat("hi"));
        assert_eq!(mitm_attack(&mut m, &chat), Decision::Forward);
        let done = WireMessage::new("r", "alice", Payload::DhDone);
        assert_eq!(mitm_attack(&mut m, &done), Decision::Forward);
        let mut fresh = Attacker::new("mallory", 1);
        assert_eq!(mitm_attack(&mut fresh, &public("alice", 4)), Decision::Forward);
    }

    #[test]
    fn victims_come_from_join_members() {
        let mut m = Attacker::new("mallory", 2);
        let join = WireMessage::new(
            "r",
            "bob",
            Payload::Join(JoinPayload {
                members: vec!["mallory".into(), "alice".into(), "bob".into()],
                bot: None,
            }),
        );
        mitm_attack(&mut m, &join);
        assert_eq!(m.victims(), ["alice", "bob"]);
    }

    #[test]
    fn secrets_differ_when_drawn() {
        for seed in 0..300 {
            let mut m = primed(Attacker::new("mallory", seed));
            let a = (seed % 21) + 1;
            let b = ((seed * 7) % 21) + 1;
            let pa = crate::modmath::modpow(5, a, 23).unwrap();
            let pb = crate::modmath::modpow(5, b, 23).unwrap();
            let Decision::Substitute(Payload::DhPublic(to_bob)) = mitm_attack(&mut m, &public("alice", pa)) else {
                panic!()
            };
            let Decision::Substitute(Payload::DhPublic(to_alice)) = mitm_attack(&mut m, &public("bob", pb)) else {
                panic!()
            };
            let s_a = crate::modmath::modpow(to_alice.value, a, 23).unwrap();
            let s_b = crate::modmath::modpow(to_bob.value, b, 23).unwrap();
            assert_eq!(m.side_secret("alice"), Some(s_a));
            assert_eq!(m.side_secret("bob"), Some(s_b));
            assert_ne!(s_a, s_b, "seed {seed}");
        }
    }
}
