use std::fmt::Write;

use anyhow::{bail, Context, Result};
use cryptopath_core::asym::{oneway_demo, private_transform, public_transform, rsa_keygen, RsaPublicKey};
use cryptopath_core::dh::{
    dh_keygen, dh_shared_secret, dh_transcript_explain, residue_to_color, ColorSwatch, DhKeyPair,
    DhParams, ExchangeRecord, PartyRecord,
};
use cryptopath_core::hybrid::{hybrid_open, hybrid_seal, Authenticity, HybridEnvelope};
use rand::Rng;
use serde_json::json;

use crate::args::{DhArgs, DhCmd, HybridCmd, OnewayCmd, RsaCmd, RsaPair, RsaPublic};
use crate::{read_file, rng, CommandResult};

fn swatch(c: &ColorSwatch) -> String {
    format!("{} ({})", c.css(), c.residue)
}

fn key_pair(params: &DhParams, given: Option<u64>, rng: &mut impl Rng) -> Result<DhKeyPair> {
    Ok(match given {
        Some(s) => DhKeyPair::from_secret(params, s)?,
        None => dh_keygen(params, rng),
    })
}

pub fn dh(cmd: DhCmd, seed: u64) -> Result<CommandResult> {
    match cmd {
        DhCmd::Demo(DhArgs { p, g, a, b }) => {
            let params = DhParams::new(p, g)?;
            let mut rng = rng(seed);
            let alice = key_pair(&params, a, &mut rng)?;
            let bob = key_pair(&params, b, &mut rng)?;
            let (pa, pb) = (alice.public_value(), bob.public_value());
            let sa = dh_shared_secret(&alice, pb, &params)?;
            let sb = dh_shared_secret(&bob, pa, &params)?;
            let color = |v| residue_to_color(v, &params);
            let (ca, cb, cs) = (color(pa)?, color(pb)?, color(sa.value)?);
            let mut report = format!("p={p} g={g}\n");
            writeln!(report, "A={pa}  {}", swatch(&ca)).unwrap();
            writeln!(report, "B={pb}  {}", swatch(&cb)).unwrap();
            write!(report, "shared={}  {}", sa.value, swatch(&cs)).unwrap();
            if sa.value != sb.value {
                write!(report, "\nsecond side computed {}", sb.value).unwrap();
            }
            if let Some(w) = sa.warning.or(sb.warning) {
                write!(report, "\nwarning: {w:?}").unwrap();
            }
            let json = json!({
                "params": params,
                "public_a": { "value": pa, "color": ca },
                "public_b": { "value": pb, "color": cb },
                "shared": { "value": sa.value, "color": cs },
                "shared_b": sb.value,
            });
            Ok(CommandResult::ok(report, json))
        }
        DhCmd::Explain { p, g, a, b, public_a, public_b, first, second } => {
            let params = DhParams::new(p, g)?;
            let party = |name: String, secret: Option<u64>, public: Option<u64>| -> Result<PartyRecord> {
                let public = match (secret, public) {
                    (_, Some(v)) => Some(v),
                    (Some(s), None) => Some(DhKeyPair::from_secret(&params, s)?.public_value()),
                    (None, None) => None,
                };
                Ok(PartyRecord { name, secret, public })
            };
            let record = ExchangeRecord {
                params: Some(params),
                first: party(first, a, public_a)?,
                second: party(second, b, public_b)?,
            };
            let ex = dh_transcript_explain(&record);
            let mut report = String::new();
            for s in &ex.steps {
                let color = s.color.map(|c| format!("  {}", c.css())).unwrap_or_default();
                writeln!(report, "{}. {}: {}{color}", s.number, s.label, s.formula).unwrap();
            }
            if let Some(gap) = &ex.incomplete {
                writeln!(report, "stops at step {}: {}", gap.step, gap.reason).unwrap();
            }
            Ok(CommandResult::ok(report, serde_json::to_value(&ex)?))
        }
    }
}

fn pair(k: &RsaPair) -> Result<cryptopath_core::asym::ToyRsaKeyPair> {
    Ok(rsa_keygen(k.p, k.q, k.e)?)
}

fn public(k: &RsaPublic) -> RsaPublicKey {
    RsaPublicKey { n: k.n, e: k.e }
}

pub fn rsa(cmd: RsaCmd) -> Result<CommandResult> {
    match cmd {
        RsaCmd::Keygen(k) => {
            let kp = pair(&k)?;
            let report = format!(
                "n={} e={} d={} (p-1)(q-1)={}\npublic key (n, e) = ({}, {})\nprivate key (n, d) = ({}, {})",
                kp.n(), kp.e(), kp.d(), kp.totient(), kp.n(), kp.e(), kp.n(), kp.d()
            );
            let json = json!({ "p": kp.p(), "q": kp.q(), "n": kp.n(), "e": kp.e(), "d": kp.d(), "totient": kp.totient() });
            Ok(CommandResult::ok(report, json))
        }
        RsaCmd::Lock { key, m } => {
            let c = public_transform(m, &public(&key))?;
            Ok(CommandResult::ok(format!("{m}^{} mod {} = {c}", key.e, key.n), json!({ "m": m, "c": c })))
        }
        RsaCmd::Unlock { key, c } => {
            let kp = pair(&key)?;
            let m = private_transform(c, &kp)?;
            Ok(CommandResult::ok(format!("{c}^{} mod {} = {m}", kp.d(), kp.n()), json!({ "c": c, "m": m })))
        }
        RsaCmd::Sign { key, m } => {
            let kp = pair(&key)?;
            let sig = private_transform(m, &kp)?;
            Ok(CommandResult::ok(format!("{m}^{} mod {} = {sig}", kp.d(), kp.n()), json!({ "m": m, "signature": sig })))
        }
        RsaCmd::Verify { key, m, sig } => {
            let back = public_transform(sig, &public(&key))?;
            let valid = back == m;
            let report = format!(
                "{sig}^{} mod {} = {back}: {}",
                key.e,
                key.n,
                if valid { "valid" } else { "INVALID" }
            );
            let json = json!({ "m": m, "signature": sig, "recovered": back, "valid": valid });
            Ok(if valid {
                CommandResult::ok(report, json)
            } else {
                CommandResult::negative(report, json)
            })
        }
    }
}

pub fn oneway(cmd: OnewayCmd) -> Result<CommandResult> {
    let OnewayCmd::Demo { a, b } = cmd;
    let r = oneway_demo(a, b)?;
    let report = format!(
        "{a} x {b} = {}: {} multiplication\nfactoring {} by trial division: {} divisions (found {})\n{}",
        r.product,
        r.multiply_steps,
        r.product,
        r.factor_steps,
        r.found_factor,
        r.note
    );
    Ok(CommandResult::ok(report, serde_json::to_value(&r)?))
}

pub fn hybrid(cmd: HybridCmd, seed: u64) -> Result<CommandResult> {
    match cmd {
        HybridCmd::Seal { to_n, to_e, from_p, from_q, from_e, key_seed, input } => {
            let recipient = RsaPublicKey { n: to_n, e: to_e };
            let sender = match (from_p, from_q, from_e) {
                (Some(p), Some(q), Some(e)) => Some(rsa_keygen(p, q, e)?),
                (None, None, None) => None,
                _ => bail!("signing needs --from-p, --from-q and --from-e"),
            };
            if to_n < 2 {
                bail!("recipient modulus must be at least 2");
            }
            let key_seed = key_seed.unwrap_or_else(|| rng(seed).gen_range(0..to_n));
            let text = input.read()?;
            let env = hybrid_seal(&text, &recipient, sender.as_ref(), key_seed)?;
            Ok(CommandResult::ok(env.to_line(), serde_json::to_value(&env)?))
        }
        HybridCmd::Open { key, from_n, from_e, envelope, file } => {
            let line = match (envelope, file) {
                (Some(e), _) => e,
                (None, Some(path)) => read_file(&path)?,
                (None, None) => bail!("give the envelope with --envelope or --file"),
            };
            let env = HybridEnvelope::from_line(line.trim()).context("reading the envelope")?;
            let sender = from_n.zip(from_e).map(|(n, e)| RsaPublicKey { n, e });
            let (message, auth) = hybrid_open(&env, &pair(&key)?, sender.as_ref())?;
            let report = format!("{message}\nsignature: {auth}");
            let json = json!({ "message": message, "authenticity": auth });
            Ok(if auth == Authenticity::Failed {
                CommandResult::negative(report, json)
            } else {
                CommandResult::ok(report, json)
            })
        }
    }
}
