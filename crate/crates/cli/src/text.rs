use std::fmt::Write;

use anyhow::{bail, Context, Result};
use cryptopath_core::analysis::{
    caesar_bruteforce, caesar_frequency_attack, chi_squared, histogram_rows, letter_frequencies,
    otp_bruteforce, otp_key_for, otp_trial_count, render_histogram, sort_by_frequency, CandidateKey,
    FrequencyTable,
};
use cryptopath_core::classical::{
    bits_to_chars, caesar_decrypt, caesar_encrypt, chars_to_bits, otp_decrypt, otp_encrypt,
    railfence_decrypt, railfence_encrypt, toyblock_decrypt, toyblock_decrypt_bytes,
    toyblock_encrypt, toyblock_encrypt_bytes, BitPermutation, BitString, PadKey, RailKey, ShiftKey,
    ToyBlockKey,
};
use cryptopath_core::{Alphabet, TextMode};
use serde_json::json;

use crate::args::{BitsCmd, BlockKeyArgs, CaesarCmd, FreqCmd, LetterInput, OtpCmd, RailCmd, ToyblockCmd};
use crate::{read_file, CommandResult};

fn mode(strict: bool) -> TextMode {
    if strict {
        TextMode::Strict
    } else {
        TextMode::Preserve
    }
}

fn transformed(op: &str, key: serde_json::Value, input: &str, output: String) -> CommandResult {
    let json = json!({ "op": op, "key": key, "input": input, "output": output });
    CommandResult::ok(output, json)
}

pub fn caesar(cmd: CaesarCmd) -> Result<CommandResult> {
    let latin = Alphabet::latin();
    match cmd {
        CaesarCmd::Enc { shift, input: LetterInput { input, strict } } => {
            let text = input.read()?;
            let out = caesar_encrypt(&text, ShiftKey::new(shift, &latin)?, &latin, mode(strict))?;
            Ok(transformed("caesar_encrypt", json!(shift), &text, out))
        }
        CaesarCmd::Dec { shift, input: LetterInput { input, strict } } => {
            let text = input.read()?;
            let out = caesar_decrypt(&text, ShiftKey::new(shift, &latin)?, &latin, mode(strict))?;
            Ok(transformed("caesar_decrypt", json!(shift), &text, out))
        }
        CaesarCmd::Brute { input } => {
            let text = input.read()?;
            let all = caesar_bruteforce(&text, &latin)?;
            let mut report = String::new();
            for c in &all {
                if let CandidateKey::Shift(s) = c.key {
                    writeln!(report, "{s:>2}  {}", c.plaintext.trim_end()).unwrap();
                }
            }
            Ok(CommandResult::ok(report, json!({ "candidates": all })))
        }
        CaesarCmd::Crack { freq, top, reference, input } => {
            let text = input.read()?;
            let reference = match reference {
                Some(path) => FrequencyTable::parse(&read_file(&path)?, &latin)?,
                None => FrequencyTable::english(),
            };
            if !freq {
                // the manual route: compare the two shapes by eye
                let observed = letter_frequencies(&text, &latin)?;
                let mut report = String::from("ciphertext\n");
                report += &render_histogram(&histogram_rows(&observed, 40));
                report += "\nreference\n";
                report += &render_histogram(&histogram_rows(&reference, 40));
                report += "\nline up the peaks: the shift that moves E onto the tallest ciphertext bar is the likely key\n";
                let json = json!({
                    "ciphertext": histogram_rows(&observed, 40),
                    "reference": histogram_rows(&reference, 40),
                });
                return Ok(CommandResult::ok(report, json));
            }
            let ranked = caesar_frequency_attack(&text, &reference, &latin)?;
            let best = ranked.best();
            let plaintext = caesar_decrypt(&text, ShiftKey::new(best.shift as i64, &latin)?, &latin, TextMode::Preserve)?;
            let mut report = String::from("rank  shift  chi-squared  preview\n");
            for (i, e) in ranked.entries.iter().take(top).enumerate() {
                writeln!(report, "{:>4}  {:>5}  {:>11.4}  {}", i + 1, e.shift, e.score, e.preview.trim_end()).unwrap();
            }
            let preview: String = plaintext.chars().take(200).collect();
            write!(report, "\nbest guess: shift {}\n{}", best.shift, preview.trim_end()).unwrap();
            let json = json!({ "ranking": ranked.entries, "best_shift": best.shift, "plaintext": plaintext });
            Ok(CommandResult::ok(report, json))
        }
    }
}

pub fn rail(cmd: RailCmd) -> Result<CommandResult> {
    let (op, rails, input, enc) = match cmd {
        RailCmd::Enc { rails, input } => ("railfence_encrypt", rails, input, true),
        RailCmd::Dec { rails, input } => ("railfence_decrypt", rails, input, false),
    };
    let key = RailKey::new(rails)?;
    let text = input.read()?;
    let out = if enc {
        railfence_encrypt(&text, key)
    } else {
        railfence_decrypt(&text, key)
    };
    Ok(transformed(op, json!(rails), &text, out))
}

const SECRECY_NOTE: &str = "every plaintext of this length has exactly one key that produces this ciphertext, \
so without the key the ciphertext rules nothing out";

pub fn otp(cmd: OtpCmd) -> Result<CommandResult> {
    let latin = Alphabet::latin();
    match cmd {
        OtpCmd::Enc { key, input: LetterInput { input, strict } } => {
            let text = input.read()?;
            let out = otp_encrypt(&text, &PadKey::new(&key, &latin)?, &latin, mode(strict))?;
            Ok(transformed("otp_encrypt", json!(key), &text, out))
        }
        OtpCmd::Dec { key, input: LetterInput { input, strict } } => {
            let text = input.read()?;
            let out = otp_decrypt(&text, &PadKey::new(&key, &latin)?, &latin, mode(strict))?;
            Ok(transformed("otp_decrypt", json!(key), &text, out))
        }
        OtpCmd::Explore { cipher, plain: Some(plain), .. } => {
            let key = otp_key_for(&plain, &cipher, &latin)?;
            let report = format!("key {}\n{SECRECY_NOTE}", key.as_str());
            let json = json!({ "ciphertext": cipher, "plaintext": plain, "key": key.as_str(), "note": SECRECY_NOTE });
            Ok(CommandResult::ok(report, json))
        }
        OtpCmd::Explore { cipher, plain: None, show } => {
            let letters = cipher.chars().filter(|c| latin.contains(latin.normalize(*c))).count();
            let trials = otp_trial_count(letters, &latin)?;
            let shown: Vec<_> = otp_bruteforce(&cipher, &latin)?.take(show).collect();
            let mut report = format!("{trials} keys, {trials} different plaintexts\n{SECRECY_NOTE}\n");
            for c in &shown {
                if let CandidateKey::Pad(k) = &c.key {
                    writeln!(report, "{k}  {}", c.plaintext).unwrap();
                }
            }
            let json = json!({ "ciphertext": cipher, "keys": trials, "plaintexts": trials, "shown": shown, "note": SECRECY_NOTE });
            Ok(CommandResult::ok(report, json))
        }
    }
}

fn block_key(args: &BlockKeyArgs, seed: u64) -> Result<ToyBlockKey> {
    let perm = match args.perm.len() {
        0 => BitPermutation::nibble_swap(),
        8 => BitPermutation::new(args.perm.clone().try_into().expect("eight positions"))?,
        n => bail!("--perm needs eight positions, got {n}"),
    };
    Ok(if args.keys.is_empty() {
        ToyBlockKey::from_seed(seed, args.rounds, perm)?
    } else {
        ToyBlockKey::new(args.keys.clone(), perm)?
    })
}

fn parse_block(s: &str) -> Result<u8> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.len() != 8 {
        bail!("a block is eight bits, got {s:?}");
    }
    u8::from_str_radix(&s, 2).with_context(|| format!("{s:?} is not a bit string"))
}

pub fn toyblock(cmd: ToyblockCmd, seed: u64) -> Result<CommandResult> {
    let (enc, key, block, input) = match cmd {
        ToyblockCmd::Enc { key, block, input } => (true, key, block, input),
        ToyblockCmd::Dec { key, block, input } => (false, key, block, input),
    };
    let key = block_key(&key, seed)?;
    let key_json = json!({ "round_keys": key.round_keys(), "permutation": key.permutation().positions() });
    let op = if enc { "toyblock_encrypt" } else { "toyblock_decrypt" };
    if let Some(block) = block {
        let b = parse_block(&block)?;
        let out = if enc { toyblock_encrypt(b, &key) } else { toyblock_decrypt(b, &key) };
        return Ok(transformed(op, key_json, &format!("{b:08b}"), format!("{out:08b}")));
    }
    let text = input.read()?;
    if enc {
        let out = hex::encode(toyblock_encrypt_bytes(text.as_bytes(), &key));
        Ok(transformed(op, key_json, &text, out))
    } else {
        let bytes = hex::decode(text.trim()).context("ciphertext must be hex")?;
        let out = String::from_utf8(toyblock_decrypt_bytes(&bytes, &key))
            .context("decrypted bytes are not text; wrong key?")?;
        Ok(transformed(op, key_json, text.trim(), out))
    }
}

/// Bits in groups of eight, one group per character.
fn grouped(bits: &BitString) -> String {
    let s = bits.to_string();
    s.as_bytes()
        .chunks(8)
        .map(|c| std::str::from_utf8(c).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn bits(cmd: BitsCmd) -> Result<CommandResult> {
    match cmd {
        BitsCmd::Encode { input } => {
            let text = input.read()?;
            let out = grouped(&chars_to_bits(&text)?);
            Ok(transformed("chars_to_bits", json!(null), &text, out))
        }
        BitsCmd::Decode { input } => {
            let text = input.read()?;
            let bits: BitString = text.parse()?;
            Ok(transformed("bits_to_chars", json!(null), text.trim(), bits_to_chars(&bits)?))
        }
    }
}

pub fn freq(cmd: FreqCmd) -> Result<CommandResult> {
    let latin = Alphabet::latin();
    match cmd {
        FreqCmd::Analyze { input } => {
            let text = input.read()?;
            let table = letter_frequencies(&text, &latin)?;
            let distance = chi_squared(&table, &FrequencyTable::english());
            let sorted = sort_by_frequency(&table);
            let mut report = String::new();
            for (c, f) in &sorted {
                writeln!(report, "{c}  {:6.2}%", f * 100.0).unwrap();
            }
            write!(report, "chi-squared against English: {distance:.4}").unwrap();
            let rows: Vec<_> = sorted.iter().map(|(c, f)| json!({ "symbol": c, "frequency": f })).collect();
            Ok(CommandResult::ok(report, json!({ "frequencies": rows, "chi_squared_english": distance })))
        }
        FreqCmd::Hist { width, english, input } => {
            let table = if english {
                FrequencyTable::english()
            } else {
                letter_frequencies(&input.read()?, &latin)?
            };
            let rows = histogram_rows(&table, width);
            Ok(CommandResult::ok(render_histogram(&rows), json!({ "rows": rows })))
        }
    }
}
