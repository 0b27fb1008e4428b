use serde::Serialize;

use super::frequency::{letter_counts, FrequencyTable};
use crate::alphabet::{Alphabet, TextMode};
use crate::classical::{caesar_decrypt, otp_decrypt, PadKey, ShiftKey};
use crate::error::{AnalysisError, CipherError};
use crate::work::WorkCount;

/// Longest ciphertext the exhaustive one-time-pad search accepts.
pub const OTP_BRUTEFORCE_LIMIT: usize = 6;

/// Expected frequencies below this are treated as this, so a symbol the
/// reference never uses costs a large but finite penalty.
const EXPECTED_FLOOR: f64 = 1e-6;

/// Key behind a candidate decryption.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum CandidateKey {
    Shift(usize),
    Pad(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidatePlaintext {
    pub key: CandidateKey,
    pub plaintext: String,
}

/// Every Caesar decryption of `ciphertext`, shift 0 first.
pub fn caesar_bruteforce(
    ciphertext: &str,
    alphabet: &Alphabet,
) -> Result<Vec<CandidatePlaintext>, AnalysisError> {
    caesar_bruteforce_counted(ciphertext, alphabet, &mut WorkCount::default())
}

/// As [`caesar_bruteforce`]; each decrypted alphabet symbol counts as one
/// substitution, so an n-letter text costs `|alphabet| * n`.
pub fn caesar_bruteforce_counted(
    ciphertext: &str,
    alphabet: &Alphabet,
    work: &mut WorkCount,
) -> Result<Vec<CandidatePlaintext>, AnalysisError> {
    if ciphertext.is_empty() {
        return Err(AnalysisError::EmptySample);
    }
    let letters: u64 = letter_counts(ciphertext, alphabet).iter().sum();
    (0..alphabet.len())
        .map(|s| {
            let key = ShiftKey::wrapping(s as i64, alphabet);
            let plaintext = caesar_decrypt(ciphertext, key, alphabet, TextMode::Preserve)?;
            work.substitutions += letters;
            Ok(CandidatePlaintext {
                key: CandidateKey::Shift(s),
                plaintext,
            })
        })
        .collect()
}

/// Pearson chi-squared distance between two frequency distributions.
///
/// Zero exactly when they are identical; positive otherwise.
pub fn chi_squared(observed: &FrequencyTable, expected: &FrequencyTable) -> f64 {
    observed
        .entries()
        .iter()
        .map(|&(c, o)| {
            let e = expected.get(c);
            (o - e).powi(2) / e.max(EXPECTED_FLOOR)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedShift {
    pub shift: usize,
    pub score: f64,
    pub preview: String,
}

/// All shifts ordered by ascending chi-squared score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedShifts {
    pub entries: Vec<RankedShift>,
}

impl RankedShifts {
    pub fn best(&self) -> &RankedShift {
        &self.entries[0]
    }
}

const PREVIEW_LEN: usize = 40;

/// Scores every shift by how far the shift-decrypted letter frequencies are
/// from `reference`. Short texts still get a full ranking, just a less
/// reliable one.
pub fn caesar_frequency_attack(
    ciphertext: &str,
    reference: &FrequencyTable,
    alphabet: &Alphabet,
) -> Result<RankedShifts, AnalysisError> {
    let counts = letter_counts(ciphertext, alphabet);
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(AnalysisError::EmptySample);
    }
    let n = alphabet.len();
    let preview_src: String = ciphertext.chars().take(PREVIEW_LEN).collect();
    let mut entries = (0..n)
        .map(|shift| {
            // Plain symbol j was enciphered as symbol j + shift.
            let weights: Vec<(char, f64)> = (0..n)
                .map(|j| (alphabet.symbol(j), counts[(j + shift) % n] as f64))
                .collect();
            let observed = FrequencyTable::from_weights(alphabet, &weights)?;
            let key = ShiftKey::wrapping(shift as i64, alphabet);
            Ok(RankedShift {
                shift,
                score: chi_squared(&observed, reference),
                preview: caesar_decrypt(&preview_src, key, alphabet, TextMode::Preserve)?,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    entries.sort_by(|a, b| a.score.total_cmp(&b.score).then(a.shift.cmp(&b.shift)));
    Ok(RankedShifts { entries })
}

/// The one pad key that turns `plaintext` into `ciphertext`.
///
/// Any plaintext of the right length has such a key, which is why the
/// ciphertext alone says nothing about the message. Non-alphabet characters
/// must sit at the same positions in both texts; the key holds the first
/// alphabet symbol there.
pub fn otp_key_for(
    plaintext: &str,
    ciphertext: &str,
    alphabet: &Alphabet,
) -> Result<PadKey, AnalysisError> {
    let p = alphabet.classify(plaintext, TextMode::Preserve)?;
    let c = alphabet.classify(ciphertext, TextMode::Preserve)?;
    if p.len() != c.len() {
        return Err(CipherError::LengthMismatch {
            key: c.len(),
            text: p.len(),
        }
        .into());
    }
    let n = alphabet.len();
    let key = p
        .into_iter()
        .zip(c)
        .enumerate()
        .map(|(position, ((pc, pi), (cc, ci)))| match (pi, ci) {
            (Some(pi), Some(ci)) => Ok(alphabet.symbol(ci + n - pi)),
            (None, None) if pc == cc => Ok(alphabet.symbol(0)),
            _ => Err(CipherError::Misaligned {
                position,
                text: pc,
                other: cc,
            }),
        })
        .collect::<Result<String, CipherError>>()?;
    Ok(PadKey::from_normalized(key))
}

/// `|alphabet|^length`, refused above [`OTP_BRUTEFORCE_LIMIT`].
pub fn otp_trial_count(length: usize, alphabet: &Alphabet) -> Result<u64, AnalysisError> {
    let trials = (alphabet.len() as u128).pow(length as u32);
    if length > OTP_BRUTEFORCE_LIMIT {
        return Err(AnalysisError::TooLong {
            length,
            limit: OTP_BRUTEFORCE_LIMIT,
            trials,
        });
    }
    Ok(trials as u64)
}

/// Odometer over every string of a fixed length, first symbol slowest.
#[derive(Debug, Clone)]
pub struct Keyspace {
    alphabet: Alphabet,
    digits: Vec<usize>,
    done: bool,
}

impl Keyspace {
    pub fn new(length: usize, alphabet: &Alphabet) -> Result<Self, AnalysisError> {
        otp_trial_count(length, alphabet)?;
        Ok(Self {
            alphabet: alphabet.clone(),
            digits: vec![0; length],
            done: false,
        })
    }
}

impl Iterator for Keyspace {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        if self.done {
            return None;
        }
        let out: String = self.digits.iter().map(|&d| self.alphabet.symbol(d)).collect();
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.alphabet.len() {
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

/// Lazily decrypts `ciphertext` under every pad key of its length.
///
/// Every plaintext of that length shows up exactly once: the attack cannot
/// tell them apart.
pub fn otp_bruteforce(
    ciphertext: &str,
    alphabet: &Alphabet,
) -> Result<impl Iterator<Item = CandidatePlaintext>, AnalysisError> {
    let ciphertext: String = ciphertext.chars().map(|c| alphabet.normalize(c)).collect();
    alphabet.classify(&ciphertext, TextMode::Strict)?;
    let length = ciphertext.chars().count();
    let alphabet = alphabet.clone();
    Ok(Keyspace::new(length, &alphabet)?.map(move |k| {
        let key = PadKey::from_normalized(k);
        let plaintext =
            otp_decrypt(&ciphertext, &key, &alphabet, TextMode::Strict).expect("lengths match");
        CandidatePlaintext {
            key: CandidateKey::Pad(key.as_str().to_string()),
            plaintext,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{caesar_encrypt, otp_encrypt};
    use std::collections::HashSet;

    #[test]
    fn bruteforce_contains_hello() {
        let a = Alphabet::latin();
        let cands = caesar_bruteforce("KHOOR", &a).unwrap();
        assert_eq!(cands.len(), 26);
        assert_eq!(cands[0].plaintext, "KHOOR");
        assert_eq!(cands[3].plaintext, "HELLO");
        for c in &cands {
            let CandidateKey::Shift(s) = c.key else { panic!() };
            let k = ShiftKey::new(s as i64, &a).unwrap();
            assert_eq!(caesar_encrypt(&c.plaintext, k, &a, TextMode::Preserve).unwrap(), "KHOOR");
        }
        let single: HashSet<String> = caesar_bruteforce("A", &a)
            .unwrap()
            .into_iter()
            .map(|c| c.plaintext)
            .collect();
        assert_eq!(single.len(), 26);
        assert_eq!(caesar_bruteforce("", &a), Err(AnalysisError::EmptySample));
    }

    #[test]
    fn chi_squared_zero_iff_identical() {
        let a = Alphabet::latin();
        let t = FrequencyTable::english();
        assert_eq!(chi_squared(&t, &t), 0.0);
        let other = FrequencyTable::from_weights(&a, &[('A', 1.0)]).unwrap();
        assert!(chi_squared(&other, &t) > 0.0);
        assert!(chi_squared(&t, &other) > 0.0);
    }

    #[test]
    fn exact_reference_scores_zero_at_its_shift() {
        let a = Alphabet::latin();
        let reference = FrequencyTable::from_weights(&a, &[('A', 2.0), ('B', 1.0), ('C', 1.0)]).unwrap();
        // AABC shifted by 3
        let ranked = caesar_frequency_attack("DDEF", &reference, &a).unwrap();
        assert_eq!(ranked.best().shift, 3);
        assert_eq!(ranked.best().score, 0.0);
        assert_eq!(ranked.best().preview, "AABC");
    }

    #[test]
    fn ranking_is_total() {
        let a = Alphabet::latin();
        let ranked = caesar_frequency_attack("XYZ", &FrequencyTable::english(), &a).unwrap();
        assert_eq!(ranked.entries.len(), 26);
        let shifts: HashSet<usize> = ranked.entries.iter().map(|e| e.shift).collect();
        assert_eq!(shifts.len(), 26);
        assert!(ranked.entries.windows(2).all(|w| w[0].score <= w[1].score));
        assert!(ranked.entries.iter().all(|e| e.score >= 0.0));
        assert_eq!(
            caesar_frequency_attack("123", &FrequencyTable::english(), &a),
            Err(AnalysisError::EmptySample)
        );
    }

    #[test]
    fn otp_key_known_answers() {
        let a = Alphabet::latin();
        assert_eq!(otp_key_for("HELLO", "EQNVZ", &a).unwrap().as_str(), "XMCKL");
        assert_eq!(otp_key_for("ABCXYZ", "ABCXYZ", &a).unwrap().as_str(), "AAAAAA");
        let k = otp_key_for("HELLO", "EQNVZ", &a).unwrap();
        assert_eq!(otp_decrypt("EQNVZ", &k, &a, TextMode::Strict).unwrap(), "HELLO");
        assert!(otp_key_for("HELLO", "EQNV", &a).is_err());
        assert!(otp_key_for("HE LO", "EQNVZ", &a).is_err());
        assert_eq!(otp_key_for("HE LO", "EQ VZ", &a).unwrap().as_str(), "XMAKL");
    }

    #[test]
    fn every_plaintext_has_a_distinct_key() {
        let a = Alphabet::latin();
        let mut keys = HashSet::new();
        for p in Keyspace::new(3, &a).unwrap() {
            let k = otp_key_for(&p, "QJZ", &a).unwrap();
            assert_eq!(otp_encrypt(&p, &k, &a, TextMode::Strict).unwrap(), "QJZ");
            keys.insert(k);
        }
        assert_eq!(keys.len(), 26usize.pow(3));
    }

    #[test]
    fn keyspace_order_and_guard() {
        let a = Alphabet::latin();
        let all: Vec<String> = Keyspace::new(2, &a).unwrap().collect();
        assert_eq!(all.len(), 676);
        assert_eq!(all[0], "AA");
        assert_eq!(all[1], "AB");
        assert_eq!(all[675], "ZZ");
        assert_eq!(Keyspace::new(0, &a).unwrap().collect::<Vec<_>>(), vec![String::new()]);
        assert!(Keyspace::new(7, &a).is_err());
    }

    #[test]
    fn otp_bruteforce_hits_every_plaintext() {
        let a = Alphabet::latin();
        let plains: HashSet<String> = otp_bruteforce("eqn", &a).unwrap().map(|c| c.plaintext).collect();
        assert_eq!(plains.len(), 26 * 26 * 26);
        assert!(plains.contains("HEL") && plains.contains("CAT"));
        assert!(otp_bruteforce("ABCDEFG", &a).is_err());
    }
}
