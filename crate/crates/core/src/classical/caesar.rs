use crate::alphabet::{Alphabet, TextMode};
use crate::error::CipherError;

/// Caesar key: a shift in alphabet positions, `0 <= shift < |alphabet|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftKey(usize);

impl ShiftKey {
    pub fn new(shift: i64, alphabet: &Alphabet) -> Result<Self, CipherError> {
        if shift < 0 || shift as u64 >= alphabet.len() as u64 {
            return Err(CipherError::ShiftOutOfRange {
                shift,
                size: alphabet.len(),
            });
        }
        Ok(Self(shift as usize))
    }

    /// Reduces any integer shift into range, so `-1` becomes `|alphabet| - 1`.
    pub fn wrapping(shift: i64, alphabet: &Alphabet) -> Self {
        Self(shift.rem_euclid(alphabet.len() as i64) as usize)
    }

    pub fn value(self) -> usize {
        self.0
    }
}

fn shift_text(
    text: &str,
    offset: usize,
    alphabet: &Alphabet,
    mode: TextMode,
) -> Result<String, CipherError> {
    Ok(alphabet
        .classify(text, mode)?
        .into_iter()
        .map(|(c, idx)| match idx {
            Some(i) => alphabet.symbol(i + offset),
            None => c,
        })
        .collect())
}

pub fn caesar_encrypt(
    plaintext: &str,
    key: ShiftKey,
    alphabet: &Alphabet,
    mode: TextMode,
) -> Result<String, CipherError> {
    shift_text(plaintext, key.0, alphabet, mode)
}

pub fn caesar_decrypt(
    ciphertext: &str,
    key: ShiftKey,
    alphabet: &Alphabet,
    mode: TextMode,
) -> Result<String, CipherError> {
    let back = (alphabet.len() - key.0) % alphabet.len();
    shift_text(ciphertext, back, alphabet, mode)
}
