use crate::alphabet::{Alphabet, TextMode};
use crate::error::CipherError;

/// One-time-pad key: a symbol string as long as the text it encrypts.
///
/// Key symbols sitting under non-alphabet text characters (spaces, in
/// preserve mode) are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadKey(String);

impl PadKey {
    pub fn new(key: &str, alphabet: &Alphabet) -> Result<Self, CipherError> {
        let normalized: String = key.chars().map(|c| alphabet.normalize(c)).collect();
        alphabet.classify(&normalized, TextMode::Strict)?;
        Ok(Self(normalized))
    }

    pub(crate) fn from_normalized(key: String) -> Self {
        Self(key)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for PadKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn combine(
    text: &str,
    key: &PadKey,
    alphabet: &Alphabet,
    mode: TextMode,
    subtract: bool,
) -> Result<String, CipherError> {
    let symbols = alphabet.classify(text, mode)?;
    if symbols.len() != key.len() {
        return Err(CipherError::LengthMismatch {
            key: key.len(),
            text: symbols.len(),
        });
    }
    let n = alphabet.len();
    Ok(symbols
        .into_iter()
        .zip(key.0.chars())
        .map(|((c, idx), k)| match idx {
            Some(i) => {
                let k = alphabet.index_of(k).expect("pad key validated");
                if subtract {
                    alphabet.symbol(i + n - k)
                } else {
                    alphabet.symbol(i + k)
                }
            }
            None => c,
        })
        .collect())
}

pub fn otp_encrypt(
    plaintext: &str,
    key: &PadKey,
    alphabet: &Alphabet,
    mode: TextMode,
) -> Result<String, CipherError> {
    combine(plaintext, key, alphabet, mode, false)
}

pub fn otp_decrypt(
    ciphertext: &str,
    key: &PadKey,
    alphabet: &Alphabet,
    mode: TextMode,
) -> Result<String, CipherError> {
    combine(ciphertext, key, alphabet, mode, true)
}
