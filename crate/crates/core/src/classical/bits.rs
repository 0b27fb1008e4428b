use std::fmt;
use std::str::FromStr;

use crate::error::CipherError;

/// A sequence of bits, most significant bit of each character first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self(
            bytes
                .iter()
                .flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
                .collect(),
        )
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CipherError> {
        if !self.0.len().is_multiple_of(8) {
            return Err(CipherError::RaggedBits(self.0.len()));
        }
        Ok(self
            .0
            .chunks(8)
            .map(|chunk| chunk.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
            .collect())
    }

    /// Bitwise XOR with a pad of the same length.
    pub fn xor(&self, pad: &BitString) -> Result<BitString, CipherError> {
        if self.len() != pad.len() {
            return Err(CipherError::LengthMismatch {
                key: pad.len(),
                text: self.len(),
            });
        }
        Ok(Self(self.0.iter().zip(&pad.0).map(|(a, b)| a ^ b).collect()))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Parses `0`/`1` characters; whitespace between groups is ignored.
impl FromStr for BitString {
    type Err = CipherError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(CipherError::BadBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

/// Encodes each character as its 8-bit code; only codes 0-127 are accepted.
pub fn chars_to_bits(text: &str) -> Result<BitString, CipherError> {
    let bytes = text
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
    Ok(BitString::from_bytes(&bytes))
}

pub fn bits_to_chars(bits: &BitString) -> Result<String, CipherError> {
    bits.to_bytes()?
        .into_iter()
        .enumerate()
        .map(|(position, b)| {
            if b.is_ascii() {
                Ok(b as char)
            } else {
                Err(CipherError::NotEightBit {
                    symbol: b as char,
                    position,
                })
            }
        })
        .collect()
}
