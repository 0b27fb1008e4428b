//! Symbol domain shared by the letter ciphers and the frequency statistics.

use std::collections::HashMap;
use std::fmt;

use crate::error::CipherError;

/// Default alphabet: the 26 uppercase Latin letters.
pub const LATIN_UPPER: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// How letter ciphers treat characters outside the alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TextMode {
    /// Reject the text, reporting the first offending position.
    Strict,
    /// Pass the character through unchanged.
    #[default]
    Preserve,
}

/// An ordered set of distinct symbols.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    index: HashMap<char, usize>,
}

impl Alphabet {
    pub fn new(symbols: &str) -> Result<Self, CipherError> {
        let symbols: Vec<char> = symbols.chars().collect();
        if symbols.len() < 2 {
            return Err(CipherError::AlphabetTooSmall(symbols.len()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, &c) in symbols.iter().enumerate() {
            if index.insert(c, i).is_some() {
                return Err(CipherError::DuplicateSymbol(c));
            }
        }
        Ok(Self { symbols, index })
    }

    pub fn latin() -> Self {
        Self::new(LATIN_UPPER).expect("latin alphabet is valid")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// Always false; an alphabet holds at least two symbols.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, symbol: char) -> Option<usize> {
        self.index.get(&symbol).copied()
    }

    /// Symbol at `index` reduced modulo the alphabet size.
    pub fn symbol(&self, index: usize) -> char {
        self.symbols[index % self.symbols.len()]
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn contains(&self, symbol: char) -> bool {
        self.index.contains_key(&symbol)
    }

    /// Uppercases `c` when that maps it into the alphabet; otherwise returns it as is.
    pub fn normalize(&self, c: char) -> char {
        if self.contains(c) {
            return c;
        }
        let mut upper = c.to_uppercase();
        match (upper.next(), upper.next()) {
            (Some(u), None) if self.contains(u) => u,
            _ => c,
        }
    }

    /// Normalizes `text` and pairs each character with its index, if any.
    ///
    /// In strict mode the first character outside the alphabet is an error.
    pub(crate) fn classify(
        &self,
        text: &str,
        mode: TextMode,
    ) -> Result<Vec<(char, Option<usize>)>, CipherError> {
        text.chars()
            .enumerate()
            .map(|(pos, c)| {
                let c = self.normalize(c);
                match (self.index_of(c), mode) {
                    (Some(i), _) => Ok((c, Some(i))),
                    (None, TextMode::Preserve) => Ok((c, None)),
                    (None, TextMode::Strict) => Err(CipherError::OutsideAlphabet {
                        symbol: c,
                        position: pos,
                    }),
                }
            })
            .collect()
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Self::latin()
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.symbols.iter().collect();
        f.debug_tuple("Alphabet").field(&s).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_and_symbol_are_inverse() {
        let a = Alphabet::latin();
        for (i, &c) in a.symbols().iter().enumerate() {
            assert_eq!(a.index_of(c), Some(i));
            assert_eq!(a.symbol(i), c);
        }
    }

    #[test]
    fn rejects_bad_alphabets() {
        assert_eq!(Alphabet::new("A"), Err(CipherError::AlphabetTooSmall(1)));
        assert_eq!(Alphabet::new("ABA"), Err(CipherError::DuplicateSymbol('A')));
    }

    #[test]
    fn normalizes_lowercase() {
        let a = Alphabet::latin();
        assert_eq!(a.normalize('q'), 'Q');
        assert_eq!(a.normalize(' '), ' ');
        assert_eq!(a.normalize('é'), 'é');
    }

    #[test]
    fn strict_mode_reports_position() {
        let a = Alphabet::latin();
        let err = a.classify("AB C", TextMode::Strict).unwrap_err();
        assert_eq!(
            err,
            CipherError::OutsideAlphabet {
                symbol: ' ',
                position: 2
            }
        );
    }
}
