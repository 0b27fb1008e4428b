use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CipherError {
    #[error("alphabet needs at least 2 symbols, got {0}")]
    AlphabetTooSmall(usize),
    #[error("symbol {0:?} appears twice in the alphabet")]
    DuplicateSymbol(char),
    #[error("symbol {symbol:?} at position {position} is not in the alphabet")]
    OutsideAlphabet { symbol: char, position: usize },
    #[error("shift {shift} out of range for an alphabet of {size} symbols")]
    ShiftOutOfRange { shift: i64, size: usize },
    #[error("key length {key} does not match text length {text}")]
    LengthMismatch { key: usize, text: usize },
    #[error("position {position}: {text:?} and {other:?} disagree on a non-alphabet character")]
    Misaligned {
        position: usize,
        text: char,
        other: char,
    },
    #[error("rail fence needs at least 2 rails, got {0}")]
    TooFewRails(usize),
    #[error("character {symbol:?} at position {position} is outside the 8-bit code (0-127)")]
    NotEightBit { symbol: char, position: usize },
    #[error("bit string length {0} is not a multiple of 8")]
    RaggedBits(usize),
    #[error("invalid bit character {0:?}")]
    BadBit(char),
    #[error("toy block key needs at least one round")]
    NoRounds,
    #[error("bit permutation {0:?} is not a bijection on 0..8")]
    BadPermutation([u8; 8]),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("text contains no alphabet symbols")]
    EmptySample,
    #[error("frequency table line {line}: {reason}")]
    BadTable { line: usize, reason: String },
    #[error(
        "exhaustive one-time-pad search over length {length} means {trials} key trials; refusing above length {limit}"
    )]
    TooLong {
        length: usize,
        limit: usize,
        trials: u128,
    },
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error(transparent)]
    Math(#[from] MathError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MathError {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{value} is outside [{low}, {high})")]
    OutOfRange { value: u64, low: u64, high: u64 },
    #[error("{g} is not a primitive root modulo {p}")]
    NotGenerator { g: u64, p: u64 },
    #[error("modulus {p} exceeds {limit} in classroom mode")]
    ModulusTooLarge { p: u64, limit: u64 },
    #[error("primes must be distinct, got {0} twice")]
    SamePrimes(u64),
    #[error("public exponent {e} is not coprime to {phi}")]
    NotCoprime { e: u64, phi: u64 },
    #[error("modulus {0} exceeds the desk-scale limit 2^31")]
    TooLarge(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HybridError {
    #[error("message is empty")]
    EmptyMessage,
    #[error("symmetric key seed {seed} must be below the recipient modulus {n}")]
    SeedTooLarge { seed: u64, n: u64 },
    #[error("malformed envelope: {0}")]
    Malformed(String),
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error(transparent)]
    Math(#[from] MathError),
}
