//! An 8-bit toy block cipher built from XOR and bit swaps.
//!
//! Each round XORs the block with a round key and then moves bits around
//! with a fixed permutation. Decryption undoes the rounds in reverse order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CipherError;

pub const DEFAULT_ROUNDS: usize = 2;

/// A bijection on bit positions 0..8 (bit 0 is the least significant).
///
/// `positions[i]` is where input bit `i` lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitPermutation([u8; 8]);

impl BitPermutation {
    pub fn new(positions: [u8; 8]) -> Result<Self, CipherError> {
        let mut seen = [false; 8];
        for &p in &positions {
            if p > 7 || seen[p as usize] {
                return Err(CipherError::BadPermutation(positions));
            }
            seen[p as usize] = true;
        }
        Ok(Self(positions))
    }

    pub fn identity() -> Self {
        Self([0, 1, 2, 3, 4, 5, 6, 7])
    }

    /// Swaps bit `i` with bit `i + 4`. Its own inverse.
    pub fn nibble_swap() -> Self {
        Self([4, 5, 6, 7, 0, 1, 2, 3])
    }

    pub fn positions(&self) -> [u8; 8] {
        self.0
    }

    pub fn apply(&self, block: u8) -> u8 {
        (0..8).fold(0u8, |acc, i| acc | (((block >> i) & 1) << self.0[i]))
    }

    pub fn inverse(&self) -> Self {
        let mut inv = [0u8; 8];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p as usize] = i as u8;
        }
        Self(inv)
    }
}

impl Default for BitPermutation {
    fn default() -> Self {
        Self::nibble_swap()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyBlockKey {
    round_keys: Vec<u8>,
    permutation: BitPermutation,
}

impl ToyBlockKey {
    pub fn new(round_keys: Vec<u8>, permutation: BitPermutation) -> Result<Self, CipherError> {
        if round_keys.is_empty() {
            return Err(CipherError::NoRounds);
        }
        Ok(Self {
            round_keys,
            permutation,
        })
    }

    /// Expands `seed` into `rounds` round keys with a seeded generator.
    pub fn from_seed(seed: u64, rounds: usize, permutation: BitPermutation) -> Result<Self, CipherError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new((0..rounds).map(|_| rng.gen()).collect(), permutation)
    }

    pub fn rounds(&self) -> usize {
        self.round_keys.len()
    }

    pub fn round_keys(&self) -> &[u8] {
        &self.round_keys
    }

    pub fn permutation(&self) -> BitPermutation {
        self.permutation
    }
}

pub fn toyblock_encrypt(block: u8, key: &ToyBlockKey) -> u8 {
    key.round_keys
        .iter()
        .fold(block, |b, &rk| key.permutation.apply(b ^ rk))
}

pub fn toyblock_decrypt(block: u8, key: &ToyBlockKey) -> u8 {
    let inv = key.permutation.inverse();
    key.round_keys
        .iter()
        .rev()
        .fold(block, |b, &rk| inv.apply(b) ^ rk)
}

/// Encrypts each byte independently.
pub fn toyblock_encrypt_bytes(data: &[u8], key: &ToyBlockKey) -> Vec<u8> {
    data.iter().map(|&b| toyblock_encrypt(b, key)).collect()
}

pub fn toyblock_decrypt_bytes(data: &[u8], key: &ToyBlockKey) -> Vec<u8> {
    data.iter().map(|&b| toyblock_decrypt(b, key)).collect()
}
