//! Letter-domain and bit-domain cryptosystems.

mod bits;
mod caesar;
mod otp;
mod railfence;
mod toyblock;

pub use bits::{bits_to_chars, chars_to_bits, BitString};
pub use caesar::{caesar_decrypt, caesar_encrypt, ShiftKey};
pub use otp::{otp_decrypt, otp_encrypt, PadKey};
pub use railfence::{railfence_decrypt, railfence_encrypt, RailKey};
pub use toyblock::{
    toyblock_decrypt, toyblock_decrypt_bytes, toyblock_encrypt, toyblock_encrypt_bytes,
    BitPermutation, ToyBlockKey, DEFAULT_ROUNDS,
};
