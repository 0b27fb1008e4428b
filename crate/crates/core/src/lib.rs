//! Classroom cryptography: classical ciphers and their attacks, a one-time
//! pad you can brute-force by hand, Diffie-Hellman with colors over a public
//! chat, a person in the middle, toy RSA and a hybrid envelope.
//!
//! Everything here is desk-scale and deliberately insecure.

pub mod alphabet;
pub mod analysis;
pub mod asym;
pub mod channel;
pub mod classical;
pub mod dh;
pub mod error;
pub mod hybrid;
pub mod modmath;
pub mod work;

pub use alphabet::{Alphabet, TextMode};
pub use error::{AnalysisError, CipherError, HybridError, MathError};
