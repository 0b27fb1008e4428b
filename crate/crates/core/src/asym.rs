//! Textbook RSA with small primes, and the multiply-versus-factor demo.
//!
//! No padding and no security: these keys exist to show that a key pair is
//! two mutually inverse transforms, one public and one private.

use serde::{Deserialize, Serialize};

use crate::error::MathError;
use crate::modmath::{gcd, is_prime, mod_inverse, modpow, multiply, smallest_factor};
use crate::work::WorkCount;

const DESK_LIMIT: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RsaPublicKey {
    pub n: u64,
    pub e: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToyRsaKeyPair {
    p: u64,
    q: u64,
    n: u64,
    e: u64,
    d: u64,
}

impl ToyRsaKeyPair {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn totient(&self) -> u64 {
        (self.p - 1) * (self.q - 1)
    }

    pub fn public_key(&self) -> RsaPublicKey {
        RsaPublicKey {
            n: self.n,
            e: self.e,
        }
    }
}

/// Builds a key pair from two distinct primes and a public exponent
/// coprime to `(p-1)(q-1)`; the private exponent comes from extended gcd.
pub fn rsa_keygen(p: u64, q: u64, e: u64) -> Result<ToyRsaKeyPair, MathError> {
    for x in [p, q] {
        if !is_prime(x) {
            return Err(MathError::NotPrime(x));
        }
    }
    if p == q {
        return Err(MathError::SamePrimes(p));
    }
    let n = p.checked_mul(q).filter(|&n| n < DESK_LIMIT).ok_or(MathError::TooLarge(p.saturating_mul(q)))?;
    let phi = (p - 1) * (q - 1);
    if e <= 1 || e >= phi {
        return Err(MathError::OutOfRange {
            value: e,
            low: 2,
            high: phi,
        });
    }
    if gcd(e, phi) != 1 {
        return Err(MathError::NotCoprime { e, phi });
    }
    let d = mod_inverse(e, phi).ok_or(MathError::NotCoprime { e, phi })?;
    Ok(ToyRsaKeyPair { p, q, n, e, d })
}

fn check_message(m: u64, n: u64) -> Result<(), MathError> {
    if m >= n {
        return Err(MathError::OutOfRange {
            value: m,
            low: 0,
            high: n,
        });
    }
    Ok(())
}

/// `m^e mod n`: locking with the public key, or checking a signature.
pub fn public_transform(m: u64, key: &RsaPublicKey) -> Result<u64, MathError> {
    check_message(m, key.n)?;
    modpow(m, key.e, key.n)
}

/// `c^d mod n`: unlocking with the private key, or signing.
pub fn private_transform(c: u64, key: &ToyRsaKeyPair) -> Result<u64, MathError> {
    check_message(c, key.n)?;
    modpow(c, key.d, key.n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OnewayReport {
    pub a: u64,
    pub b: u64,
    pub product: u64,
    pub multiply_steps: u64,
    pub factor_steps: u64,
    pub found_factor: u64,
    pub note: String,
}

/// Multiplies two distinct primes in one step, then recovers a factor by
/// trial division from 2, counting every division.
///
/// The gap is small for tiny primes and grows with the smaller prime.
pub fn oneway_demo(a: u64, b: u64) -> Result<OnewayReport, MathError> {
    for x in [a, b] {
        if !is_prime(x) {
            return Err(MathError::NotPrime(x));
        }
    }
    if a == b {
        return Err(MathError::SamePrimes(a));
    }
    let mut multiply_work = WorkCount::default();
    let product = multiply(a, b, &mut multiply_work);
    if product >= DESK_LIMIT as u128 {
        return Err(MathError::TooLarge(product.min(u64::MAX as u128) as u64));
    }
    let product = product as u64;
    let mut factor_work = WorkCount::default();
    let found_factor = smallest_factor(product, &mut factor_work);
    let (multiply_steps, factor_steps) = (multiply_work.multiplications, factor_work.trial_divisions);
    let note = if factor_steps <= multiply_steps {
        format!(
            "with primes this small, factoring {product} is as quick as multiplying; \
             the gap only opens up as the smaller prime grows"
        )
    } else {
        format!(
            "multiplying took {multiply_steps} step, undoing it took {factor_steps} trial divisions; \
             the gap grows with the size of the smaller prime"
        )
    };
    Ok(OnewayReport {
        a,
        b,
        product,
        multiply_steps,
        factor_steps,
        found_factor,
        note,
    })
}
