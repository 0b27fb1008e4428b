//! Desk-scale modular arithmetic: exponentiation, primality, generators.
//!
//! Products go through `u128`, so any `u64` modulus is safe, but everything
//! here is trial-division based and meant for numbers below 2^31.

use crate::error::MathError;
use crate::work::WorkCount;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Plain multiplication, counted as one step.
pub fn multiply(a: u64, b: u64, work: &mut WorkCount) -> u128 {
    work.multiplications += 1;
    a as u128 * b as u128
}

/// `base^exponent mod modulus` by right-to-left square-and-multiply.
pub fn modpow(base: u64, exponent: u64, modulus: u64) -> Result<u64, MathError> {
    modpow_counted(base, exponent, modulus, &mut WorkCount::default())
}

/// As [`modpow`], adding each modular multiplication to `work`.
///
/// An exponent with `k` bits, `w` of them set, costs `w + k - 1`
/// multiplications.
pub fn modpow_counted(
    base: u64,
    exponent: u64,
    modulus: u64,
    work: &mut WorkCount,
) -> Result<u64, MathError> {
    if modulus < 2 {
        return Err(MathError::ModulusTooSmall(modulus));
    }
    let mut result = 1u64;
    let mut square = base % modulus;
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(result, square, modulus);
            work.multiplications += 1;
        }
        e >>= 1;
        if e > 0 {
            square = mulmod(square, square, modulus);
            work.multiplications += 1;
        }
    }
    Ok(result % modulus)
}

/// Smallest divisor `d >= 2` of `n`, found by trying 2, 3, 4, ... in turn.
///
/// Returns `n` itself when `n` is prime (or below 2). Every candidate tried
/// counts as one trial division.
pub fn smallest_factor(n: u64, work: &mut WorkCount) -> u64 {
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        work.trial_divisions += 1;
        if n.is_multiple_of(d) {
            return d;
        }
        d += 1;
    }
    n
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_factor(n, &mut WorkCount::default()) == n
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            factors.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    factors
}

/// True iff `g` has multiplicative order `p - 1` modulo the prime `p`.
///
/// Uses the prime factors `q` of `p - 1`: `g` generates iff
/// `g^((p-1)/q) != 1` for each of them.
pub fn is_primitive_root(g: u64, p: u64) -> Result<bool, MathError> {
    if !is_prime(p) {
        return Err(MathError::NotPrime(p));
    }
    if g < 1 || g >= p {
        return Err(MathError::OutOfRange {
            value: g,
            low: 1,
            high: p,
        });
    }
    let order = p - 1;
    for q in prime_factors(order) {
        if modpow(g, order / q, p)? == 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest primitive root of the prime `p`.
pub fn smallest_primitive_root(p: u64) -> Result<u64, MathError> {
    for g in 1..p {
        if is_primitive_root(g, p)? {
            return Ok(g);
        }
    }
    Err(MathError::NotPrime(p))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Smallest `x` in `[1, p - 1]` with `g^x = target (mod p)`, by walking the
/// powers of `g` one multiplication at a time.
///
/// Reaching `g^(p-1)` costs `p - 2` multiplications, the worst case.
pub fn discrete_log_bruteforce(
    g: u64,
    target: u64,
    p: u64,
    work: &mut WorkCount,
) -> Result<Option<u64>, MathError> {
    if p < 2 {
        return Err(MathError::ModulusTooSmall(p));
    }
    let target = target % p;
    let mut current = g % p;
    for x in 1..p {
        if x > 1 {
            current = mulmod(current, g, p);
            work.multiplications += 1;
        }
        if current == target {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Repeated multiplication, one step per unit of exponent.
    fn naive_pow(base: u64, exp: u64, m: u64) -> u64 {
        (0..exp).fold(1 % m, |acc, _| acc * (base % m) % m)
    }

    fn order_by_powers(g: u64, p: u64) -> u64 {
        let mut x = g % p;
        let mut k = 1;
        while x != 1 {
            x = x * g % p;
            k += 1;
        }
        k
    }

    fn ceil_log2(e: u64) -> u64 {
        if e <= 1 {
            0
        } else {
            64 - (e - 1).leading_zeros() as u64
        }
    }

    #[test]
    fn known_answers() {
        assert_eq!(naive_pow(5, 4, 23), 4);
        assert_eq!(modpow(5, 4, 23), Ok(4));
        assert_eq!(modpow(10, 4, 23), Ok(18));
        assert_eq!(modpow(5, 0, 23), Ok(1));
        assert_eq!(modpow(5, 3, 1), Err(MathError::ModulusTooSmall(1)));
    }

    #[test]
    fn modpow_matches_naive_exhaustively() {
        for m in 2..100 {
            for b in 0..50 {
                for e in 0..50 {
                    let mut w = WorkCount::default();
                    assert_eq!(modpow_counted(b, e, m, &mut w).unwrap(), naive_pow(b, e, m));
                    if e > 0 {
                        assert!(w.multiplications <= 2 * ceil_log2(e) + 1, "e={e}");
                    }
                }
            }
        }
    }

    #[test]
    fn primality() {
        assert!(is_prime(97));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(!is_prime(33));
        assert!(is_prime(2));
        assert!(is_prime(2_147_483_647));
        let sieve: Vec<u64> = (0..200).filter(|&n| is_prime(n)).collect();
        let brute: Vec<u64> = (0..200u64)
            .filter(|&n| n >= 2 && (2..n).all(|d| n % d != 0))
            .collect();
        assert_eq!(sieve, brute);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(is_primitive_root(5, 23), Ok(true));
        assert_eq!(order_by_powers(4, 23), 11);
        assert_eq!(is_primitive_root(4, 23), Ok(false));
        assert_eq!(is_primitive_root(1, 23), Ok(false));
        assert_eq!(is_primitive_root(5, 97), Ok(true));
        assert_eq!(smallest_primitive_root(97), Ok(5));
        assert_eq!(is_primitive_root(2, 33), Err(MathError::NotPrime(33)));
    }

    #[test]
    fn primitive_root_matches_order_below_100() {
        for p in (2..100).filter(|&p| is_prime(p)) {
            for g in 1..p {
                assert_eq!(
                    is_primitive_root(g, p).unwrap(),
                    order_by_powers(g, p) == p - 1,
                    "g={g} p={p}"
                );
            }
        }
    }

    #[test]
    fn inverse_and_gcd() {
        assert_eq!(mod_inverse(3, 20), Some(7));
        assert_eq!(mod_inverse(5, 20), None);
        assert_eq!(gcd(5, 20), 5);
        assert_eq!(mod_inverse(5, 48), Some(29));
    }

    #[test]
    fn discrete_log_worst_case_cost() {
        let mut w = WorkCount::default();
        // g^(p-1) = 1 is the last power reached.
        assert_eq!(discrete_log_bruteforce(5, 1, 97, &mut w), Ok(Some(96)));
        assert_eq!(w.multiplications, 95);
        let mut w = WorkCount::default();
        assert_eq!(discrete_log_bruteforce(5, 4, 23, &mut w), Ok(Some(4)));
        assert_eq!(w.multiplications, 3);
    }

    #[test]
    fn smallest_factor_counts() {
        let mut w = WorkCount::default();
        assert_eq!(smallest_factor(10403, &mut w), 101);
        assert_eq!(w.trial_divisions, 100);
        let mut w = WorkCount::default();
        assert_eq!(smallest_factor(6, &mut w), 2);
        assert_eq!(w.trial_divisions, 1);
    }
}
