use std::collections::HashSet;

use cryptopath_core::asym::{oneway_demo, private_transform, public_transform, rsa_keygen};
use cryptopath_core::dh::{dh_shared_secret, residue_to_color, DhKeyPair, DhParams};
use cryptopath_core::hybrid::{hybrid_open, hybrid_seal, Authenticity};
use cryptopath_core::modmath::{is_prime, is_primitive_root, modpow, modpow_counted};
use cryptopath_core::work::{work_counter, CountedOp, WorkCount};
use proptest::prelude::*;

fn naive_pow(base: u64, exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    for _ in 0..exp {
        acc = acc * base % m;
    }
    acc
}

fn order(g: u64, p: u64) -> u64 {
    let mut x = g % p;
    let mut k = 1;
    while x != 1 {
        x = x * g % p;
        k += 1;
    }
    k
}

fn ceil_log2(e: u64) -> u64 {
    64 - (e - 1).leading_zeros() as u64
}

#[test]
fn exchange_is_symmetric_for_classroom_primes() {
    for (p, g) in [(5, 2), (11, 2), (23, 5), (97, 5)] {
        let params = DhParams::new(p, g).unwrap();
        for a in 1..p - 1 {
            let alice = DhKeyPair::from_secret(&params, a).unwrap();
            for b in 1..p - 1 {
                let bob = DhKeyPair::from_secret(&params, b).unwrap();
                let s1 = dh_shared_secret(&alice, bob.public_value(), &params).unwrap();
                let s2 = dh_shared_secret(&bob, alice.public_value(), &params).unwrap();
                assert_eq!(s1.value, s2.value, "p={p} a={a} b={b}");
                assert_eq!(s1.value, naive_pow(naive_pow(g, b, p), a, p));
            }
        }
    }
}

#[test]
fn modpow_matches_repeated_multiplication() {
    for m in 2..100 {
        for base in 0..50 {
            for exp in 0..50 {
                let mut work = WorkCount::default();
                let fast = modpow_counted(base, exp, m, &mut work).unwrap();
                assert_eq!(fast, naive_pow(base, exp, m), "{base}^{exp} mod {m}");
                if exp >= 1 {
                    assert!(work.multiplications <= 2 * ceil_log2(exp) + 1);
                }
            }
        }
    }
}

#[test]
fn primitive_roots_match_order_oracle() {
    for p in (2..100).filter(|&n| is_prime(n)) {
        for g in 1..p {
            assert_eq!(is_primitive_root(g, p).unwrap(), order(g, p) == p - 1, "g={g} p={p}");
        }
    }
}

#[test]
fn colors_are_injective_below_100() {
    for p in (3..=100).filter(|&n| is_prime(n)) {
        let g = (2..p).find(|&g| order(g, p) == p - 1).unwrap();
        let params = DhParams::new(p, g).unwrap();
        let hues: HashSet<u16> = (0..p).map(|r| residue_to_color(r, &params).unwrap().hue).collect();
        assert_eq!(hues.len() as u64, p);
    }
    assert_eq!(residue_to_color(48, &DhParams::default()).unwrap().hue, 178);
}

#[test]
fn discrete_log_costs_far_more_than_modpow_at_97() {
    let fast = work_counter(&CountedOp::Modpow {
        base: 5,
        exponent: 95,
        modulus: 97,
    })
    .unwrap();
    // 5 has order 96, so 5^96 = 1 is the last power reached
    let slow = work_counter(&CountedOp::DiscreteLog {
        generator: 5,
        target: 1,
        modulus: 97,
    })
    .unwrap();
    assert_eq!(slow.multiplications, 95);
    assert!(fast.multiplications <= 2 * ceil_log2(95) + 1);
    assert!(slow.multiplications >= 5 * fast.multiplications);
}

#[test]
fn key_pairs_invert_each_other() {
    for (p, q, e) in [(3, 11, 3), (5, 13, 5)] {
        let k = rsa_keygen(p, q, e).unwrap();
        for m in 0..k.n() {
            let c = public_transform(m, &k.public_key()).unwrap();
            assert_eq!(private_transform(c, &k).unwrap(), m);
            let s = private_transform(m, &k).unwrap();
            assert_eq!(public_transform(s, &k.public_key()).unwrap(), m);
        }
    }
}

#[test]
fn oneway_counts_through_work_counter() {
    let r = oneway_demo(101, 103).unwrap();
    let mult = work_counter(&CountedOp::Multiply { a: 101, b: 103 }).unwrap();
    let fact = work_counter(&CountedOp::Factor { n: 10403 }).unwrap();
    assert_eq!((r.multiply_steps, r.factor_steps), (mult.multiplications, fact.trial_divisions));
    assert_eq!(r.multiply_steps, 1);
    assert!(r.factor_steps >= 100);
}

proptest! {
    #[test]
    fn hybrid_round_trip(message in "[ -~]{1,40}", seed in 0u64..3233) {
        let bob = rsa_keygen(61, 53, 17).unwrap();
        let alice = rsa_keygen(17, 19, 5).unwrap();
        let env = hybrid_seal(&message, &bob.public_key(), Some(&alice), seed).unwrap();
        let (opened, auth) = hybrid_open(&env, &bob, Some(&alice.public_key())).unwrap();
        prop_assert_eq!(opened, message);
        prop_assert_eq!(auth, Authenticity::Verified);
    }

    /// With a signer modulus above 255 every replacement of a single body
    /// byte changes the checksum.
    #[test]
    fn any_single_byte_tamper_fails(message in "[A-Z]{5}", seed in 0u64..3233) {
        let bob = rsa_keygen(61, 53, 17).unwrap();
        let alice = rsa_keygen(17, 19, 5).unwrap();
        let env = hybrid_seal(&message, &bob.public_key(), Some(&alice), seed).unwrap();
        for pos in 0..env.body.len() {
            for byte in 0..=255u8 {
                if byte == env.body[pos] {
                    continue;
                }
                let mut t = env.clone();
                t.body[pos] = byte;
                let (_, auth) = hybrid_open(&t, &bob, Some(&alice.public_key())).unwrap();
                prop_assert_eq!(auth, Authenticity::Failed);
            }
        }
    }

    #[test]
    fn modpow_agrees_with_oracle(base in 0u64..1000, exp in 0u64..200, m in 2u64..1000) {
        prop_assert_eq!(modpow(base, exp, m).unwrap(), naive_pow(base, exp, m));
    }
}
