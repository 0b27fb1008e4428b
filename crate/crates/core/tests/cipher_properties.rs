use cryptopath_core::classical::{
    bits_to_chars, caesar_decrypt, caesar_encrypt, chars_to_bits, otp_decrypt, otp_encrypt,
    railfence_decrypt, railfence_encrypt, toyblock_decrypt_bytes, toyblock_encrypt,
    toyblock_encrypt_bytes, BitPermutation, PadKey, RailKey, ShiftKey, ToyBlockKey,
};
use cryptopath_core::{Alphabet, TextMode};
use proptest::collection::vec;
use proptest::prelude::*;

fn letters(max: usize) -> impl Strategy<Value = String> {
    proptest::string::string_regex(&format!("[A-Z]{{0,{max}}}")).unwrap()
}

fn text(max: usize) -> impl Strategy<Value = String> {
    proptest::string::string_regex(&format!("[A-Za-z ,.!?]{{0,{max}}}")).unwrap()
}

fn permutation() -> impl Strategy<Value = BitPermutation> {
    Just((0u8..8).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| BitPermutation::new(v.try_into().unwrap()).unwrap())
}

proptest! {
    #[test]
    fn caesar_round_trip(m in text(200), k in 0i64..26) {
        let a = Alphabet::latin();
        let key = ShiftKey::new(k, &a).unwrap();
        let c = caesar_encrypt(&m, key, &a, TextMode::Preserve).unwrap();
        prop_assert_eq!(caesar_decrypt(&c, key, &a, TextMode::Preserve).unwrap(), m.to_uppercase());
    }

    #[test]
    fn caesar_composes(m in letters(100), x in 0i64..26, y in 0i64..26) {
        let a = Alphabet::latin();
        let once = |t: &str, s| caesar_encrypt(t, ShiftKey::new(s, &a).unwrap(), &a, TextMode::Strict).unwrap();
        prop_assert_eq!(once(&once(&m, x), y), once(&m, (x + y) % 26));
    }

    #[test]
    fn caesar_is_positionwise(m in letters(60), k in 0i64..26, i in 0usize..60) {
        let a = Alphabet::latin();
        let key = ShiftKey::new(k, &a).unwrap();
        prop_assume!(i < m.len());
        let whole = caesar_encrypt(&m, key, &a, TextMode::Strict).unwrap();
        let single = caesar_encrypt(&m[i..=i], key, &a, TextMode::Strict).unwrap();
        prop_assert_eq!(&whole[i..=i], single.as_str());
    }

    #[test]
    fn otp_round_trip(pairs in vec((0usize..26, 0usize..26), 0..100)) {
        let a = Alphabet::latin();
        let m: String = pairs.iter().map(|&(p, _)| a.symbol(p)).collect();
        let k: String = pairs.iter().map(|&(_, k)| a.symbol(k)).collect();
        let key = PadKey::new(&k, &a).unwrap();
        let c = otp_encrypt(&m, &key, &a, TextMode::Strict).unwrap();
        prop_assert_eq!(otp_decrypt(&c, &key, &a, TextMode::Strict).unwrap(), m);
    }

    #[test]
    fn railfence_round_trip_and_anagram(m in text(200), rails in 2usize..12) {
        let key = RailKey::new(rails).unwrap();
        let c = railfence_encrypt(&m, key);
        prop_assert_eq!(railfence_decrypt(&c, key), m.clone());
        let mut x: Vec<char> = m.chars().collect();
        let mut y: Vec<char> = c.chars().collect();
        x.sort_unstable();
        y.sort_unstable();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn toyblock_round_trip(data in vec(any::<u8>(), 0..64), keys in vec(any::<u8>(), 1..5), perm in permutation()) {
        let key = ToyBlockKey::new(keys, perm).unwrap();
        let c = toyblock_encrypt_bytes(&data, &key);
        prop_assert_eq!(toyblock_decrypt_bytes(&c, &key), data);
    }

    #[test]
    fn bits_round_trip(m in proptest::string::string_regex("[ -~]{0,40}").unwrap()) {
        prop_assert_eq!(bits_to_chars(&chars_to_bits(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn ciphers_depend_only_on_message_and_key(m in letters(40), k in 0i64..26, seed in any::<u64>()) {
        let a = Alphabet::latin();
        let fresh = Alphabet::new("ABCDEFGHIJKLMNOPQRSTUVWXYZ").unwrap();
        let key = ShiftKey::new(k, &a).unwrap();
        prop_assert_eq!(
            caesar_encrypt(&m, key, &a, TextMode::Strict).unwrap(),
            caesar_encrypt(&m, key, &fresh, TextMode::Strict).unwrap()
        );
        let block = |s| ToyBlockKey::from_seed(s, 2, BitPermutation::nibble_swap()).unwrap();
        prop_assert_eq!(toyblock_encrypt_bytes(m.as_bytes(), &block(seed)), toyblock_encrypt_bytes(m.as_bytes(), &block(seed)));
    }
}

#[test]
fn zero_keys_and_identity_permutation_change_nothing() {
    for rounds in 1..4 {
        let key = ToyBlockKey::new(vec![0; rounds], BitPermutation::identity()).unwrap();
        for b in 0..=255u8 {
            assert_eq!(toyblock_encrypt(b, &key), b);
        }
    }
}

#[test]
fn toyblock_is_a_permutation_of_bytes() {
    let key = ToyBlockKey::from_seed(7, 2, BitPermutation::nibble_swap()).unwrap();
    let mut seen = [false; 256];
    for b in 0..=255u8 {
        let c = toyblock_encrypt(b, &key) as usize;
        assert!(!seen[c]);
        seen[c] = true;
    }
}
