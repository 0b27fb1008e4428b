use crate::error::CipherError;

/// Number of rails of a rail-fence transposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RailKey(usize);

impl RailKey {
    pub fn new(rails: usize) -> Result<Self, CipherError> {
        if rails < 2 {
            return Err(CipherError::TooFewRails(rails));
        }
        Ok(Self(rails))
    }

    pub fn rails(self) -> usize {
        self.0
    }
}

/// Rail index visited at each position of an `len`-symbol zigzag.
fn zigzag(len: usize, rails: usize) -> Vec<usize> {
    let period = 2 * (rails - 1);
    (0..len)
        .map(|i| {
            let r = i % period;
            if r < rails {
                r
            } else {
                period - r
            }
        })
        .collect()
}

/// Order in which plaintext positions are read off: row by row, left to right.
fn read_order(len: usize, rails: usize) -> Vec<usize> {
    let rows = zigzag(len, rails);
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by_key(|&i| (rows[i], i));
    order
}

/// Transposes any characters; there is no alphabet involved.
///
/// With `rails >= len` the zigzag never turns and the text comes back as is.
pub fn railfence_encrypt(plaintext: &str, key: RailKey) -> String {
    let chars: Vec<char> = plaintext.chars().collect();
    read_order(chars.len(), key.0)
        .into_iter()
        .map(|i| chars[i])
        .collect()
}

pub fn railfence_decrypt(ciphertext: &str, key: RailKey) -> String {
    let chars: Vec<char> = ciphertext.chars().collect();
    let mut out = vec!['\0'; chars.len()];
    for (c, pos) in chars.iter().zip(read_order(chars.len(), key.0)) {
        out[pos] = *c;
    }
    out.into_iter().collect()
}
