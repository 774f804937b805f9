//! Fixed-length packed bit strings with a cached popcount.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// A search point in `{0,1}^n`.
///
/// Bits are packed little-endian into 64-bit words: bit `i` lives in word
/// `i / 64` at position `i % 64`. Bits past `len` in the last word are
/// always zero, so the packed words are a canonical encoding.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
    ones: usize,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; word_count(len)],
            len,
            ones: 0,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut words = vec![u64::MAX; word_count(len)];
        let tail = len % WORD_BITS;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << tail) - 1;
            }
        }
        BitString {
            words,
            len,
            ones: len,
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words: Vec<u64> = Vec::new();
        let mut len = 0;
        for bit in bits {
            if len % WORD_BITS == 0 {
                words.push(0);
            }
            if bit {
                words[len / WORD_BITS] |= 1 << (len % WORD_BITS);
            }
            len += 1;
        }
        let ones = words.iter().map(|w| w.count_ones() as usize).sum();
        BitString { words, len, ones }
    }

    /// Uniformly random string of length `len`.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..word_count(len)).map(|_| rng.next_u64()).collect();
        let tail = len % WORD_BITS;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        let ones = words.iter().map(|w| w.count_ones() as usize).sum();
        BitString { words, len, ones }
    }

    /// Each bit `i` is one independently with probability `marginals[i]`.
    pub fn sample_from_marginals<R: Rng + ?Sized>(marginals: &[f64], rng: &mut R) -> Self {
        let mut words = vec![0u64; word_count(marginals.len())];
        let mut ones = 0;
        for (i, &p) in marginals.iter().enumerate() {
            // Absorbed marginals are deterministic and consume no randomness.
            let bit = if p >= 1.0 {
                true
            } else if p <= 0.0 {
                false
            } else {
                rng.random::<f64>() < p
            };
            if bit {
                words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
                ones += 1;
            }
        }
        BitString {
            words,
            len: marginals.len(),
            ones,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of one-bits; O(1).
    #[inline]
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % WORD_BITS);
        let word = &mut self.words[i / WORD_BITS];
        *word ^= mask;
        if *word & mask != 0 {
            self.ones += 1;
        } else {
            self.ones -= 1;
        }
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn hamming_distance(&self, other: &BitString) -> usize {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Length as a little-endian `u64`, followed by the packed words in
    /// little-endian byte order. Stable across platforms.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 8 * self.words.len());
        out.extend_from_slice(&(self.len as u64).to_le_bytes());
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }
}

/// Number of one-bits of `x`.
#[inline]
pub fn onemax(x: &BitString) -> usize {
    x.count_ones()
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Leftmost character is bit 0.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse {
                    key: "bitstring".into(),
                    message: format!("unexpected character {other:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitString::from_bits(bits))
    }
}
