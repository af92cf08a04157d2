//! Small helpers shared by the enumeration engines.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

/// Fixed-width bit set over datapoint indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64).max(1)],
        }
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut set = Self::new(len);
        for &i in indices {
            set.words[i / 64] |= 1 << (i % 64);
        }
        set
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn copy_from(&mut self, other: &BitSet) {
        self.words.copy_from_slice(&other.words);
    }

    /// `|other \ self|`.
    pub fn count_new(&self, other: &BitSet) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (b & !a).count_ones())
            .sum()
    }

    pub fn union_with(&mut self, other: &BitSet) {
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a |= b);
    }
}

/// Orders two certificate sets, given as bit masks over sorted certificate
/// indices, by the lexicographic order of their ascending index sequences.
pub(crate) fn lex_cmp_masks(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let diff = a ^ b;
    let i = diff.trailing_zeros();
    let above = if i >= 63 { 0 } else { !0u64 << (i + 1) };
    if a >> i & 1 == 1 {
        // a continues with i; b continues with something larger, or stops.
        if b & above == 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    } else if a & above == 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

pub(crate) fn mask_to_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Integer type used for exact scaled sums inside enumeration loops.
pub(crate) trait Scalar:
    Clone
    + Ord
    + Zero
    + From<u64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
{
    fn to_bigint(&self) -> BigInt;
}

impl Scalar for u128 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// Least common multiple of `values` (zeros ignored), or `None` past `u64::MAX`.
pub(crate) fn checked_lcm(values: impl IntoIterator<Item = usize>) -> Option<u64> {
    let mut acc: u64 = 1;
    for v in values {
        if v == 0 {
            continue;
        }
        let v = v as u64;
        let g = num_integer::gcd(acc, v);
        acc = acc.checked_mul(v / g)?;
    }
    Some(acc)
}
