//! Fixed-length bit vectors backed by `u64` blocks.
//!
//! `BitRow` is the workhorse representation for set-system members, incidence
//! columns, vertex neighborhoods, and active-vertex sets. All counting
//! operations reduce to hardware popcounts over whole blocks.

use serde::{Deserialize, Serialize};

const BLOCK_BITS: usize = 64;

/// A bit vector of fixed length. Bits beyond `len` are always zero, so block
/// equality, hashing, and popcounts need no masking.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitRow {
    blocks: Vec<u64>,
    len: usize,
}

impl BitRow {
    /// All-zero row of the given length.
    pub fn zeros(len: usize) -> Self {
        BitRow {
            blocks: vec![0; len.div_ceil(BLOCK_BITS)],
            len,
        }
    }

    /// All-one row of the given length.
    pub fn ones(len: usize) -> Self {
        let mut row = BitRow::zeros(len);
        for i in 0..len {
            row.set(i, true);
        }
        row
    }

    /// Row with exactly the given indices set. Indices must be in range
    /// (checked by callers that report structured errors; debug-asserted here).
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut row = BitRow::zeros(len);
        for &i in indices {
            debug_assert!(i < len, "index {i} out of range for length {len}");
            row.set(i, true);
        }
        row
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.count_ones() == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.blocks[i / BLOCK_BITS] >> (i % BLOCK_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % BLOCK_BITS);
        if value {
            self.blocks[i / BLOCK_BITS] |= mask;
        } else {
            self.blocks[i / BLOCK_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Number of positions where the two rows differ (Hamming distance).
    pub fn xor_count(&self, other: &BitRow) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Size of the intersection.
    pub fn and_count(&self, other: &BitRow) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Intersection as a new row.
    pub fn and(&self, other: &BitRow) -> BitRow {
        debug_assert_eq!(self.len, other.len);
        BitRow {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a & b)
                .collect(),
            len: self.len,
        }
    }

    pub fn intersect_with(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
    }

    /// True iff every set bit of `other` is also set in `self`.
    pub fn contains_all(&self, other: &BitRow) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| b & !a == 0)
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            let mut rest = block;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(bi * BLOCK_BITS + tz)
            })
        })
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// Pack the bits at `positions` (at most 64 of them) into a word, with
    /// `positions[j]` landing in bit `j`. This is the trace of the row on a
    /// small subset, encoded compactly for distinctness counting.
    pub fn extract(&self, positions: &[usize]) -> u64 {
        debug_assert!(positions.len() <= 64);
        let mut word = 0u64;
        for (j, &p) in positions.iter().enumerate() {
            if self.get(p) {
                word |= 1 << j;
            }
        }
        word
    }
}

impl std::fmt::Debug for BitRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitRow[{}; {:?}]", self.len, self.to_indices())
    }
}

// Serialized as {len, indices}: compact for sparse rows and stable to read.
impl Serialize for BitRow {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("BitRow", 2)?;
        s.serialize_field("len", &self.len)?;
        s.serialize_field("indices", &self.to_indices())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for BitRow {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            len: usize,
            indices: Vec<usize>,
        }
        let raw = Raw::deserialize(deserializer)?;
        for &i in &raw.indices {
            if i >= raw.len {
                return Err(serde::de::Error::custom(format!(
                    "bit index {} out of range for length {}",
                    i, raw.len
                )));
            }
        }
        Ok(BitRow::from_indices(raw.len, &raw.indices))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_roundtrip() {
        let mut row = BitRow::zeros(130);
        for i in [0, 1, 63, 64, 65, 127, 128, 129] {
            assert!(!row.get(i));
            row.set(i, true);
            assert!(row.get(i));
        }
        assert_eq!(row.count_ones(), 8);
        row.set(64, false);
        assert!(!row.get(64));
        assert_eq!(row.count_ones(), 7);
    }

    #[test]
    fn xor_count_is_hamming_distance() {
        let a = BitRow::from_indices(70, &[0, 3, 65]);
        let b = BitRow::from_indices(70, &[0, 4, 65, 69]);
        assert_eq!(a.xor_count(&b), 3);
        assert_eq!(a.xor_count(&a), 0);
    }

    #[test]
    fn contains_all_subset_semantics() {
        let big = BitRow::from_indices(100, &[1, 50, 99]);
        let small = BitRow::from_indices(100, &[1, 99]);
        assert!(big.contains_all(&small));
        assert!(!small.contains_all(&big));
        assert!(big.contains_all(&BitRow::zeros(100)));
    }

    #[test]
    fn iter_ones_crosses_block_boundaries() {
        let row = BitRow::from_indices(200, &[0, 63, 64, 127, 128, 199]);
        assert_eq!(row.to_indices(), vec![0, 63, 64, 127, 128, 199]);
    }

    #[test]
    fn extract_packs_positions_in_order() {
        let row = BitRow::from_indices(10, &[2, 5, 7]);
        // positions 5, 2, 9 -> bits 0, 1, 2
        assert_eq!(row.extract(&[5, 2, 9]), 0b011);
        assert_eq!(row.extract(&[]), 0);
    }

    #[test]
    fn ones_has_full_popcount_and_zero_tail() {
        let row = BitRow::ones(67);
        assert_eq!(row.count_ones(), 67);
        assert_eq!(row.to_indices().len(), 67);
        // Equality against an independently built row proves the tail is clean.
        let manual = BitRow::from_indices(67, &(0..67).collect::<Vec<_>>());
        assert_eq!(row, manual);
    }

    #[test]
    fn empty_length_zero_row() {
        let row = BitRow::zeros(0);
        assert_eq!(row.len(), 0);
        assert_eq!(row.count_ones(), 0);
        assert_eq!(row.xor_count(&BitRow::zeros(0)), 0);
    }
}
