//! Class/offset coding of 15-bit blocks.
//!
//! A block `x` is coded as its class `c = popcount(x)` and its offset, the
//! rank of `x` among all `C(15, c)` blocks of the same class in ascending
//! integer order. The offset takes `ceil(log2 C(15, c))` bits, which is zero
//! for the all-zero and all-one classes.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const BLOCK_BITS: usize = 15;
pub const NUM_CLASSES: usize = BLOCK_BITS + 1;
pub const NUM_BLOCK_VALUES: usize = 1 << BLOCK_BITS;

/// Blocks per RRR superblock.
pub const BLOCKS_PER_SUPER: usize = 16;
pub const SUPER_BITS: usize = BLOCK_BITS * BLOCKS_PER_SUPER;

/// Lookup tables for block size 15.
#[derive(Clone)]
pub struct RrrTables {
    binom: [[u32; NUM_CLASSES]; NUM_CLASSES],
    width: [u8; NUM_CLASSES],
    class_table: Box<[u8]>,
    offset_table: Box<[u16]>,
    /// Row `c` occupies `decode_table[row_start[c]..row_start[c + 1]]`.
    decode_table: Box<[u16]>,
    row_start: [usize; NUM_CLASSES + 1],
}

impl std::fmt::Debug for RrrTables {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RrrTables")
            .field("width", &self.width)
            .finish_non_exhaustive()
    }
}

impl Default for RrrTables {
    fn default() -> Self {
        Self::new()
    }
}

impl RrrTables {
    pub fn new() -> Self {
        let mut binom = [[0u32; NUM_CLASSES]; NUM_CLASSES];
        for n in 0..NUM_CLASSES {
            binom[n][0] = 1;
            for k in 1..=n {
                binom[n][k] = binom[n - 1][k - 1] + if k < n { binom[n - 1][k] } else { 0 };
            }
        }

        let mut width = [0u8; NUM_CLASSES];
        let mut row_start = [0usize; NUM_CLASSES + 1];
        for c in 0..NUM_CLASSES {
            let count = binom[BLOCK_BITS][c];
            // ceil(log2 count) is the bit length of count - 1.
            width[c] = (u32::BITS - (count - 1).leading_zeros()) as u8;
            row_start[c + 1] = row_start[c] + count as usize;
        }

        let mut class_table = vec![0u8; NUM_BLOCK_VALUES].into_boxed_slice();
        let mut offset_table = vec![0u16; NUM_BLOCK_VALUES].into_boxed_slice();
        let mut decode_table = vec![0u16; row_start[NUM_CLASSES]].into_boxed_slice();
        let mut next = [0u16; NUM_CLASSES];
        for x in 0..NUM_BLOCK_VALUES {
            let c = (x as u16).count_ones() as usize;
            class_table[x] = c as u8;
            offset_table[x] = next[c];
            decode_table[row_start[c] + next[c] as usize] = x as u16;
            next[c] += 1;
        }

        Self {
            binom,
            width,
            class_table,
            offset_table,
            decode_table,
            row_start,
        }
    }

    /// Process-wide tables, built on first use.
    pub fn global() -> &'static RrrTables {
        static TABLES: OnceLock<RrrTables> = OnceLock::new();
        TABLES.get_or_init(RrrTables::new)
    }

    /// `C(n, k)` for `k <= n <= 15`; zero otherwise.
    pub fn binom(&self, n: usize, k: usize) -> u32 {
        if n < NUM_CLASSES && k <= n {
            self.binom[n][k]
        } else {
            0
        }
    }

    /// Offset width `ceil(log2 C(15, c))` per class.
    #[inline(always)]
    pub fn width(&self, c: usize) -> usize {
        self.width[c] as usize
    }

    pub fn widths(&self) -> &[u8; NUM_CLASSES] {
        &self.width
    }

    #[inline(always)]
    pub fn class_of(&self, x: u16) -> u8 {
        self.class_table[x as usize]
    }

    #[inline(always)]
    pub fn offset_of(&self, x: u16) -> u16 {
        self.offset_table[x as usize]
    }

    /// All blocks of class `c`, in offset order.
    pub fn decode_row(&self, c: usize) -> &[u16] {
        &self.decode_table[self.row_start[c]..self.row_start[c + 1]]
    }

    #[inline(always)]
    pub(crate) fn decode_unchecked(&self, c: usize, o: usize) -> u16 {
        self.decode_table[self.row_start[c] + o]
    }

    pub fn encode_block(&self, x: u16) -> Result<(u8, u16)> {
        if x as usize >= NUM_BLOCK_VALUES {
            return Err(Error::Domain(format!("block value {x:#x} exceeds 15 bits")));
        }
        Ok((self.class_of(x), self.offset_of(x)))
    }

    pub fn decode_block(&self, c: u8, o: u16) -> Result<u16> {
        let c = c as usize;
        if c >= NUM_CLASSES {
            return Err(Error::Domain(format!("class {c} exceeds 15")));
        }
        let count = self.binom[BLOCK_BITS][c];
        if o as u32 >= count {
            return Err(Error::Domain(format!(
                "offset {o} out of range for class {c} ({count} values)"
            )));
        }
        Ok(self.decode_unchecked(c, o as usize))
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// `P(class = c) = C(15, c) p^c (1 - p)^(15 - c)` for i.i.d. bits of density `p`.
pub fn class_probability(p: f64, c: usize) -> Result<f64> {
    check_probability(p)?;
    if c >= NUM_CLASSES {
        return Err(Error::Domain(format!("class {c} exceeds 15")));
    }
    let n = RrrTables::global().binom(BLOCK_BITS, c) as f64;
    Ok(n * p.powi(c as i32) * (1.0 - p).powi((BLOCK_BITS - c) as i32))
}

/// Expected offset bits per block, `sum_c P(c) * width(c)`.
pub fn expected_offset_bits(p: f64) -> Result<f64> {
    let tables = RrrTables::global();
    (0..NUM_CLASSES).try_fold(0.0, |acc, c| {
        Ok(acc + class_probability(p, c)? * tables.width(c) as f64)
    })
}

/// Expected number of superblocks spanned by one select sample window,
/// `256 / (240 d)`.
pub fn expected_candidate_superblocks(d: f64) -> Result<f64> {
    check_probability(d)?;
    if d == 0.0 {
        return Err(Error::Domain("density 0 has no set bits to sample".into()));
    }
    Ok(crate::fast::SAMPLE_RATE as f64 / (SUPER_BITS as f64 * d))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rank of `x` among same-popcount values in ascending order, by the
    /// combinatorial number system: the i-th lowest set bit at position p
    /// contributes C(p, i).
    fn combinadic_rank(x: u16) -> u32 {
        let mut rank = 0;
        let mut i = 0;
        for p in 0..15u32 {
            if (x >> p) & 1 == 1 {
                i += 1;
                rank += binom_f(p, i);
            }
        }
        rank
    }

    fn binom_f(n: u32, k: u32) -> u32 {
        if k > n {
            return 0;
        }
        (0..k).fold(1u64, |acc, t| acc * (n - t) as u64 / (t + 1) as u64) as u32
    }

    #[test]
    fn tables_examples() {
        let t = RrrTables::new();
        assert_eq!((t.class_of(0), t.offset_of(0)), (0, 0));
        assert_eq!((t.class_of(0x7FFF), t.offset_of(0x7FFF)), (15, 0));
        assert_eq!(t.decode_row(7).len(), 6435);
        assert_eq!(t.decode_row(8).len(), 6435);
        assert_eq!(t.binom(15, 7), 6435);
        assert_eq!(
            t.widths(),
            &[0, 4, 7, 9, 11, 12, 13, 13, 13, 13, 12, 11, 9, 7, 4, 0]
        );
        assert_eq!(*t.widths().iter().max().unwrap(), 13);
    }

    #[test]
    fn binom_matches_multiplicative_formula() {
        let t = RrrTables::new();
        for n in 0..=15 {
            for k in 0..=n {
                assert_eq!(t.binom(n, k), binom_f(n as u32, k as u32));
            }
        }
        assert_eq!(t.binom(3, 4), 0);
    }

    #[test]
    fn encode_examples() {
        let t = RrrTables::global();
        assert_eq!(t.encode_block(0), Ok((0, 0)));
        for k in 0..15 {
            assert_eq!(t.encode_block(1 << k), Ok((1, k)));
        }
        assert!(t.encode_block(0x8000).is_err());
    }

    #[test]
    fn decode_examples() {
        let t = RrrTables::global();
        assert_eq!(t.decode_block(15, 0), Ok(0x7FFF));
        assert_eq!(t.decode_block(0, 0), Ok(0));
        assert_eq!(t.decode_block(1, 3), Ok(8));
        assert!(t.decode_block(0, 1).is_err());
        assert!(t.decode_block(7, 6435).is_err());
        assert!(t.decode_block(16, 0).is_err());
    }

    #[test]
    fn exhaustive_round_trip_and_combinadic_order() {
        let t = RrrTables::global();
        for x in 0..NUM_BLOCK_VALUES as u16 {
            let (c, o) = t.encode_block(x).unwrap();
            assert_eq!(c as u32, x.count_ones());
            assert_eq!(o as u32, combinadic_rank(x));
            assert!((o as u32) < (1u32 << t.width(c as usize)).max(1));
            assert_eq!(t.decode_block(c, o), Ok(x));
        }
    }

    #[test]
    fn offsets_monotone_within_class() {
        let t = RrrTables::global();
        for c in 0..NUM_CLASSES {
            assert!(t.decode_row(c).windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn class_probability_examples() {
        assert_eq!(class_probability(0.0, 0), Ok(1.0));
        assert_eq!(class_probability(1.0, 15), Ok(1.0));
        assert!(class_probability(-0.1, 0).is_err());
        assert!(class_probability(0.5, 16).is_err());
        for p in [0.01, 0.1, 0.5] {
            let sum: f64 = (0..16).map(|c| class_probability(p, c).unwrap()).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn expected_offset_bits_values() {
        assert!((expected_offset_bits(0.5).unwrap() - 12.49).abs() < 0.02);
        assert!((expected_offset_bits(0.01).unwrap() - 0.59).abs() < 0.02);
        assert_eq!(expected_offset_bits(0.0), Ok(0.0));
        assert_eq!(expected_offset_bits(1.0), Ok(0.0));
        for p in [0.01, 0.1, 0.25, 0.37, 0.5] {
            let a = expected_offset_bits(p).unwrap();
            let b = expected_offset_bits(1.0 - p).unwrap();
            assert!((a - b).abs() < 1e-12, "p={p}");
        }
        assert!(expected_offset_bits(2.0).is_err());
    }

    #[test]
    fn candidate_superblocks() {
        assert!((expected_candidate_superblocks(0.01).unwrap() - 106.7).abs() < 0.1);
        assert!((expected_candidate_superblocks(0.99).unwrap() - 1.077).abs() < 0.01);
        assert!((expected_candidate_superblocks(1.0).unwrap() - 256.0 / 240.0).abs() < 1e-12);
        assert!(expected_candidate_superblocks(0.0).is_err());
    }
}
