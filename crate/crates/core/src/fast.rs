//! Asymmetric 4096/256 layout with sampled select.
//!
//! A 256-bit block spans four words, so `rank1` popcounts at most three full
//! words plus one masked word. The select directories record the position of
//! every 256th set (zero) bit; a query `j` reads `samples[j >> 8]` and
//! `samples[(j >> 8) + 1]` and searches only the superblocks in between.

use std::ops::Range;

use crate::bits::{low_mask, popcount_word, select_in_word_unchecked, RawBitVector, WORD_BITS};
use crate::block::{check_index, check_rank, PlainRankIter, TwoLevel};
use crate::error::{Error, Result};
use crate::space::SpaceReport;
use crate::RankSelect;

/// Every `SAMPLE_RATE`-th matching bit is sampled.
pub const SAMPLE_SHIFT: u32 = 8;
pub const SAMPLE_RATE: usize = 1 << SAMPLE_SHIFT;

#[derive(Clone, Debug)]
pub struct FastBitVec {
    raw: RawBitVector,
    index: TwoLevel<{ FastBitVec::SUPER_BITS }, { FastBitVec::BLOCK_BITS }>,
    select1_samples: Vec<u32>,
    select0_samples: Vec<u32>,
    ones: usize,
}

impl FastBitVec {
    pub const SUPER_BITS: usize = 4096;
    pub const BLOCK_BITS: usize = 256;
    /// Sample entries are 32-bit positions.
    pub const MAX_LEN: usize = 1 << 32;

    pub fn check_capacity(len: usize) -> Result<()> {
        if len >= Self::MAX_LEN {
            return Err(Error::Capacity(format!(
                "length {len} needs positions wider than 32 bits"
            )));
        }
        Ok(())
    }

    pub fn new(raw: RawBitVector) -> Result<Self> {
        Self::check_capacity(raw.len())?;
        let index = TwoLevel::build(&raw);
        let words = raw.words();
        let last_mask = low_mask(raw.len() - words.len().saturating_sub(1) * WORD_BITS);

        let mut select1_samples = Vec::new();
        let mut select0_samples = Vec::new();
        let (mut ones, mut zeros) = (0usize, 0usize);
        let (mut next1, mut next0) = (0usize, 0usize);
        for (wi, &w) in words.iter().enumerate() {
            let valid = if wi + 1 == words.len() { last_mask } else { u64::MAX };
            let inv = !w & valid;
            let c1 = popcount_word(w) as usize;
            let c0 = popcount_word(inv) as usize;
            while next1 < ones + c1 {
                let p = wi * WORD_BITS + select_in_word_unchecked(w, (next1 - ones) as u32) as usize;
                select1_samples.push(p as u32);
                next1 += SAMPLE_RATE;
            }
            while next0 < zeros + c0 {
                let p = wi * WORD_BITS + select_in_word_unchecked(inv, (next0 - zeros) as u32) as usize;
                select0_samples.push(p as u32);
                next0 += SAMPLE_RATE;
            }
            ones += c1;
            zeros += c0;
        }

        Ok(Self {
            raw,
            index,
            select1_samples,
            select0_samples,
            ones,
        })
    }

    pub fn raw(&self) -> &RawBitVector {
        &self.raw
    }

    pub fn super_ranks(&self) -> &[u64] {
        &self.index.super_ranks
    }

    pub fn block_ranks(&self) -> &[u16] {
        &self.index.block_ranks
    }

    pub fn select1_samples(&self) -> &[u32] {
        &self.select1_samples
    }

    pub fn select0_samples(&self) -> &[u32] {
        &self.select0_samples
    }

    /// Word indices popcounted by `rank1(i)`.
    pub fn rank_scan_range(i: usize) -> Range<usize> {
        TwoLevel::<{ Self::SUPER_BITS }, { Self::BLOCK_BITS }>::scan_range(i)
    }

    /// Bit-position window `[lo, hi]` the select directory assigns to `j`.
    #[inline(always)]
    fn window(&self, samples: &[u32], j: usize) -> (usize, usize) {
        let k = j >> SAMPLE_SHIFT;
        let lo = samples[k] as usize;
        let hi = match samples.get(k + 1) {
            Some(&p) => p as usize,
            None => self.raw.len() - 1,
        };
        (lo, hi)
    }

    /// Window of `select1(j)`, exposed for tests.
    pub fn select1_window(&self, j: usize) -> Result<(usize, usize)> {
        check_rank(j, self.ones)?;
        Ok(self.window(&self.select1_samples, j))
    }

    pub fn select0_window(&self, j: usize) -> Result<(usize, usize)> {
        check_rank(j, self.count_zeros())?;
        Ok(self.window(&self.select0_samples, j))
    }

    pub fn rank_iter_from(&self, start: usize) -> PlainRankIter<'_> {
        let before = if start < self.raw.len() {
            self.index.ones_before_word(self.raw.words(), start / WORD_BITS)
        } else {
            self.ones
        };
        PlainRankIter::new(self.raw.words(), self.raw.len(), start, before)
    }
}

impl RankSelect for FastBitVec {
    fn len(&self) -> usize {
        self.raw.len()
    }

    fn count_ones(&self) -> usize {
        self.ones
    }

    fn get(&self, i: usize) -> Result<bool> {
        self.raw.get_bit(i)
    }

    #[inline]
    fn rank1(&self, i: usize) -> Result<usize> {
        check_index(i, self.raw.len())?;
        Ok(self.index.rank1(self.raw.words(), i))
    }

    fn select1(&self, j: usize) -> Result<usize> {
        check_rank(j, self.ones)?;
        let (lo, hi) = self.window(&self.select1_samples, j);
        Ok(self.index.select1_within(
            self.raw.words(),
            j,
            lo / Self::SUPER_BITS,
            hi / Self::SUPER_BITS,
        ))
    }

    fn select0(&self, j: usize) -> Result<usize> {
        check_rank(j, self.count_zeros())?;
        let (lo, hi) = self.window(&self.select0_samples, j);
        Ok(self.index.select0_within(
            self.raw.words(),
            j,
            lo / Self::SUPER_BITS,
            hi / Self::SUPER_BITS,
        ))
    }

    fn space(&self) -> SpaceReport {
        SpaceReport {
            len_bits: self.raw.len(),
            raw_bits: self.raw.len() as u64,
            rank_index_bits: self.index.index_bits(),
            select1_bits: 32 * self.select1_samples.len() as u64,
            select0_bits: 32 * self.select0_samples.len() as u64,
            ..SpaceReport::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::OracleBitVec;
    use crate::{generate, BlockBitVec, GeneratorSpec};

    fn fast(raw: RawBitVector) -> FastBitVec {
        FastBitVec::new(raw).unwrap()
    }

    #[test]
    fn samples_all_ones_512() {
        let v = fast(RawBitVector::ones(512));
        assert_eq!(v.select1_samples(), &[0, 256]);
        assert!(v.select0_samples().is_empty());
        assert_eq!(v.select1(256), Ok(256));
    }

    #[test]
    fn samples_strictly_increasing() {
        let raw = generate(&GeneratorSpec::new(4, 0.3, 100_000)).unwrap();
        let oracle = OracleBitVec::new(&raw).answers();
        let v = fast(raw);
        for (k, w) in v.select1_samples().windows(2).enumerate() {
            assert!(w[0] < w[1]);
            assert_eq!(w[0] as usize, oracle.select1(k * 256));
        }
        for (k, &p) in v.select0_samples().iter().enumerate() {
            assert_eq!(p as usize, oracle.select0(k * 256));
        }
    }

    #[test]
    fn capacity() {
        assert!(FastBitVec::check_capacity((1 << 32) - 1).is_ok());
        assert!(matches!(
            FastBitVec::check_capacity(1 << 32),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn small_examples() {
        let v = fast(RawBitVector::from_bits([true, false, true, true]));
        assert_eq!(v.rank1(2), Ok(2));
        assert_eq!(v.rank0(1), Ok(1));
        assert_eq!(v.select1(1), Ok(2));
        assert_eq!(v.select0(0), Ok(1));
        assert!(v.rank1(4).is_err());
        assert!(v.select1(3).is_err());

        let ones = fast(RawBitVector::ones(4097));
        assert_eq!(ones.rank1(4095), Ok(4096));
        assert_eq!(ones.rank1(4096), Ok(4097));
        let zeros = fast(RawBitVector::zeros(241));
        assert_eq!(zeros.select0(240), Ok(240));
    }

    #[test]
    fn empty() {
        let v = fast(RawBitVector::zeros(0));
        assert!(v.rank1(0).is_err());
        assert!(v.select1(0).is_err());
        assert!(v.select0(0).is_err());
        assert_eq!(v.space().total_bpe(), Err(Error::EmptyVector));
    }

    #[test]
    fn single_bit_walk_240() {
        for p in 0..240 {
            let v = fast(RawBitVector::single_bit(240, p).unwrap());
            assert_eq!(v.select1(0), Ok(p));
        }
    }

    #[test]
    fn agrees_with_block_and_oracle() {
        for (seed, d) in [(1, 0.01), (2, 0.1), (3, 0.5), (4, 0.9), (5, 0.99)] {
            let raw = generate(&GeneratorSpec::new(seed, d, 250_000)).unwrap();
            let oracle = OracleBitVec::new(&raw).answers();
            let block = BlockBitVec::new(raw.clone());
            let v = fast(raw);
            for i in (0..v.len()).step_by(13) {
                assert_eq!(v.rank1(i).unwrap(), oracle.rank1(i));
                assert_eq!(v.rank1(i).unwrap(), block.rank1(i).unwrap());
            }
            for j in 0..v.count_ones() {
                let p = v.select1(j).unwrap();
                assert_eq!(p, oracle.select1(j));
                let (lo, hi) = v.select1_window(j).unwrap();
                assert!(lo <= p && p <= hi);
            }
            for j in 0..v.count_zeros() {
                let p = v.select0(j).unwrap();
                assert_eq!(p, oracle.select0(j));
                let (lo, hi) = v.select0_window(j).unwrap();
                assert!(lo <= p && p <= hi);
            }
        }
    }

    #[test]
    fn rank_scans_at_most_four_words() {
        for i in 0..10_000 {
            let r = FastBitVec::rank_scan_range(i);
            assert!((1..=4).contains(&r.len()), "i={i} range={r:?}");
        }
    }

    #[test]
    fn space_breakdown() {
        let v = fast(RawBitVector::ones(4096 * 3));
        let s = v.space();
        assert_eq!(s.rank_index_bits, 3 * 64 + 48 * 16);
        assert_eq!(s.rank_index_bpe().unwrap(), 64.0 / 4096.0 + 16.0 / 256.0);

        let v = fast(RawBitVector::zeros(10_000));
        assert_eq!(v.space().select1_bpe().unwrap(), 0.0);

        let v = fast(generate(&GeneratorSpec::new(8, 0.5, 1_000_000)).unwrap());
        let s = v.space();
        assert!((s.rank_index_bpe().unwrap() - 0.078125).abs() < 0.0005);
        assert!((s.select1_bpe().unwrap() - 0.0625).abs() < 0.001);
        assert!((s.comparable_total_bpe().unwrap() - 1.141).abs() < 0.002);
    }

    #[test]
    fn rank_iter_matches_rank() {
        let v = fast(generate(&GeneratorSpec::new(2, 0.6, 9_000)).unwrap());
        for start in [0, 255, 256, 4095, 4096, 8999] {
            let got: Vec<usize> = v.rank_iter_from(start).collect();
            let want: Vec<usize> = (start..v.len()).map(|i| v.rank1(i).unwrap()).collect();
            assert_eq!(got, want);
        }
    }
}
