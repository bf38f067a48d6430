//! Plain bit vectors with a two-level rank directory.
//!
//! [`TwoLevel`] holds the directory shared by [`BlockBitVec`] and
//! [`FastBitVec`](crate::FastBitVec): one absolute 64-bit count per superblock
//! and one 16-bit count per block, relative to the enclosing superblock.

use std::ops::Range;

use crate::bits::{low_mask, popcount_word, select_in_word_unchecked, RawBitVector, WORD_BITS};
use crate::error::{Error, Result};
use crate::space::SpaceReport;
use crate::RankSelect;

/// Largest index in `[lo, hi]` whose key is `<= target`. Requires
/// `key(lo) <= target` and a nondecreasing key.
#[inline]
pub(crate) fn last_at_most(
    mut lo: usize,
    mut hi: usize,
    target: usize,
    key: impl Fn(usize) -> usize,
) -> usize {
    debug_assert!(key(lo) <= target);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if key(mid) <= target {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

#[derive(Clone, Debug)]
pub(crate) struct TwoLevel<const SUPER_BITS: usize, const BLOCK_BITS: usize> {
    pub(crate) super_ranks: Vec<u64>,
    pub(crate) block_ranks: Vec<u16>,
}

impl<const SUPER_BITS: usize, const BLOCK_BITS: usize> TwoLevel<SUPER_BITS, BLOCK_BITS> {
    const WORDS_PER_BLOCK: usize = BLOCK_BITS / WORD_BITS;
    const BLOCKS_PER_SUPER: usize = SUPER_BITS / BLOCK_BITS;

    pub(crate) fn build(raw: &RawBitVector) -> Self {
        let words = raw.words();
        let n_blocks = raw.len().div_ceil(BLOCK_BITS);
        let mut super_ranks = Vec::with_capacity(raw.len().div_ceil(SUPER_BITS));
        let mut block_ranks = Vec::with_capacity(n_blocks);
        let mut total = 0u64;
        for b in 0..n_blocks {
            if b % Self::BLOCKS_PER_SUPER == 0 {
                super_ranks.push(total);
            }
            let relative = total - super_ranks[super_ranks.len() - 1];
            block_ranks.push(relative as u16);
            let start = b * Self::WORDS_PER_BLOCK;
            let end = (start + Self::WORDS_PER_BLOCK).min(words.len());
            total += words[start..end]
                .iter()
                .map(|&w| popcount_word(w) as u64)
                .sum::<u64>();
        }
        Self {
            super_ranks,
            block_ranks,
        }
    }

    pub(crate) fn index_bits(&self) -> u64 {
        64 * self.super_ranks.len() as u64 + 16 * self.block_ranks.len() as u64
    }

    /// Words popcounted by `rank1(i)`: from the start of `i`'s block through
    /// the word holding `i`.
    #[inline(always)]
    pub(crate) fn scan_range(i: usize) -> Range<usize> {
        (i / BLOCK_BITS) * Self::WORDS_PER_BLOCK..i / WORD_BITS + 1
    }

    /// Set bits strictly before word `w`.
    #[inline(always)]
    pub(crate) fn ones_before_word(&self, words: &[u64], w: usize) -> usize {
        let b = w / Self::WORDS_PER_BLOCK;
        let base = self.super_ranks[b / Self::BLOCKS_PER_SUPER] as usize
            + self.block_ranks[b] as usize;
        base + words[b * Self::WORDS_PER_BLOCK..w]
            .iter()
            .map(|&x| popcount_word(x) as usize)
            .sum::<usize>()
    }

    #[inline(always)]
    pub(crate) fn rank1(&self, words: &[u64], i: usize) -> usize {
        let range = Self::scan_range(i);
        let last = range.end - 1;
        let b = i / BLOCK_BITS;
        let mut r = self.super_ranks[i / SUPER_BITS] as usize + self.block_ranks[b] as usize;
        for &w in &words[range.start..last] {
            r += popcount_word(w) as usize;
        }
        r + popcount_word(words[last] & low_mask(i % WORD_BITS + 1)) as usize
    }

    /// Zero bits before superblock `s` (exact, superblocks before the last are full).
    #[inline(always)]
    fn zeros_before_super(&self, s: usize) -> usize {
        s * SUPER_BITS - self.super_ranks[s] as usize
    }

    /// `select1(j)` with the answer known to lie in superblocks `[lo_s, hi_s]`.
    #[inline]
    pub(crate) fn select1_within(&self, words: &[u64], j: usize, lo_s: usize, hi_s: usize) -> usize {
        let s = last_at_most(lo_s, hi_s, j, |s| self.super_ranks[s] as usize);
        let mut rem = j - self.super_ranks[s] as usize;
        let first_b = s * Self::BLOCKS_PER_SUPER;
        let end_b = (first_b + Self::BLOCKS_PER_SUPER).min(self.block_ranks.len());
        let mut b = first_b;
        while b + 1 < end_b && self.block_ranks[b + 1] as usize <= rem {
            b += 1;
        }
        rem -= self.block_ranks[b] as usize;
        let mut w = b * Self::WORDS_PER_BLOCK;
        loop {
            let c = popcount_word(words[w]) as usize;
            if rem < c {
                return w * WORD_BITS + select_in_word_unchecked(words[w], rem as u32) as usize;
            }
            rem -= c;
            w += 1;
        }
    }

    /// `select0(j)` with the answer known to lie in superblocks `[lo_s, hi_s]`.
    #[inline]
    pub(crate) fn select0_within(&self, words: &[u64], j: usize, lo_s: usize, hi_s: usize) -> usize {
        let s = last_at_most(lo_s, hi_s, j, |s| self.zeros_before_super(s));
        let mut rem = j - self.zeros_before_super(s);
        let first_b = s * Self::BLOCKS_PER_SUPER;
        let end_b = (first_b + Self::BLOCKS_PER_SUPER).min(self.block_ranks.len());
        let block_zeros = |b: usize| (b - first_b) * BLOCK_BITS - self.block_ranks[b] as usize;
        let mut b = first_b;
        while b + 1 < end_b && block_zeros(b + 1) <= rem {
            b += 1;
        }
        rem -= block_zeros(b);
        let mut w = b * Self::WORDS_PER_BLOCK;
        loop {
            // Padding past N reads as zeros but is only reached after all
            // real zeros have been counted.
            let inv = !words[w];
            let c = popcount_word(inv) as usize;
            if rem < c {
                return w * WORD_BITS + select_in_word_unchecked(inv, rem as u32) as usize;
            }
            rem -= c;
            w += 1;
        }
    }
}

/// Incremental `rank1` over consecutive positions of a plain vector.
///
/// Carries the running count across words, so each step costs one masked
/// popcount and no directory lookup.
pub struct PlainRankIter<'a> {
    words: &'a [u64],
    pos: usize,
    end: usize,
    before_word: usize,
}

impl<'a> PlainRankIter<'a> {
    pub(crate) fn new(words: &'a [u64], len: usize, start: usize, before_word: usize) -> Self {
        Self {
            words,
            pos: start,
            end: len,
            before_word,
        }
    }
}

impl Iterator for PlainRankIter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.pos >= self.end {
            return None;
        }
        let w = self.words[self.pos / WORD_BITS];
        let off = self.pos % WORD_BITS;
        let r = self.before_word + popcount_word(w & low_mask(off + 1)) as usize;
        self.pos += 1;
        if off == WORD_BITS - 1 {
            self.before_word += popcount_word(w) as usize;
        }
        Some(r)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.end.saturating_sub(self.pos);
        (n, Some(n))
    }
}

pub(crate) fn check_index(i: usize, len: usize) -> Result<()> {
    if i >= len {
        return Err(Error::OutOfRange { index: i, len });
    }
    Ok(())
}

pub(crate) fn check_rank(j: usize, count: usize) -> Result<()> {
    if j >= count {
        return Err(Error::RankOutOfRange { rank: j, count });
    }
    Ok(())
}

/// Classic layout: 2048-bit superblocks, 512-bit blocks, binary-search select.
///
/// The rank directory costs `64/2048 + 16/512 = 0.0625` bits per element.
#[derive(Clone, Debug)]
pub struct BlockBitVec {
    raw: RawBitVector,
    index: TwoLevel<{ BlockBitVec::SUPER_BITS }, { BlockBitVec::BLOCK_BITS }>,
    ones: usize,
}

impl BlockBitVec {
    pub const SUPER_BITS: usize = 2048;
    pub const BLOCK_BITS: usize = 512;

    pub fn new(raw: RawBitVector) -> Self {
        let index = TwoLevel::build(&raw);
        let ones = raw.count_ones();
        Self { raw, index, ones }
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

    /// Word indices popcounted by `rank1(i)`.
    pub fn rank_scan_range(i: usize) -> Range<usize> {
        TwoLevel::<{ Self::SUPER_BITS }, { Self::BLOCK_BITS }>::scan_range(i)
    }

    /// Iterator yielding `rank1(start), rank1(start + 1), ..`.
    pub fn rank_iter_from(&self, start: usize) -> PlainRankIter<'_> {
        let before = if start < self.raw.len() {
            self.index.ones_before_word(self.raw.words(), start / WORD_BITS)
        } else {
            self.ones
        };
        PlainRankIter::new(self.raw.words(), self.raw.len(), start, before)
    }
}

impl RankSelect for BlockBitVec {
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
        let last = self.index.super_ranks.len() - 1;
        Ok(self.index.select1_within(self.raw.words(), j, 0, last))
    }

    fn select0(&self, j: usize) -> Result<usize> {
        check_rank(j, self.count_zeros())?;
        let last = self.index.super_ranks.len() - 1;
        Ok(self.index.select0_within(self.raw.words(), j, 0, last))
    }

    fn space(&self) -> SpaceReport {
        SpaceReport {
            len_bits: self.raw.len(),
            raw_bits: self.raw.len() as u64,
            rank_index_bits: self.index.index_bits(),
            ..SpaceReport::default()
        }
    }
}
