use crate::bits::{low_mask, popcount_word, select_in_word_unchecked, RawBitVector, WORD_BITS};
use crate::block::{check_index, check_rank, last_at_most};
use crate::error::{Error, Result};
use crate::fast::{SAMPLE_RATE, SAMPLE_SHIFT};
use crate::space::SpaceReport;
use crate::RankSelect;

use super::coding::{RrrTables, BLOCKS_PER_SUPER, BLOCK_BITS, SUPER_BITS};

/// Directory entry for 16 consecutive blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Superblock {
    /// Set bits before the superblock.
    pub cum_rank: u64,
    /// Position in the offset stream of the superblock's first offset.
    pub bit_ptr: u64,
}

/// RRR-compressed bit vector with block size 15.
///
/// Layout: a 4-bit class per block (two per byte), a contiguous LSB-first
/// stream of variable-width offsets, one [`Superblock`] per 240 bits, and
/// sampled select directories holding the superblock index of every 256th
/// set bit and every 256th zero bit.
#[derive(Clone, Debug)]
pub struct RrrBitVec {
    tables: &'static RrrTables,
    len: usize,
    ones: usize,
    n_blocks: usize,
    classes: Vec<u8>,
    offsets: Vec<u64>,
    offsets_len: u64,
    superblocks: Vec<Superblock>,
    select1_samples: Vec<u32>,
    select0_samples: Vec<u32>,
}

impl RrrBitVec {
    pub fn new(raw: &RawBitVector) -> Result<Self> {
        Self::with_tables(raw, RrrTables::global())
    }

    pub fn check_capacity(len: usize) -> Result<()> {
        let supers = len.div_ceil(SUPER_BITS);
        if supers > u32::MAX as usize {
            return Err(Error::Capacity(format!(
                "{supers} superblocks do not fit 32-bit sample entries"
            )));
        }
        Ok(())
    }

    pub fn with_tables(raw: &RawBitVector, tables: &'static RrrTables) -> Result<Self> {
        let len = raw.len();
        Self::check_capacity(len)?;
        let n_blocks = len.div_ceil(BLOCK_BITS);
        let n_supers = len.div_ceil(SUPER_BITS);

        let mut classes = vec![0u8; n_blocks.div_ceil(2)];
        let mut stream = BitWriter::default();
        let mut superblocks = Vec::with_capacity(n_supers);
        let mut select1_samples = Vec::new();
        let mut select0_samples = Vec::new();
        let (mut ones, mut zeros) = (0usize, 0usize);
        let (mut next1, mut next0) = (0usize, 0usize);

        for b in 0..n_blocks {
            let s = b / BLOCKS_PER_SUPER;
            if b % BLOCKS_PER_SUPER == 0 {
                superblocks.push(Superblock {
                    cum_rank: ones as u64,
                    bit_ptr: stream.len,
                });
            }
            let start = b * BLOCK_BITS;
            let valid = BLOCK_BITS.min(len - start);
            // read_bits yields zeros past the end, padding the final block.
            let x = raw.read_bits(start, BLOCK_BITS) as u16;
            let c = tables.class_of(x) as usize;
            classes[b / 2] |= (c as u8) << ((b % 2) * 4);
            stream.push(tables.offset_of(x) as u64, tables.width(c));

            let z = valid - c;
            while next1 < ones + c {
                select1_samples.push(s as u32);
                next1 += SAMPLE_RATE;
            }
            while next0 < zeros + z {
                select0_samples.push(s as u32);
                next0 += SAMPLE_RATE;
            }
            ones += c;
            zeros += z;
        }

        let offsets_len = stream.len;
        let mut offsets = stream.words;
        // One spare word so two-word reads never go out of bounds.
        offsets.push(0);

        Ok(Self {
            tables,
            len,
            ones,
            n_blocks,
            classes,
            offsets,
            offsets_len,
            superblocks,
            select1_samples,
            select0_samples,
        })
    }

    pub fn tables(&self) -> &'static RrrTables {
        self.tables
    }

    pub fn num_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn superblocks(&self) -> &[Superblock] {
        &self.superblocks
    }

    pub fn select1_samples(&self) -> &[u32] {
        &self.select1_samples
    }

    pub fn select0_samples(&self) -> &[u32] {
        &self.select0_samples
    }

    /// Length of the offset stream in bits.
    pub fn offsets_len(&self) -> u64 {
        self.offsets_len
    }

    #[inline(always)]
    pub fn class(&self, b: usize) -> usize {
        ((self.classes[b >> 1] >> ((b & 1) << 2)) & 0xF) as usize
    }

    /// Number of real (non-padding) bits in block `b`.
    #[inline(always)]
    fn block_len(&self, b: usize) -> usize {
        if b + 1 == self.n_blocks {
            self.len - b * BLOCK_BITS
        } else {
            BLOCK_BITS
        }
    }

    #[inline(always)]
    fn read_offset(&self, ptr: u64, width: usize) -> usize {
        let w = (ptr / WORD_BITS as u64) as usize;
        let off = (ptr % WORD_BITS as u64) as usize;
        let mut v = self.offsets[w] >> off;
        if off + width > WORD_BITS {
            v |= self.offsets[w + 1] << (WORD_BITS - off);
        }
        (v & low_mask(width)) as usize
    }

    /// Decodes block `b` whose offset starts at `ptr`.
    #[inline(always)]
    fn decode(&self, c: usize, ptr: u64) -> u64 {
        match c {
            0 => 0,
            15 => 0x7FFF,
            _ => self
                .tables
                .decode_unchecked(c, self.read_offset(ptr, self.tables.width(c)))
                as u64,
        }
    }

    /// Stream position of block `b`'s offset, walking classes from its superblock.
    #[inline(always)]
    fn offset_ptr(&self, b: usize) -> (u64, usize) {
        let s = b / BLOCKS_PER_SUPER;
        let sb = self.superblocks[s];
        let mut ptr = sb.bit_ptr;
        let mut r = sb.cum_rank as usize;
        for k in s * BLOCKS_PER_SUPER..b {
            let c = self.class(k);
            r += c;
            ptr += self.tables.width(c) as u64;
        }
        (ptr, r)
    }

    /// Decoded 15-bit value of block `b`.
    pub fn block(&self, b: usize) -> Result<u16> {
        check_index(b, self.n_blocks)?;
        let (ptr, _) = self.offset_ptr(b);
        Ok(self.decode(self.class(b), ptr) as u16)
    }

    /// Bits of the offset stream used by block `b`.
    pub fn block_offset_bits(&self, b: usize) -> usize {
        self.tables.width(self.class(b))
    }

    /// Reconstructs the uncompressed vector.
    pub fn decompress(&self) -> RawBitVector {
        let mut words = vec![0u64; self.len.div_ceil(WORD_BITS)];
        let mut ptr = 0u64;
        for b in 0..self.n_blocks {
            let c = self.class(b);
            let x = self.decode(c, ptr);
            ptr += self.tables.width(c) as u64;
            let pos = b * BLOCK_BITS;
            let (w, off) = (pos / WORD_BITS, pos % WORD_BITS);
            words[w] |= x << off;
            if off + BLOCK_BITS > WORD_BITS && w + 1 < words.len() {
                words[w + 1] |= x >> (WORD_BITS - off);
            }
        }
        RawBitVector::from_words(words, self.len).expect("word count matches length")
    }

    #[inline(always)]
    fn zeros_before_super(&self, s: usize) -> usize {
        s * SUPER_BITS - self.superblocks[s].cum_rank as usize
    }

    #[inline(always)]
    fn window(&self, samples: &[u32], j: usize) -> (usize, usize) {
        let k = j >> SAMPLE_SHIFT;
        let lo = samples[k] as usize;
        let hi = match samples.get(k + 1) {
            Some(&s) => s as usize,
            None => self.superblocks.len() - 1,
        };
        (lo, hi)
    }

    /// Candidate superblock range `[lo, hi]` of `select1(j)`.
    pub fn select1_window(&self, j: usize) -> Result<(usize, usize)> {
        check_rank(j, self.ones)?;
        Ok(self.window(&self.select1_samples, j))
    }

    pub fn select0_window(&self, j: usize) -> Result<(usize, usize)> {
        check_rank(j, self.len - self.ones)?;
        Ok(self.window(&self.select0_samples, j))
    }

    /// Iterator yielding `rank1(start), rank1(start + 1), ..`.
    pub fn rank_iter_from(&self, start: usize) -> RrrRankIter<'_> {
        let mut it = RrrRankIter {
            bv: self,
            pos: start,
            block: 0,
            ptr: 0,
            before_block: 0,
            value: 0,
        };
        if start < self.len {
            let b = start / BLOCK_BITS;
            let (ptr, r) = self.offset_ptr(b);
            it.block = b;
            it.ptr = ptr;
            it.before_block = r;
            it.value = self.decode(self.class(b), ptr);
        }
        it
    }
}

impl RankSelect for RrrBitVec {
    fn len(&self) -> usize {
        self.len
    }

    fn count_ones(&self) -> usize {
        self.ones
    }

    fn get(&self, i: usize) -> Result<bool> {
        check_index(i, self.len)?;
        let b = i / BLOCK_BITS;
        let (ptr, _) = self.offset_ptr(b);
        Ok((self.decode(self.class(b), ptr) >> (i % BLOCK_BITS)) & 1 == 1)
    }

    #[inline]
    fn rank1(&self, i: usize) -> Result<usize> {
        check_index(i, self.len)?;
        let b = i / BLOCK_BITS;
        let (ptr, r) = self.offset_ptr(b);
        let c = self.class(b);
        let within = i % BLOCK_BITS;
        Ok(match c {
            0 => r,
            15 => r + within + 1,
            _ => r + popcount_word(self.decode(c, ptr) & low_mask(within + 1)) as usize,
        })
    }

    fn select1(&self, j: usize) -> Result<usize> {
        check_rank(j, self.ones)?;
        let (lo, hi) = self.window(&self.select1_samples, j);
        let s = last_at_most(lo, hi, j, |s| self.superblocks[s].cum_rank as usize);
        let sb = self.superblocks[s];
        let mut rem = j - sb.cum_rank as usize;
        let mut ptr = sb.bit_ptr;
        let mut b = s * BLOCKS_PER_SUPER;
        let mut c = self.class(b);
        while rem >= c {
            rem -= c;
            ptr += self.tables.width(c) as u64;
            b += 1;
            c = self.class(b);
        }
        let x = self.decode(c, ptr);
        Ok(b * BLOCK_BITS + select_in_word_unchecked(x, rem as u32) as usize)
    }

    fn select0(&self, j: usize) -> Result<usize> {
        check_rank(j, self.len - self.ones)?;
        let (lo, hi) = self.window(&self.select0_samples, j);
        let s = last_at_most(lo, hi, j, |s| self.zeros_before_super(s));
        let mut rem = j - self.zeros_before_super(s);
        let mut ptr = self.superblocks[s].bit_ptr;
        let mut b = s * BLOCKS_PER_SUPER;
        let mut c = self.class(b);
        // The class complement gives the zero count; the final block may be short.
        while rem >= self.block_len(b) - c {
            rem -= self.block_len(b) - c;
            ptr += self.tables.width(c) as u64;
            b += 1;
            c = self.class(b);
        }
        let inv = !self.decode(c, ptr) & low_mask(self.block_len(b));
        Ok(b * BLOCK_BITS + select_in_word_unchecked(inv, rem as u32) as usize)
    }

    fn space(&self) -> SpaceReport {
        SpaceReport {
            len_bits: self.len,
            offsets_bits: self.offsets_len,
            structural_bits: 4 * self.n_blocks as u64 + 128 * self.superblocks.len() as u64,
            select1_bits: 32 * self.select1_samples.len() as u64,
            select0_bits: 32 * self.select0_samples.len() as u64,
            ..SpaceReport::default()
        }
    }
}

/// Incremental `rank1` over consecutive positions of an [`RrrBitVec`].
///
/// Keeps the current block decoded and advances the stream pointer by one
/// offset width per block instead of resolving each position from its
/// superblock.
pub struct RrrRankIter<'a> {
    bv: &'a RrrBitVec,
    pos: usize,
    block: usize,
    ptr: u64,
    before_block: usize,
    value: u64,
}

impl Iterator for RrrRankIter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.pos >= self.bv.len {
            return None;
        }
        let within = self.pos - self.block * BLOCK_BITS;
        let r = self.before_block + popcount_word(self.value & low_mask(within + 1)) as usize;
        self.pos += 1;
        if within == BLOCK_BITS - 1 && self.pos < self.bv.len {
            let c = self.bv.class(self.block);
            self.before_block += c;
            self.ptr += self.bv.tables.width(c) as u64;
            self.block += 1;
            self.value = self.bv.decode(self.bv.class(self.block), self.ptr);
        }
        Some(r)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.bv.len.saturating_sub(self.pos);
        (n, Some(n))
    }
}

#[derive(Default)]
struct BitWriter {
    words: Vec<u64>,
    len: u64,
}

impl BitWriter {
    fn push(&mut self, value: u64, width: usize) {
        if width == 0 {
            return;
        }
        let off = (self.len % WORD_BITS as u64) as usize;
        if off == 0 {
            self.words.push(0);
        }
        let last = self.words.len() - 1;
        self.words[last] |= value << off;
        if off + width > WORD_BITS {
            self.words.push(value >> (WORD_BITS - off));
        }
        self.len += width as u64;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::OracleBitVec;
    use crate::rrr::coding::expected_offset_bits;
    use crate::{generate, GeneratorSpec};

    fn rrr(raw: &RawBitVector) -> RrrBitVec {
        RrrBitVec::new(raw).unwrap()
    }

    #[test]
    fn bit_writer_packs_lsb_first() {
        let mut w = BitWriter::default();
        w.push(0b101, 3);
        w.push(0, 0);
        w.push(0x1FFF, 13);
        w.push(0xABCD_EF01_2345, 48);
        w.push(0b11, 2);
        assert_eq!(w.len, 66);
        assert_eq!(w.words[0] & 0b111, 0b101);
        assert_eq!((w.words[0] >> 3) & 0x1FFF, 0x1FFF);
        assert_eq!(w.words[0] >> 16, 0xABCD_EF01_2345);
        assert_eq!(w.words[1], 0b11);
    }

    #[test]
    fn constant_240() {
        let z = rrr(&RawBitVector::zeros(240));
        assert!((0..16).all(|b| z.class(b) == 0));
        assert_eq!(z.offsets_len(), 0);
        assert_eq!(z.superblocks(), &[Superblock::default()]);

        let o = rrr(&RawBitVector::ones(240));
        assert!((0..16).all(|b| o.class(b) == 15));
        assert_eq!(o.offsets_len(), 0);
        assert_eq!(o.superblocks().len(), 1);
        assert_eq!(o.superblocks()[0].cum_rank, 0);
    }

    #[test]
    fn empty() {
        let v = rrr(&RawBitVector::zeros(0));
        assert_eq!(v.num_blocks(), 0);
        assert!(v.rank1(0).is_err());
        assert!(v.select1(0).is_err());
        assert!(v.select0(0).is_err());
        assert_eq!(v.decompress(), RawBitVector::zeros(0));
        assert_eq!(v.space().total_bpe(), Err(Error::EmptyVector));
    }

    #[test]
    fn capacity() {
        assert!(RrrBitVec::check_capacity(240 * u32::MAX as usize).is_ok());
        assert!(RrrBitVec::check_capacity(240 * u32::MAX as usize + 1).is_err());
    }

    #[test]
    fn small_examples() {
        let v = rrr(&RawBitVector::from_bits([true, false, true, true]));
        assert_eq!(v.rank1(2), Ok(2));
        assert_eq!(v.rank0(1), Ok(1));
        assert_eq!(v.select1(1), Ok(2));
        assert_eq!(v.select0(0), Ok(1));
        assert_eq!(v.select0(1), Err(Error::RankOutOfRange { rank: 1, count: 1 }));

        let ones = rrr(&RawBitVector::ones(4097));
        assert_eq!(ones.rank1(4096), Ok(4097));
        let ones = rrr(&RawBitVector::ones(512));
        assert_eq!(ones.select1(256), Ok(256));
        let zeros = rrr(&RawBitVector::zeros(4095));
        assert_eq!(zeros.select0(4094), Ok(4094));
        assert_eq!(zeros.rank0(4094), Ok(4095));
    }

    #[test]
    fn superblock_boundary_bit() {
        let v = rrr(&RawBitVector::single_bit(241, 239).unwrap());
        assert_eq!(v.rank1(238), Ok(0));
        assert_eq!(v.rank1(239), Ok(1));
        assert_eq!(v.rank1(240), Ok(1));
        for p in 0..241 {
            let v = rrr(&RawBitVector::single_bit(241, p).unwrap());
            assert_eq!(v.select1(0), Ok(p));
        }
    }

    #[test]
    fn invariants_on_random_vectors() {
        for (seed, d, n) in [(1, 0.01, 10_007), (2, 0.5, 24_001), (3, 0.99, 4_097)] {
            let raw = generate(&GeneratorSpec::new(seed, d, n)).unwrap();
            let v = rrr(&raw);
            assert_eq!(v.decompress(), raw);
            let mut ptr = 0u64;
            let mut ones = 0u64;
            for b in 0..v.num_blocks() {
                if b % 16 == 0 {
                    assert_eq!(v.superblocks()[b / 16], Superblock { cum_rank: ones, bit_ptr: ptr });
                }
                let expect = (b * 15..(b * 15 + 15).min(n))
                    .filter(|&i| raw.get_bit(i).unwrap())
                    .count();
                assert_eq!(v.class(b), expect);
                let width = v.block_offset_bits(b);
                if expect == 0 || expect == 15 {
                    assert_eq!(width, 0);
                }
                ptr += width as u64;
                ones += expect as u64;
            }
            assert_eq!(ptr, v.offsets_len());
        }
    }

    #[test]
    fn random_matches_oracle() {
        for (seed, d) in [(1, 0.01), (2, 0.1), (3, 0.5), (4, 0.9), (5, 0.99)] {
            let raw = generate(&GeneratorSpec::new(seed, d, 60_013)).unwrap();
            let oracle = OracleBitVec::new(&raw).answers();
            let v = rrr(&raw);
            for i in 0..v.len() {
                assert_eq!(v.rank1(i).unwrap(), oracle.rank1(i), "d={d} i={i}");
                assert_eq!(v.get(i).unwrap(), oracle.get(i));
            }
            for j in 0..v.count_ones() {
                let p = v.select1(j).unwrap();
                assert_eq!(p, oracle.select1(j), "d={d} j={j}");
                let (lo, hi) = v.select1_window(j).unwrap();
                assert!(lo <= p / 240 && p / 240 <= hi);
            }
            for j in 0..v.count_zeros() {
                assert_eq!(v.select0(j).unwrap(), oracle.select0(j), "d={d} j={j}");
            }
        }
    }

    #[test]
    fn rank_iter_matches_rank() {
        let raw = generate(&GeneratorSpec::new(12, 0.5, 3_001)).unwrap();
        let v = rrr(&raw);
        for start in [0, 14, 15, 239, 240, 3_000] {
            let got: Vec<usize> = v.rank_iter_from(start).collect();
            let want: Vec<usize> = (start..v.len()).map(|i| v.rank1(i).unwrap()).collect();
            assert_eq!(got, want, "start={start}");
        }
    }

    #[test]
    fn space_tracks_model() {
        for (d, table_offsets, table_samples) in [
            (0.01, 0.0393, 0.0013),
            (0.1, 0.3349, 0.0125),
            (0.5, 0.8328, 0.0625),
            (0.9, 0.3349, 0.1125),
            (0.99, 0.0393, 0.1237),
        ] {
            let raw = generate(&GeneratorSpec::new(77, d, 1_000_000)).unwrap();
            let s = rrr(&raw).space();
            let offsets = s.offsets_bpe().unwrap();
            assert!((offsets - expected_offset_bits(d).unwrap() / 15.0).abs() < 0.01);
            assert!((offsets - table_offsets).abs() < 0.01);
            assert!((s.structural_bpe().unwrap() - 0.8002).abs() < 0.002);
            assert!((s.select1_bpe().unwrap() - table_samples).abs() < 0.003);
        }
    }
}
