//! Plain bit arrays and word-level primitives.
//!
//! Bits are stored LSB-first: bit `i` lives in word `i / 64` at in-word
//! offset `i % 64`. Bits of the last word at positions `>= N` are always zero.

use std::io::{Read, Write};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const WORD_BITS: usize = 64;

const MAGIC: &[u8; 4] = b"SBV1";
const FORMAT_VERSION: u32 = 1;

/// Number of set bits in `w`.
#[inline(always)]
pub fn popcount_word(w: u64) -> u32 {
    w.count_ones()
}

/// Position of the `(k+1)`-th set bit of `w`, counting from the least
/// significant bit.
pub fn select_in_word(w: u64, k: u32) -> Result<u32> {
    let ones = popcount_word(w);
    if k >= ones {
        return Err(Error::RankOutOfRange {
            rank: k as usize,
            count: ones as usize,
        });
    }
    Ok(select_in_word_unchecked(w, k))
}

/// Requires `k < w.count_ones()`.
#[inline]
pub(crate) fn select_in_word_unchecked(w: u64, mut k: u32) -> u32 {
    debug_assert!(k < w.count_ones());
    let mut w = w;
    let mut pos = 0;
    let lo = (w as u32).count_ones();
    if k >= lo {
        k -= lo;
        w >>= 32;
        pos += 32;
    }
    let lo = (w as u16).count_ones();
    if k >= lo {
        k -= lo;
        w >>= 16;
        pos += 16;
    }
    let lo = (w as u8).count_ones();
    if k >= lo {
        k -= lo;
        w >>= 8;
        pos += 8;
    }
    for _ in 0..k {
        w &= w - 1;
    }
    pos + w.trailing_zeros()
}

/// Mask with the low `n` bits set, `n <= 64`.
#[inline(always)]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= WORD_BITS {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline(always)]
pub(crate) fn words_for(len_bits: usize) -> usize {
    len_bits.div_ceil(WORD_BITS)
}

/// Immutable bit array over 64-bit words.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RawBitVector {
    words: Vec<u64>,
    len: usize,
}

impl std::fmt::Debug for RawBitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RawBitVector")
            .field("len", &self.len)
            .field("ones", &self.count_ones())
            .finish()
    }
}

impl RawBitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        Self::from_words(vec![u64::MAX; words_for(len)], len)
            .expect("word count matches length")
    }

    /// Builds a vector from `words`, clearing any bits past `len`.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Result<Self> {
        if words.len() != words_for(len) {
            return Err(Error::Domain(format!(
                "{} words cannot hold exactly {} bits",
                words.len(),
                len
            )));
        }
        if let Some(last) = words.last_mut() {
            *last &= low_mask(len - (words_for(len) - 1) * WORD_BITS);
        }
        Ok(Self { words, len })
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for bit in bits {
            if len % WORD_BITS == 0 {
                words.push(0);
            }
            if bit {
                *words.last_mut().unwrap() |= 1 << (len % WORD_BITS);
            }
            len += 1;
        }
        Self { words, len }
    }

    /// Vector of length `len` with only bit `pos` set.
    pub fn single_bit(len: usize, pos: usize) -> Result<Self> {
        if pos >= len {
            return Err(Error::OutOfRange { index: pos, len });
        }
        let mut v = Self::zeros(len);
        v.words[pos / WORD_BITS] |= 1 << (pos % WORD_BITS);
        Ok(v)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|&w| popcount_word(w) as usize).sum()
    }

    pub fn get_bit(&self, i: usize) -> Result<bool> {
        if i >= self.len {
            return Err(Error::OutOfRange {
                index: i,
                len: self.len,
            });
        }
        Ok(self.get_bit_unchecked(i))
    }

    #[inline(always)]
    pub(crate) fn get_bit_unchecked(&self, i: usize) -> bool {
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    /// Reads `width <= 64` bits starting at `pos`; bits past the end read as zero.
    pub(crate) fn read_bits(&self, pos: usize, width: usize) -> u64 {
        debug_assert!(width <= WORD_BITS);
        if width == 0 || pos >= self.len {
            return 0;
        }
        let w = pos / WORD_BITS;
        let off = pos % WORD_BITS;
        let mut v = self.words[w] >> off;
        if off + width > WORD_BITS && w + 1 < self.words.len() {
            v |= self.words[w + 1] << (WORD_BITS - off);
        }
        v & low_mask(width)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get_bit_unchecked(i))
    }

    /// Writes the `SBV1` little-endian encoding.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        out.write_all(&(self.len as u64).to_le_bytes())?;
        for w in &self.words {
            out.write_all(&w.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(16 + 8 * self.words.len());
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_exact(&mut input, &mut magic, "magic")?;
        if &magic != MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let mut b4 = [0u8; 4];
        read_exact(&mut input, &mut b4, "version")?;
        let version = u32::from_le_bytes(b4);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let mut b8 = [0u8; 8];
        read_exact(&mut input, &mut b8, "length")?;
        let len = usize::try_from(u64::from_le_bytes(b8))
            .map_err(|_| Error::Format("length does not fit in usize".into()))?;
        let n_words = words_for(len);
        let mut words = Vec::with_capacity(n_words.min(1 << 20));
        for _ in 0..n_words {
            read_exact(&mut input, &mut b8, "payload")?;
            words.push(u64::from_le_bytes(b8));
        }
        if let Some(&last) = words.last() {
            if last & !low_mask(len - (n_words - 1) * WORD_BITS) != 0 {
                return Err(Error::Format("nonzero padding bits".into()));
            }
        }
        Ok(Self { words, len })
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = bytes;
        let v = Self::read_from(&mut cursor)?;
        if !cursor.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes", cursor.len())));
        }
        Ok(v)
    }
}

fn read_exact<R: Read>(input: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    input
        .read_exact(buf)
        .map_err(|e| Error::Format(format!("truncated stream reading {what}: {e}")))
}

/// Parameters of a reproducible random bit vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub density: f64,
    pub len_bits: usize,
}

impl GeneratorSpec {
    pub fn new(seed: u64, density: f64, len_bits: usize) -> Self {
        Self {
            seed,
            density,
            len_bits,
        }
    }
}

/// Draws every bit independently with probability `spec.density`.
///
/// The stream is ChaCha8 seeded through `seed_from_u64(spec.seed)`. Each bit
/// consumes one 64-bit draw `u` and is set iff `u < floor(density * 2^64)`.
/// Densities 0 and 1 produce constant vectors without drawing.
pub fn generate(spec: &GeneratorSpec) -> Result<RawBitVector> {
    let d = spec.density;
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::Domain(format!("density {d} outside [0, 1]")));
    }
    if d == 0.0 {
        return Ok(RawBitVector::zeros(spec.len_bits));
    }
    if d == 1.0 {
        return Ok(RawBitVector::ones(spec.len_bits));
    }
    // 2^64 as f64; the float-to-int cast saturates.
    let threshold = (d * 18_446_744_073_709_551_616.0) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut words = vec![0u64; words_for(spec.len_bits)];
    for i in 0..spec.len_bits {
        if rng.next_u64() < threshold {
            words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
        }
    }
    RawBitVector::from_words(words, spec.len_bits)
}
