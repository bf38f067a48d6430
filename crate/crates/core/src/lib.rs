//! Rank/select bit vectors.
//!
//! Three static index structures are built over a shared [`RawBitVector`]:
//!
//! | Structure | Rank directory | Select | Raw bits |
//! | --- | --- | --- | --- |
//! | [`BlockBitVec`] | 2048-bit superblocks, 512-bit blocks | global binary search | plain |
//! | [`FastBitVec`] | 4096-bit superblocks, 256-bit blocks | sampled every 256th bit | plain |
//! | [`RrrBitVec`] | 240-bit superblocks of sixteen 15-bit blocks | sampled every 256th bit | class/offset coded |
//!
//! All of them implement [`RankSelect`]. Positions and ranks are 0-based:
//! `rank1(i)` counts set bits in the inclusive prefix `[0, i]` and
//! `select1(j)` returns the position of the `(j+1)`-th set bit.
//!
//! ```
//! use succinct_bitvec::{RawBitVector, FastBitVec, RankSelect};
//!
//! let raw = RawBitVector::from_bits([true, false, true, true]);
//! let bv = FastBitVec::new(raw).unwrap();
//! assert_eq!(bv.rank1(2).unwrap(), 2);
//! assert_eq!(bv.rank0(1).unwrap(), 1);
//! assert_eq!(bv.select1(1).unwrap(), 2);
//! assert_eq!(bv.select0(0).unwrap(), 1);
//! ```

pub mod bits;
pub mod block;
mod error;
pub mod fast;
pub mod oracle;
pub mod rrr;
mod space;

pub use bits::{generate, popcount_word, select_in_word, GeneratorSpec, RawBitVector};
pub use block::BlockBitVec;
pub use error::{Error, Result};
pub use fast::FastBitVec;
pub use oracle::{OracleAnswers, OracleBitVec};
pub use rrr::{RrrBitVec, RrrTables};
pub use space::SpaceReport;

/// Query interface shared by every bit vector in this crate.
pub trait RankSelect {
    /// Number of bits `N`.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Total number of set bits.
    fn count_ones(&self) -> usize;

    fn count_zeros(&self) -> usize {
        self.len() - self.count_ones()
    }

    fn get(&self, i: usize) -> Result<bool>;

    /// Number of set bits in `[0, i]`.
    fn rank1(&self, i: usize) -> Result<usize>;

    /// Number of zero bits in `[0, i]`, i.e. `(i + 1) - rank1(i)`.
    fn rank0(&self, i: usize) -> Result<usize> {
        Ok(i + 1 - self.rank1(i)?)
    }

    /// Position of the `(j+1)`-th set bit.
    fn select1(&self, j: usize) -> Result<usize>;

    /// Position of the `(j+1)`-th zero bit.
    fn select0(&self, j: usize) -> Result<usize>;

    /// Space breakdown of the structure.
    fn space(&self) -> SpaceReport;
}
