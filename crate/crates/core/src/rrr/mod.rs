//! RRR zeroth-order compressed bit vectors.

mod bitvec;
pub mod coding;

pub use bitvec::{RrrBitVec, RrrRankIter, Superblock};
pub use coding::{
    class_probability, expected_candidate_superblocks, expected_offset_bits, RrrTables,
};
