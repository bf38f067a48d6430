//! Reference rank/select by plain bit-by-bit scanning.
//!
//! Nothing here uses popcount or word-level tricks, so a bug in the word
//! primitives cannot show up in both an index and its reference.

use crate::bits::RawBitVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct OracleBitVec {
    bits: Vec<bool>,
}

impl OracleBitVec {
    pub fn new(raw: &RawBitVector) -> Self {
        let bits = (0..raw.len())
            .map(|i| raw.get_bit(i).expect("index below length"))
            .collect();
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.bits.len() {
            return Err(Error::OutOfRange {
                index: i,
                len: self.bits.len(),
            });
        }
        Ok(())
    }

    pub fn o_rank1(&self, i: usize) -> Result<usize> {
        self.check_index(i)?;
        let mut count = 0;
        for &b in &self.bits[..=i] {
            if b {
                count += 1;
            }
        }
        Ok(count)
    }

    pub fn o_rank0(&self, i: usize) -> Result<usize> {
        self.check_index(i)?;
        let mut count = 0;
        for &b in &self.bits[..=i] {
            if !b {
                count += 1;
            }
        }
        Ok(count)
    }

    fn o_select(&self, target: bool, j: usize) -> Result<usize> {
        let mut seen = 0;
        for (i, &b) in self.bits.iter().enumerate() {
            if b == target {
                seen += 1;
                if seen == j + 1 {
                    return Ok(i);
                }
            }
        }
        Err(Error::RankOutOfRange {
            rank: j,
            count: seen,
        })
    }

    pub fn o_select1(&self, j: usize) -> Result<usize> {
        self.o_select(true, j)
    }

    pub fn o_select0(&self, j: usize) -> Result<usize> {
        self.o_select(false, j)
    }

    /// Every rank and select answer, materialized in one scan.
    pub fn answers(&self) -> OracleAnswers {
        let mut rank1 = Vec::with_capacity(self.bits.len());
        let mut ones = Vec::new();
        let mut zeros = Vec::new();
        let mut count = 0;
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                count += 1;
                ones.push(i);
            } else {
                zeros.push(i);
            }
            rank1.push(count);
        }
        OracleAnswers {
            bits: self.bits.clone(),
            rank1,
            ones,
            zeros,
        }
    }
}

/// Precomputed oracle answers for bulk differential checks.
#[derive(Debug, Clone)]
pub struct OracleAnswers {
    bits: Vec<bool>,
    rank1: Vec<usize>,
    ones: Vec<usize>,
    zeros: Vec<usize>,
}

impl OracleAnswers {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.ones.len()
    }

    pub fn count_zeros(&self) -> usize {
        self.zeros.len()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn rank1(&self, i: usize) -> usize {
        self.rank1[i]
    }

    pub fn rank0(&self, i: usize) -> usize {
        i + 1 - self.rank1[i]
    }

    pub fn select1(&self, j: usize) -> usize {
        self.ones[j]
    }

    pub fn select0(&self, j: usize) -> usize {
        self.zeros[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> OracleBitVec {
        OracleBitVec::new(&RawBitVector::from_bits([true, false, true, true]))
    }

    #[test]
    fn examples() {
        let o = small();
        assert_eq!(o.o_rank1(3), Ok(3));
        assert_eq!(o.o_rank0(1), Ok(1));
        assert_eq!(o.o_select1(1), Ok(2));
        assert_eq!(o.o_select0(0), Ok(1));
        assert_eq!(o.o_rank1(4), Err(Error::OutOfRange { index: 4, len: 4 }));
        assert_eq!(o.o_select0(1), Err(Error::RankOutOfRange { rank: 1, count: 1 }));

        let zeros = OracleBitVec::new(&RawBitVector::zeros(10));
        assert_eq!(
            zeros.o_select1(0),
            Err(Error::RankOutOfRange { rank: 0, count: 0 })
        );
    }

    #[test]
    fn self_consistency() {
        let raw = crate::generate(&crate::GeneratorSpec::new(5, 0.3, 500)).unwrap();
        let o = OracleBitVec::new(&raw);
        let a = o.answers();
        for i in 0..o.len() {
            assert_eq!(o.o_rank1(i).unwrap() + o.o_rank0(i).unwrap(), i + 1);
            assert_eq!(a.rank1(i), o.o_rank1(i).unwrap());
            assert_eq!(a.rank0(i), o.o_rank0(i).unwrap());
        }
        for j in 0..a.count_ones() {
            let p = o.o_select1(j).unwrap();
            assert_eq!(p, a.select1(j));
            assert_eq!(o.o_rank1(p).unwrap(), j + 1);
        }
        for j in 0..a.count_zeros() {
            let p = o.o_select0(j).unwrap();
            assert_eq!(p, a.select0(j));
            assert_eq!(o.o_rank0(p).unwrap(), j + 1);
        }
    }
}
