use crate::error::{Error, Result};

/// Component sizes of a structure, in bits.
///
/// `bpe` figures divide by the vector length `N`. The comparable total
/// leaves out the 0-bit select directory, which published space tables for
/// these layouts do not count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpaceReport {
    pub len_bits: usize,
    /// Uncompressed payload (`N` for plain vectors, 0 for RRR).
    pub raw_bits: u64,
    /// Superblock and block rank counters of the plain vectors.
    pub rank_index_bits: u64,
    pub select1_bits: u64,
    pub select0_bits: u64,
    /// RRR offset bitstream.
    pub offsets_bits: u64,
    /// RRR class array plus superblock directory.
    pub structural_bits: u64,
}

impl SpaceReport {
    fn per_element(&self, bits: u64) -> Result<f64> {
        if self.len_bits == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(bits as f64 / self.len_bits as f64)
    }

    pub fn raw_bpe(&self) -> Result<f64> {
        self.per_element(self.raw_bits)
    }

    pub fn rank_index_bpe(&self) -> Result<f64> {
        self.per_element(self.rank_index_bits)
    }

    pub fn select1_bpe(&self) -> Result<f64> {
        self.per_element(self.select1_bits)
    }

    pub fn select0_bpe(&self) -> Result<f64> {
        self.per_element(self.select0_bits)
    }

    pub fn offsets_bpe(&self) -> Result<f64> {
        self.per_element(self.offsets_bits)
    }

    pub fn structural_bpe(&self) -> Result<f64> {
        self.per_element(self.structural_bits)
    }

    pub fn comparable_total_bits(&self) -> u64 {
        self.raw_bits
            + self.rank_index_bits
            + self.select1_bits
            + self.offsets_bits
            + self.structural_bits
    }

    pub fn total_bits(&self) -> u64 {
        self.comparable_total_bits() + self.select0_bits
    }

    /// Total without the 0-bit select directory.
    pub fn comparable_total_bpe(&self) -> Result<f64> {
        self.per_element(self.comparable_total_bits())
    }

    /// Total including every directory.
    pub fn total_bpe(&self) -> Result<f64> {
        self.per_element(self.total_bits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_an_error() {
        let r = SpaceReport::default();
        assert_eq!(r.total_bpe(), Err(Error::EmptyVector));
        assert_eq!(r.raw_bpe(), Err(Error::EmptyVector));
    }

    #[test]
    fn totals() {
        let r = SpaceReport {
            len_bits: 100,
            raw_bits: 100,
            rank_index_bits: 10,
            select1_bits: 5,
            select0_bits: 5,
            offsets_bits: 0,
            structural_bits: 0,
        };
        assert_eq!(r.comparable_total_bits(), 115);
        assert_eq!(r.total_bits(), 120);
        assert!((r.total_bpe().unwrap() - 1.2).abs() < 1e-12);
    }
}
