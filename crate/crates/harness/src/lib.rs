//! Correctness fuzzer and benchmark harness for `succinct-bitvec`.

pub mod bench;
pub mod fuzz;
