//! Differential fuzzing of all three structures against the oracle.
//!
//! Four suites: every bit pattern of lengths 15 and 16, large random vectors
//! queried around block and superblock boundaries, special lengths at
//! extreme densities, and a single set bit walked across boundary lengths.
//! Each vector is described by a [`VectorSpec`] so any failure can be rebuilt
//! exactly.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use succinct_bitvec::{
    generate, BlockBitVec, FastBitVec, GeneratorSpec, OracleAnswers, OracleBitVec, RankSelect,
    RawBitVector, RrrBitVec,
};

/// Failure records kept per report; the count is always exact.
const MAX_RECORDED_FAILURES: usize = 1000;

pub const DEFAULT_SEED: u64 = 0x5eed_b175;
pub const EXHAUSTIVE_LENGTHS: [usize; 2] = [15, 16];
pub const BOUNDARY_MAX_BITS: usize = 250_000;
pub const BOUNDARY_DENSITIES: [f64; 9] = [0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95, 0.99];
pub const BOUNDARY_UNITS: [usize; 7] = [15, 64, 240, 256, 512, 2048, 4096];
pub const BOUNDARY_SIZES: [usize; 9] = [15, 16, 17, 239, 240, 241, 4095, 4096, 4097];
pub const PRIME_SIZES: [usize; 4] = [4099, 8191, 65_521, 131_071];
pub const EXTREME_DENSITIES: [f64; 5] = [0.0, 1.0, 0.0001, 0.9999, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VectorSpec {
    /// The low `len` bits of `bits`.
    Pattern { len: usize, bits: u64 },
    Random { seed: u64, density: f64, len: usize },
    SingleBit { len: usize, pos: usize },
}

impl VectorSpec {
    pub fn materialize(&self) -> RawBitVector {
        match *self {
            VectorSpec::Pattern { len, bits } => {
                RawBitVector::from_bits((0..len).map(|i| (bits >> i) & 1 == 1))
            }
            VectorSpec::Random { seed, density, len } => {
                generate(&GeneratorSpec::new(seed, density, len)).expect("density in [0, 1]")
            }
            VectorSpec::SingleBit { len, pos } => {
                RawBitVector::single_bit(len, pos).expect("position below length")
            }
        }
    }

    fn seed(&self) -> u64 {
        match *self {
            VectorSpec::Random { seed, .. } => seed,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub seed: u64,
    pub spec: VectorSpec,
    pub query: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub suite: String,
    pub vectors: u64,
    pub assertions: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
}

impl FuzzReport {
    pub fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            ..Self::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn merge(mut self, other: FuzzReport) -> Self {
        self.vectors += other.vectors;
        self.assertions += other.assertions;
        self.failure_count += other.failure_count;
        let room = MAX_RECORDED_FAILURES.saturating_sub(self.failures.len());
        self.failures.extend(other.failures.into_iter().take(room));
        self
    }
}

/// SplitMix64 finalizer over a seed and two stream coordinates.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        .wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// All three structures plus the oracle over one vector.
pub struct Checker {
    spec: VectorSpec,
    oracle: OracleAnswers,
    block: BlockBitVec,
    fast: FastBitVec,
    rrr: RrrBitVec,
    report: FuzzReport,
}

impl Checker {
    pub fn new(suite: &str, spec: VectorSpec) -> Self {
        let raw = spec.materialize();
        let mut report = FuzzReport::new(suite);
        report.vectors = 1;
        Self {
            spec,
            oracle: OracleBitVec::new(&raw).answers(),
            block: BlockBitVec::new(raw.clone()),
            fast: FastBitVec::new(raw.clone()).expect("fuzz vectors are below 2^32 bits"),
            rrr: RrrBitVec::new(&raw).expect("fuzz vectors are within capacity"),
            report,
        }
    }

    pub fn oracle(&self) -> &OracleAnswers {
        &self.oracle
    }

    fn structures(&self) -> [(&'static str, &dyn RankSelect); 3] {
        [
            ("BlockBitVec", &self.block),
            ("FastBitVec", &self.fast),
            ("RRRBitVec", &self.rrr),
        ]
    }

    fn assert_eq<T: PartialEq + std::fmt::Debug>(
        report: &mut FuzzReport,
        spec: VectorSpec,
        query: impl FnOnce() -> String,
        expected: T,
        got: T,
    ) {
        report.assertions += 1;
        if expected != got {
            report.failure_count += 1;
            if report.failures.len() < MAX_RECORDED_FAILURES {
                report.failures.push(Failure {
                    seed: spec.seed(),
                    spec,
                    query: query(),
                    expected: format!("{expected:?}"),
                    got: format!("{got:?}"),
                });
            }
        }
    }

    /// get, rank1 and rank0 at position `i` on every structure.
    pub fn check_position(&mut self, i: usize) {
        let bit = self.oracle.get(i);
        let r1 = self.oracle.rank1(i);
        let r0 = self.oracle.rank0(i);
        let mut report = std::mem::take(&mut self.report);
        for (name, s) in self.structures() {
            Self::assert_eq(&mut report, self.spec, || format!("{name}.get({i})"), Ok(bit), s.get(i));
            Self::assert_eq(&mut report, self.spec, || format!("{name}.rank1({i})"), Ok(r1), s.rank1(i));
            Self::assert_eq(&mut report, self.spec, || format!("{name}.rank0({i})"), Ok(r0), s.rank0(i));
        }
        self.report = report;
    }

    /// select1(j) against the oracle, plus rank1(select1(j)) = j + 1.
    pub fn check_select1(&mut self, j: usize) {
        let want = self.oracle.select1(j);
        let mut report = std::mem::take(&mut self.report);
        for (name, s) in self.structures() {
            let got = s.select1(j);
            Self::assert_eq(&mut report, self.spec, || format!("{name}.select1({j})"), Ok(want), got.clone());
            if let Ok(p) = got {
                Self::assert_eq(
                    &mut report,
                    self.spec,
                    || format!("{name}.rank1(select1({j}))"),
                    Ok(j + 1),
                    s.rank1(p),
                );
            }
        }
        self.report = report;
    }

    pub fn check_select0(&mut self, j: usize) {
        let want = self.oracle.select0(j);
        let mut report = std::mem::take(&mut self.report);
        for (name, s) in self.structures() {
            let got = s.select0(j);
            Self::assert_eq(&mut report, self.spec, || format!("{name}.select0({j})"), Ok(want), got.clone());
            if let Ok(p) = got {
                Self::assert_eq(
                    &mut report,
                    self.spec,
                    || format!("{name}.rank0(select0({j}))"),
                    Ok(j + 1),
                    s.rank0(p),
                );
            }
        }
        self.report = report;
    }

    /// Queries just past each domain must be rejected.
    pub fn check_domains(&mut self) {
        let (n, ones, zeros) = (
            self.oracle.len(),
            self.oracle.count_ones(),
            self.oracle.count_zeros(),
        );
        let mut report = std::mem::take(&mut self.report);
        for (name, s) in self.structures() {
            Self::assert_eq(&mut report, self.spec, || format!("{name}.count_ones()"), ones, s.count_ones());
            Self::assert_eq(&mut report, self.spec, || format!("{name}.rank1({n}) is err"), true, s.rank1(n).is_err());
            Self::assert_eq(&mut report, self.spec, || format!("{name}.select1({ones}) is err"), true, s.select1(ones).is_err());
            Self::assert_eq(&mut report, self.spec, || format!("{name}.select0({zeros}) is err"), true, s.select0(zeros).is_err());
        }
        self.report = report;
    }

    /// Every position and every valid select rank.
    pub fn check_all(&mut self) {
        for i in 0..self.oracle.len() {
            self.check_position(i);
        }
        for j in 0..self.oracle.count_ones() {
            self.check_select1(j);
        }
        for j in 0..self.oracle.count_zeros() {
            self.check_select0(j);
        }
        self.check_domains();
    }

    pub fn finish(self) -> FuzzReport {
        self.report
    }
}

fn merge_all(suite: &str, reports: impl ParallelIterator<Item = FuzzReport>) -> FuzzReport {
    reports.reduce(|| FuzzReport::new(suite), FuzzReport::merge)
}

/// Every bit pattern of each length, fully checked.
pub fn exhaustive_scan(lengths: &[usize]) -> FuzzReport {
    let cases: Vec<VectorSpec> = lengths
        .iter()
        .flat_map(|&len| (0..1u64 << len).map(move |bits| VectorSpec::Pattern { len, bits }))
        .collect();
    merge_all(
        "exhaustive",
        cases.into_par_iter().map(|spec| {
            let mut c = Checker::new("exhaustive", spec);
            c.check_all();
            c.finish()
        }),
    )
}

#[derive(Debug, Clone)]
pub struct BoundaryConfig {
    pub max_bits: usize,
    pub densities: Vec<f64>,
    pub vectors_per_cell: usize,
    pub random_queries: usize,
    pub seed: u64,
}

impl BoundaryConfig {
    pub fn scaled(scale: f64, seed: u64) -> Self {
        Self {
            max_bits: BOUNDARY_MAX_BITS,
            densities: BOUNDARY_DENSITIES.to_vec(),
            vectors_per_cell: ((2.0 * scale).round() as usize).max(1),
            random_queries: ((20_000.0 * scale).round() as usize).max(100),
            seed,
        }
    }
}

/// Values `m * unit + delta` for `delta` in `-2..=2`, clipped to `[0, limit)`.
pub fn boundary_points(limit: usize, units: &[usize]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &unit in units {
        let mut m = 0;
        while m <= limit + 2 {
            for delta in -2i64..=2 {
                let p = m as i64 + delta;
                if p >= 0 && (p as usize) < limit {
                    out.insert(p as usize);
                }
            }
            m += unit;
        }
    }
    out
}

/// Random vectors over the density grid, queried at structural boundaries
/// and at uniformly random points.
pub fn boundary_fuzz(cfg: &BoundaryConfig) -> FuzzReport {
    let mut cases = Vec::new();
    for (di, &density) in cfg.densities.iter().enumerate() {
        for v in 0..cfg.vectors_per_cell {
            let seed = derive_seed(cfg.seed, 2, (di * 1_000_003 + v) as u64);
            let len = if v == 0 {
                cfg.max_bits
            } else {
                ChaCha8Rng::seed_from_u64(seed).gen_range(1..=cfg.max_bits)
            };
            cases.push(VectorSpec::Random { seed, density, len });
        }
    }
    let units: Vec<usize> = BOUNDARY_UNITS.to_vec();
    merge_all(
        "boundary",
        cases.into_par_iter().map(|spec| {
            let mut c = Checker::new("boundary", spec);
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed() ^ 0xA5A5);
            let (n, ones, zeros) = (
                c.oracle().len(),
                c.oracle().count_ones(),
                c.oracle().count_zeros(),
            );
            let mut positions = boundary_points(n, &units);
            let mut ranks1 = boundary_points(ones, &units);
            let mut ranks0 = boundary_points(zeros, &units);
            for _ in 0..cfg.random_queries {
                positions.insert(rng.gen_range(0..n));
                if ones > 0 {
                    ranks1.insert(rng.gen_range(0..ones));
                }
                if zeros > 0 {
                    ranks0.insert(rng.gen_range(0..zeros));
                }
            }
            positions.iter().for_each(|&i| c.check_position(i));
            ranks1.iter().for_each(|&j| c.check_select1(j));
            ranks0.iter().for_each(|&j| c.check_select0(j));
            c.check_domains();
            c.finish()
        }),
    )
}

/// Boundary and prime lengths at extreme densities, fully checked.
pub fn special_sizes(sizes: &[usize], densities: &[f64], seeds_per_cell: usize, seed: u64) -> FuzzReport {
    let mut cases = Vec::new();
    for &len in sizes {
        for (di, &density) in densities.iter().enumerate() {
            let reps = if density == 0.0 || density == 1.0 { 1 } else { seeds_per_cell };
            for r in 0..reps {
                let seed = derive_seed(seed, 3, ((len * 16 + di) * 1024 + r) as u64);
                cases.push(VectorSpec::Random { seed, density, len });
            }
        }
    }
    merge_all(
        "sizes",
        cases.into_par_iter().map(|spec| {
            let mut c = Checker::new("sizes", spec);
            c.check_all();
            c.finish()
        }),
    )
}

/// One set bit at every position of each length.
pub fn single_bit_walk(sizes: &[usize]) -> FuzzReport {
    let cases: Vec<VectorSpec> = sizes
        .iter()
        .flat_map(|&len| (0..len).map(move |pos| VectorSpec::SingleBit { len, pos }))
        .collect();
    merge_all(
        "walk",
        cases.into_par_iter().map(|spec| {
            let VectorSpec::SingleBit { len, pos } = spec else {
                unreachable!()
            };
            let mut c = Checker::new("walk", spec);
            c.check_select1(0);
            c.check_position(pos);
            if pos > 0 {
                c.check_position(pos - 1);
                c.check_select0(pos - 1);
            }
            if pos + 1 < len {
                c.check_position(pos + 1);
                c.check_select0(pos);
            }
            c.check_position(len - 1);
            c.check_domains();
            c.finish()
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Exhaustive,
    Boundary,
    Sizes,
    Walk,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Exhaustive, Suite::Boundary, Suite::Sizes, Suite::Walk];
}

/// Runs one suite at the given scale.
pub fn run_suite(suite: Suite, seed: u64, scale: f64) -> FuzzReport {
    match suite {
        Suite::Exhaustive => exhaustive_scan(&EXHAUSTIVE_LENGTHS),
        Suite::Boundary => boundary_fuzz(&BoundaryConfig::scaled(scale, seed)),
        Suite::Sizes => {
            let sizes: Vec<usize> = BOUNDARY_SIZES.iter().chain(&PRIME_SIZES).copied().collect();
            special_sizes(&sizes, &EXTREME_DENSITIES, (scale.round() as usize).max(1), seed)
        }
        Suite::Walk => single_bit_walk(&BOUNDARY_SIZES),
    }
}
