//! Latency, construction and space measurements.
//!
//! Query positions are drawn before any timing starts. Each configuration is
//! warmed up, then timed over several repetitions of a tight loop whose
//! results feed a checksum; the checksum of every repetition must equal that
//! of an untimed rerun over the same queries.

use std::fmt;
use std::hint::black_box;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, ensure, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use succinct_bitvec::{
    generate, BlockBitVec, FastBitVec, GeneratorSpec, RankSelect, RawBitVector, RrrBitVec,
    SpaceReport,
};

use crate::fuzz::derive_seed;

pub const CSV_HEADER: [&str; 14] = [
    "structure",
    "op",
    "n",
    "density",
    "pattern",
    "mean_ns",
    "stddev_ns",
    "reps",
    "raw_bpe",
    "rank_index_bpe",
    "select_index_bpe",
    "offsets_bpe",
    "structural_bpe",
    "total_bpe",
];

pub const DEFAULT_SIZES: [usize; 3] = [100_000, 1_000_000, 10_000_000];
pub const DEFAULT_DENSITIES: [f64; 5] = [0.01, 0.1, 0.5, 0.9, 0.99];
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Structure {
    #[serde(rename = "BlockBitVec")]
    Block,
    #[serde(rename = "FastBitVec")]
    Fast,
    #[serde(rename = "RRRBitVec")]
    Rrr,
}

impl Structure {
    pub const ALL: [Structure; 3] = [Structure::Block, Structure::Fast, Structure::Rrr];

    pub fn name(self) -> &'static str {
        match self {
            Structure::Block => "BlockBitVec",
            Structure::Fast => "FastBitVec",
            Structure::Rrr => "RRRBitVec",
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Rank1,
    Select1,
    Select0,
    Build,
    Space,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    Uniform,
    Sequential,
    /// Consecutive ranks through an incremental cursor.
    Iterator,
}

/// One CSV row. Empty optional fields are not applicable to the row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub structure: Structure,
    pub op: Op,
    pub n: usize,
    pub density: f64,
    pub pattern: Option<Pattern>,
    pub mean_ns: Option<f64>,
    pub stddev_ns: Option<f64>,
    pub reps: Option<usize>,
    pub raw_bpe: Option<f64>,
    pub rank_index_bpe: Option<f64>,
    pub select_index_bpe: Option<f64>,
    pub offsets_bpe: Option<f64>,
    pub structural_bpe: Option<f64>,
    pub total_bpe: Option<f64>,
    #[serde(skip)]
    pub checksum: u64,
}

impl BenchRecord {
    fn new(structure: Structure, op: Op, n: usize, density: f64, space: &SpaceReport) -> Self {
        let bpe = |bits: u64| bits as f64 / n as f64;
        let plain = structure != Structure::Rrr;
        Self {
            structure,
            op,
            n,
            density,
            pattern: None,
            mean_ns: None,
            stddev_ns: None,
            reps: None,
            raw_bpe: plain.then(|| bpe(space.raw_bits)),
            rank_index_bpe: plain.then(|| bpe(space.rank_index_bits)),
            select_index_bpe: Some(bpe(space.select1_bits)),
            offsets_bpe: (!plain).then(|| bpe(space.offsets_bits)),
            structural_bpe: (!plain).then(|| bpe(space.structural_bits)),
            total_bpe: Some(bpe(space.comparable_total_bits())),
            checksum: 0,
        }
    }
}

/// Timing protocol.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub warmup: Duration,
    pub reps: usize,
    /// Queries per repetition.
    pub iters: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            warmup: Duration::from_millis(500),
            reps: 5,
            iters: 100_000,
        }
    }
}

impl BenchConfig {
    fn validate(&self) -> Result<()> {
        ensure!(self.reps >= 5, "usage: at least 5 repetitions required, got {}", self.reps);
        ensure!(self.iters > 0, "usage: iteration count must be positive");
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    RankSize,
    RankDensity,
    Select,
    SelectDensity,
    Construct,
    Space,
    All,
}

impl FromStr for Suite {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rank-size" => Suite::RankSize,
            "rank-density" => Suite::RankDensity,
            "select" => Suite::Select,
            "select-density" => Suite::SelectDensity,
            "construct" => Suite::Construct,
            "space" => Suite::Space,
            "all" => Suite::All,
            other => bail!("usage: unknown bench suite {other:?}"),
        })
    }
}

/// Pins the calling thread to the CPU it is running on.
#[cfg(target_os = "linux")]
pub fn pin_current_thread() -> bool {
    // SAFETY: plain libc calls on a zeroed cpu_set_t owned by this frame.
    unsafe {
        let cpu = libc::sched_getcpu();
        if cpu < 0 {
            return false;
        }
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_SET(cpu as usize, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
    }
}

#[cfg(not(target_os = "linux"))]
pub fn pin_current_thread() -> bool {
    false
}

/// Positional cursor access used by the iterator pattern.
pub trait RankCursor {
    fn rank_iter_sum(&self, start: usize, count: usize) -> u64;
}

impl RankCursor for BlockBitVec {
    fn rank_iter_sum(&self, start: usize, count: usize) -> u64 {
        self.rank_iter_from(start)
            .take(count)
            .fold(0u64, |acc, r| acc.wrapping_add(black_box(r) as u64))
    }
}

impl RankCursor for FastBitVec {
    fn rank_iter_sum(&self, start: usize, count: usize) -> u64 {
        self.rank_iter_from(start)
            .take(count)
            .fold(0u64, |acc, r| acc.wrapping_add(black_box(r) as u64))
    }
}

impl RankCursor for RrrBitVec {
    fn rank_iter_sum(&self, start: usize, count: usize) -> u64 {
        self.rank_iter_from(start)
            .take(count)
            .fold(0u64, |acc, r| acc.wrapping_add(black_box(r) as u64))
    }
}

fn vector_seed(seed: u64, n: usize, density: f64) -> u64 {
    derive_seed(seed, n as u64, (density * 1e6).round() as u64)
}

pub fn bench_vector(n: usize, density: f64, seed: u64) -> Result<RawBitVector> {
    ensure!(n > 0, "usage: vector length must be positive");
    generate(&GeneratorSpec::new(vector_seed(seed, n, density), density, n))
        .map_err(|e| anyhow!("usage: {e}"))
}

/// Query arguments, generated before timing.
fn make_queries(domain: usize, pattern: Pattern, iters: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    match pattern {
        Pattern::Uniform => (0..iters).map(|_| rng.gen_range(0..domain)).collect(),
        Pattern::Sequential | Pattern::Iterator => {
            let start = rng.gen_range(0..domain);
            (0..iters).map(|k| (start + k) % domain).collect()
        }
    }
}

#[inline(never)]
fn query_pass<S: RankSelect>(s: &S, op: Op, queries: &[usize]) -> u64 {
    let mut sink = 0u64;
    match op {
        Op::Rank1 => {
            for &q in queries {
                sink = sink.wrapping_add(s.rank1(black_box(q)).unwrap() as u64);
            }
        }
        Op::Select1 => {
            for &q in queries {
                sink = sink.wrapping_add(s.select1(black_box(q)).unwrap() as u64);
            }
        }
        Op::Select0 => {
            for &q in queries {
                sink = sink.wrapping_add(s.select0(black_box(q)).unwrap() as u64);
            }
        }
        Op::Build | Op::Space => unreachable!("not a query op"),
    }
    sink
}

/// Untimed reference over the same queries, without `black_box`.
fn reference_pass<S: RankSelect + RankCursor>(s: &S, op: Op, pattern: Pattern, queries: &[usize]) -> u64 {
    if pattern == Pattern::Iterator {
        let start = queries[0];
        return (start..start + queries.len())
            .map(|i| s.rank1(i).unwrap() as u64)
            .fold(0u64, u64::wrapping_add);
    }
    queries
        .iter()
        .map(|&q| match op {
            Op::Rank1 => s.rank1(q).unwrap(),
            Op::Select1 => s.select1(q).unwrap(),
            _ => s.select0(q).unwrap(),
        } as u64)
        .fold(0u64, u64::wrapping_add)
}

fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn time_queries<S: RankSelect + RankCursor>(
    s: &S,
    op: Op,
    pattern: Pattern,
    seed: u64,
    cfg: &BenchConfig,
) -> Result<(f64, f64, u64)> {
    let domain = match op {
        Op::Rank1 => s.len(),
        Op::Select1 => s.count_ones(),
        Op::Select0 => s.count_zeros(),
        _ => bail!("usage: {op:?} is not a query operation"),
    };
    ensure!(domain > 0, "usage: empty query domain for {op:?}");
    ensure!(
        pattern != Pattern::Iterator || op == Op::Rank1,
        "usage: the iterator pattern applies to rank1 only"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queries = make_queries(domain, pattern, cfg.iters, &mut rng);
    if pattern == Pattern::Iterator {
        let count = cfg.iters.min(domain);
        let start = rng.gen_range(0..=domain - count);
        queries = (start..start + count).collect();
    }

    let run = |queries: &[usize]| -> u64 {
        if pattern == Pattern::Iterator {
            s.rank_iter_sum(black_box(queries[0]), queries.len())
        } else {
            query_pass(s, op, queries)
        }
    };

    let warm_start = Instant::now();
    while warm_start.elapsed() < cfg.warmup {
        black_box(run(&queries));
    }

    let mut per_query = Vec::with_capacity(cfg.reps);
    let mut sums = Vec::with_capacity(cfg.reps);
    for _ in 0..cfg.reps {
        let t = Instant::now();
        let sum = run(&queries);
        let elapsed = t.elapsed();
        sums.push(black_box(sum));
        per_query.push(elapsed.as_nanos() as f64 / queries.len() as f64);
    }

    let expected = reference_pass(s, op, pattern, &queries);
    if let Some(bad) = sums.iter().find(|&&x| x != expected) {
        bail!("checksum mismatch: timed {bad:#x}, untimed {expected:#x}");
    }
    let (mean, std) = mean_std(&per_query);
    Ok((mean, std, expected))
}

/// Times `op` on a structure built over `raw`.
pub fn run_latency_on(
    raw: &RawBitVector,
    structure: Structure,
    op: Op,
    density: f64,
    pattern: Pattern,
    seed: u64,
    cfg: &BenchConfig,
) -> Result<BenchRecord> {
    cfg.validate()?;
    ensure!(!raw.is_empty(), "usage: vector length must be positive");
    let qseed = derive_seed(seed, 0x9e7, structure as u64);
    let (space, (mean, std, checksum)) = match structure {
        Structure::Block => {
            let s = BlockBitVec::new(raw.clone());
            (s.space(), time_queries(&s, op, pattern, qseed, cfg)?)
        }
        Structure::Fast => {
            let s = FastBitVec::new(raw.clone())?;
            (s.space(), time_queries(&s, op, pattern, qseed, cfg)?)
        }
        Structure::Rrr => {
            let s = RrrBitVec::new(raw)?;
            (s.space(), time_queries(&s, op, pattern, qseed, cfg)?)
        }
    };
    let mut rec = BenchRecord::new(structure, op, raw.len(), density, &space);
    rec.pattern = Some(pattern);
    rec.mean_ns = Some(mean);
    rec.stddev_ns = Some(std);
    rec.reps = Some(cfg.reps);
    rec.checksum = checksum;
    Ok(rec)
}

pub fn run_latency(
    structure: Structure,
    op: Op,
    n: usize,
    density: f64,
    pattern: Pattern,
    seed: u64,
    cfg: &BenchConfig,
) -> Result<BenchRecord> {
    let raw = bench_vector(n, density, seed)?;
    run_latency_on(&raw, structure, op, density, pattern, seed, cfg)
}

fn build(structure: Structure, raw: &RawBitVector) -> Result<(usize, SpaceReport)> {
    Ok(match structure {
        Structure::Block => {
            let s = BlockBitVec::new(raw.clone());
            (s.count_ones(), s.space())
        }
        Structure::Fast => {
            let s = FastBitVec::new(raw.clone())?;
            (s.count_ones(), s.space())
        }
        Structure::Rrr => {
            let s = RrrBitVec::new(raw)?;
            (s.count_ones(), s.space())
        }
    })
}

/// Times index construction. Vector generation is excluded; the copy of the
/// raw words the plain structures take ownership of is included.
pub fn run_construction(
    structure: Structure,
    n: usize,
    density: f64,
    seed: u64,
    cfg: &BenchConfig,
) -> Result<BenchRecord> {
    cfg.validate()?;
    let raw = bench_vector(n, density, seed)?;
    let (ones, space) = build(structure, &raw)?;

    let warm_start = Instant::now();
    let mut warm_builds = 0u32;
    while warm_start.elapsed() < cfg.warmup || warm_builds == 0 {
        black_box(build(structure, black_box(&raw))?);
        warm_builds += 1;
    }
    // Enough builds per repetition to fill ~5 ms.
    let per_build = warm_start.elapsed() / warm_builds;
    let builds = (Duration::from_millis(5).as_nanos() / per_build.as_nanos().max(1))
        .clamp(1, cfg.iters as u128) as usize;

    let mut samples = Vec::with_capacity(cfg.reps);
    for _ in 0..cfg.reps {
        let t = Instant::now();
        for _ in 0..builds {
            let (o, _) = black_box(build(structure, black_box(&raw))?);
            ensure!(o == ones, "checksum mismatch: build counted {o} ones, expected {ones}");
        }
        samples.push(t.elapsed().as_nanos() as f64 / builds as f64);
    }
    let (mean, std) = mean_std(&samples);
    let mut rec = BenchRecord::new(structure, Op::Build, n, density, &space);
    rec.mean_ns = Some(mean);
    rec.stddev_ns = Some(std);
    rec.reps = Some(cfg.reps);
    rec.checksum = ones as u64;
    Ok(rec)
}

/// Exact space breakdown of every structure at each density.
pub fn run_space_sweep(n: usize, densities: &[f64], seed: u64) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    for &d in densities {
        let raw = bench_vector(n, d, seed)?;
        for structure in Structure::ALL {
            let (ones, space) = build(structure, &raw)?;
            let mut rec = BenchRecord::new(structure, Op::Space, n, d, &space);
            rec.checksum = ones as u64;
            out.push(rec);
        }
    }
    Ok(out)
}

/// Runs a suite over the given sizes and densities, calling `progress` with
/// each record as it completes.
pub fn run_suite(
    suite: Suite,
    sizes: &[usize],
    densities: &[f64],
    seed: u64,
    cfg: &BenchConfig,
    progress: &mut dyn FnMut(&BenchRecord),
) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    ensure!(!sizes.is_empty(), "usage: no sizes given");
    ensure!(!densities.is_empty(), "usage: no densities given");
    let mut out = Vec::new();
    let mut push = |rec: BenchRecord, out: &mut Vec<BenchRecord>| {
        progress(&rec);
        out.push(rec);
    };
    let suites: Vec<Suite> = match suite {
        Suite::All => vec![
            Suite::RankSize,
            Suite::RankDensity,
            Suite::Select,
            Suite::SelectDensity,
            Suite::Construct,
            Suite::Space,
        ],
        s => vec![s],
    };
    for s in suites {
        for &n in sizes {
            match s {
                Suite::RankSize => {
                    let raw = bench_vector(n, 0.5, seed)?;
                    for st in Structure::ALL {
                        for p in [Pattern::Uniform, Pattern::Sequential, Pattern::Iterator] {
                            push(run_latency_on(&raw, st, Op::Rank1, 0.5, p, seed, cfg)?, &mut out);
                        }
                    }
                }
                Suite::RankDensity | Suite::SelectDensity => {
                    let op = if s == Suite::RankDensity { Op::Rank1 } else { Op::Select1 };
                    for &d in densities {
                        let raw = bench_vector(n, d, seed)?;
                        for st in Structure::ALL {
                            push(run_latency_on(&raw, st, op, d, Pattern::Uniform, seed, cfg)?, &mut out);
                        }
                    }
                }
                Suite::Select => {
                    let raw = bench_vector(n, 0.5, seed)?;
                    for st in Structure::ALL {
                        for op in [Op::Select1, Op::Select0] {
                            push(run_latency_on(&raw, st, op, 0.5, Pattern::Uniform, seed, cfg)?, &mut out);
                        }
                    }
                }
                Suite::Construct => {
                    for st in Structure::ALL {
                        push(run_construction(st, n, 0.5, seed, cfg)?, &mut out);
                    }
                }
                Suite::Space => {
                    for rec in run_space_sweep(n, densities, seed)? {
                        push(rec, &mut out);
                    }
                }
                Suite::All => unreachable!(),
            }
        }
    }
    Ok(out)
}

pub fn write_csv<W: Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn mean_of(records: &[BenchRecord], f: impl Fn(&BenchRecord) -> bool) -> Option<f64> {
    let xs: Vec<f64> = records.iter().filter(|r| f(r)).filter_map(|r| r.mean_ns).collect();
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Directional comparisons with published latency trends; informational only.
pub fn directional_checks(records: &[BenchRecord]) -> Vec<(String, Option<bool>)> {
    let uniform_rank = |st: Structure| {
        mean_of(records, |r| {
            r.structure == st && r.op == Op::Rank1 && r.pattern == Some(Pattern::Uniform)
        })
    };
    let rrr_rank_at = |d: f64| {
        mean_of(records, |r| {
            r.structure == Structure::Rrr
                && r.op == Op::Rank1
                && r.pattern == Some(Pattern::Uniform)
                && (r.density - d).abs() < 1e-9
        })
    };
    let fast_vs_block = match (uniform_rank(Structure::Fast), uniform_rank(Structure::Block)) {
        (Some(f), Some(b)) => (format!("FastBitVec rank {f:.2} ns <= BlockBitVec rank {b:.2} ns"), Some(f <= b)),
        _ => ("FastBitVec vs BlockBitVec rank: no data".to_string(), None),
    };
    let rrr_density = match (rrr_rank_at(0.01), rrr_rank_at(0.5)) {
        (Some(lo), Some(mid)) => (format!("RRRBitVec rank at 1% {lo:.2} ns <= at 50% {mid:.2} ns"), Some(lo <= mid)),
        _ => ("RRRBitVec rank 1% vs 50%: no data".to_string(), None),
    };
    vec![fast_vs_block, rrr_density]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> BenchConfig {
        BenchConfig {
            warmup: Duration::from_millis(1),
            reps: 5,
            iters: 1_000,
        }
    }

    #[test]
    fn latency_record_is_populated() {
        let rec = run_latency(Structure::Fast, Op::Rank1, 100_000, 0.5, Pattern::Uniform, 1, &quick()).unwrap();
        assert!(rec.mean_ns.unwrap() > 0.0);
        assert!(rec.stddev_ns.unwrap() >= 0.0);
        assert_eq!(rec.reps, Some(5));
        assert!((rec.rank_index_bpe.unwrap() - 0.078125).abs() < 0.001);
        assert_eq!(rec.raw_bpe, Some(1.0));
        assert_eq!(rec.offsets_bpe, None);
    }

    #[test]
    fn zero_length_is_usage_error() {
        let err = run_latency(Structure::Block, Op::Rank1, 0, 0.5, Pattern::Uniform, 1, &quick()).unwrap_err();
        assert!(err.to_string().contains("usage"));
        assert!(run_construction(Structure::Block, 0, 0.5, 1, &quick()).is_err());
    }

    #[test]
    fn invalid_configurations() {
        let few = BenchConfig { reps: 4, ..quick() };
        assert!(run_latency(Structure::Block, Op::Rank1, 1000, 0.5, Pattern::Uniform, 1, &few).is_err());
        // no ones to select
        assert!(run_latency(Structure::Rrr, Op::Select1, 1000, 0.0, Pattern::Uniform, 1, &quick()).is_err());
        assert!(run_latency(Structure::Rrr, Op::Select1, 1000, 0.5, Pattern::Iterator, 1, &quick()).is_err());
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn every_pattern_and_structure_checksums() {
        for st in Structure::ALL {
            for p in [Pattern::Uniform, Pattern::Sequential, Pattern::Iterator] {
                run_latency(st, Op::Rank1, 50_000, 0.3, p, 9, &quick()).unwrap();
            }
            for op in [Op::Select1, Op::Select0] {
                run_latency(st, op, 50_000, 0.3, Pattern::Sequential, 9, &quick()).unwrap();
            }
        }
    }

    #[test]
    fn construction_records() {
        for st in Structure::ALL {
            let rec = run_construction(st, 100_000, 0.5, 3, &quick()).unwrap();
            assert_eq!(rec.op, Op::Build);
            assert!(rec.mean_ns.unwrap() > 0.0);
        }
    }

    #[test]
    fn space_rows_are_deterministic() {
        let a = run_space_sweep(20_000, &[0.1, 0.5], 5).unwrap();
        let b = run_space_sweep(20_000, &[0.1, 0.5], 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
        let mut buf = Vec::new();
        write_csv(&mut buf, &a).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        assert!(text.lines().nth(1).unwrap().starts_with("BlockBitVec,space,20000,0.1,,,,,1.0,"));
    }

    #[test]
    fn empty_csv_still_has_header() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), CSV_HEADER.join(","));
    }

    #[test]
    fn mean_std_of_samples() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(m, 3.0);
        assert!((s - 2.5f64.sqrt()).abs() < 1e-12);
    }
}
