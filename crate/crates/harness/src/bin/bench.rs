//! Benchmark harness: `bench [--suite rank-size|rank-density|select|select-density|construct|space|all]
//! [--sizes LIST] [--densities LIST] [--seed U64] [--out CSV_PATH]`.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;
use succinct_harness::bench::{
    directional_checks, pin_current_thread, run_suite, write_csv, BenchConfig, Suite,
    DEFAULT_DENSITIES, DEFAULT_SEED, DEFAULT_SIZES,
};

#[derive(Parser, Debug)]
#[command(name = "bench", about = "Measure rank/select latency, construction time and space")]
struct Args {
    #[arg(long, default_value = "all")]
    suite: Suite,
    /// Comma-separated vector lengths.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Comma-separated densities in [0, 1].
    #[arg(long, value_delimiter = ',')]
    densities: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    warmup_ms: u64,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 100_000)]
    iters: usize,
}

fn main() -> Result<()> {
    let args = Args::parse();
    let sizes = args.sizes.unwrap_or_else(|| DEFAULT_SIZES.to_vec());
    let densities = args.densities.unwrap_or_else(|| DEFAULT_DENSITIES.to_vec());
    let cfg = BenchConfig {
        warmup: std::time::Duration::from_millis(args.warmup_ms),
        reps: args.reps,
        iters: args.iters,
    };
    if !pin_current_thread() {
        eprintln!("note: could not pin the benchmark thread");
    }

    let records = run_suite(args.suite, &sizes, &densities, args.seed, &cfg, &mut |r| {
        let mean = r.mean_ns.map_or(String::from("-"), |m| format!("{m:.2} ns"));
        let pattern = r.pattern.map_or(String::new(), |p| format!("{p:?}").to_lowercase());
        eprintln!(
            "{:<12} {:<8} n={:<9} d={:<5} {:<10} {:>12}  total={:.4} bpe",
            r.structure.name(),
            format!("{:?}", r.op).to_lowercase(),
            r.n,
            r.density,
            pattern,
            mean,
            r.total_bpe.unwrap_or(f64::NAN)
        );
    })?;

    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(file, &records)?;
        }
        None => write_csv(std::io::stdout().lock(), &records)?,
    }
    for (line, ok) in directional_checks(&records) {
        let tag = match ok {
            Some(true) => "holds",
            Some(false) => "does not hold",
            None => "n/a",
        };
        eprintln!("info: {line}: {tag}");
    }
    Ok(())
}
