//! Differential fuzzer: `fuzz [--suite all|exhaustive|boundary|sizes|walk]
//! [--seed U64] [--scale FACTOR] [--json PATH]`. Exits nonzero on any failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use succinct_harness::fuzz::{run_suite, FuzzReport, Suite, DEFAULT_SEED};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    All,
    Exhaustive,
    Boundary,
    Sizes,
    Walk,
}

#[derive(Parser, Debug)]
#[command(name = "fuzz", about = "Check every rank/select structure against the naive oracle")]
struct Args {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Multiplies the random-vector and random-query budget.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Write the reports as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn main() -> Result<ExitCode> {
    let args = Args::parse();
    anyhow::ensure!(args.scale > 0.0, "--scale must be positive");
    let suites: Vec<Suite> = match args.suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Exhaustive => vec![Suite::Exhaustive],
        SuiteArg::Boundary => vec![Suite::Boundary],
        SuiteArg::Sizes => vec![Suite::Sizes],
        SuiteArg::Walk => vec![Suite::Walk],
    };

    let mut reports: Vec<FuzzReport> = Vec::new();
    for suite in suites {
        let start = Instant::now();
        let report = run_suite(suite, args.seed, args.scale);
        println!(
            "{:<11} vectors={:>8} assertions={:>11} failures={} ({:.1}s)",
            report.suite,
            report.vectors,
            report.assertions,
            report.failure_count,
            start.elapsed().as_secs_f64()
        );
        for f in report.failures.iter().take(10) {
            println!("  FAIL {:?} {}: expected {} got {}", f.spec, f.query, f.expected, f.got);
        }
        reports.push(report);
    }

    let total: u64 = reports.iter().map(|r| r.assertions).sum();
    let failed: u64 = reports.iter().map(|r| r.failure_count).sum();
    println!("total assertions={total} failures={failed}");

    if let Some(path) = &args.json {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(file, &reports)?;
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
