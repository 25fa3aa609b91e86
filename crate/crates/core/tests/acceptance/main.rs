//! One line per acceptance criterion; exits non-zero if any fails.

mod common;
mod c01_bit_widths;
mod c02_cross_package;
mod c03_precedence;
mod c04_stream_defaults;
mod c05_resolution_matrix;
mod c06_monomorphization;
mod c07_for_expansion;
mod c08_sugaring;
mod c09_tpch_fanout;
mod c10_drc;
mod c11_dot;
mod c12_determinism;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type Check = fn() -> Result<(), String>;

/// Debug builds are slower; budgets are scaled by this factor.
const DEBUG_SLACK: u32 = if cfg!(debug_assertions) { 4 } else { 1 };

fn main() {
    let criteria: [(u32, &str, u64, Check); 12] = [
        (1, "bit-width oracle suite", 1_000, c01_bit_widths::run),
        (2, "cross-package lazy evaluation", 1_000, c02_cross_package::run),
        (3, "precedence fix", 1_000, c03_precedence::run),
        (4, "stream defaults", 1_000, c04_stream_defaults::run),
        (5, "name-resolution conformance matrix", 5_000, c05_resolution_matrix::run),
        (6, "template monomorphization", 5_000, c06_monomorphization::run),
        (7, "for-expansion oracle", 10_000, c07_for_expansion::run),
        (8, "sugaring post-condition", 10_000, c08_sugaring::run),
        (9, "TPC-H fan-out check", 2_000, c09_tpch_fanout::run),
        (10, "DRC discrimination", 1_000, c10_drc::run),
        (11, "DOT conformance", 2_000, c11_dot::run),
        (12, "determinism", 10_000, c12_determinism::run),
    ];
    let mut failed = Vec::new();
    for (n, title, budget_ms, check) in criteria {
        let start = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let took = start.elapsed();
        let budget = Duration::from_millis(budget_ms) * DEBUG_SLACK;
        let r = match r {
            Ok(()) if took > budget => Err(format!("took {took:?}, budget {budget:?}")),
            r => r,
        };
        match &r {
            Ok(()) => println!("criterion {n:>2}: PASS {title} ({} ms)", took.as_millis()),
            Err(e) => {
                println!("criterion {n:>2}: FAIL {title} ({} ms): {e}", took.as_millis());
                failed.push(n);
            }
        }
    }
    println!("acceptance: {} passed, {} failed", 12 - failed.len(), failed.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
