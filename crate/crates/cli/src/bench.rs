//! Benchmark harness: runs a program corpus under the original and the
//! compiled semantics, checks final-configuration equivalence, and reports
//! per-test and aggregate statistics (median-of-repetitions wall times,
//! geomean/median/p90 speedups, wins/ties/losses with a ±1% tie band).

use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, Result};
use prooforge_core::builtins::EvmOp;
use prooforge_core::builtins::{default_gas, evm_config, print_evm_program};
use prooforge_core::executor::{run_concrete, RunResult};
use prooforge_core::semantics::Semantics;
use prooforge_core::term::TermRef;

#[derive(Clone, Debug)]
pub struct TestRecord {
    pub name: String,
    pub steps_original: usize,
    pub steps_compiled: usize,
    pub wall_original_ns: u128,
    pub wall_compiled_ns: u128,
    pub speedup: f64,
    pub delta_steps: f64,
    pub equivalent: bool,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub records: Vec<TestRecord>,
    pub geomean_speedup: f64,
    pub median_speedup: f64,
    pub p90_speedup: f64,
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
    pub equivalence_failures: Vec<String>,
}

/// Median wall time over `reps` runs; the step count and final state must
/// agree across repetitions.
fn timed_runs(
    sem: &Semantics,
    config: &TermRef,
    fuel: usize,
    reps: usize,
) -> Result<(RunResult, u128)> {
    let mut walls = Vec::with_capacity(reps);
    let mut outcome: Option<RunResult> = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let r = run_concrete(sem, config, fuel)?;
        walls.push(start.elapsed().as_nanos());
        if let Some(prev) = &outcome {
            if prev.steps != r.steps || prev.config != r.config {
                bail!("nondeterministic run");
            }
        }
        outcome = Some(r);
    }
    walls.sort_unstable();
    Ok((outcome.expect("at least one rep"), walls[walls.len() / 2]))
}

pub fn run_bench(
    original: &Semantics,
    compiled: &Semantics,
    corpus: &[Vec<EvmOp>],
    reps: usize,
    fuel: usize,
) -> Result<BenchReport> {
    if corpus.is_empty() {
        bail!("empty corpus");
    }
    let mut records = Vec::with_capacity(corpus.len());
    let mut failures = Vec::new();
    for (i, program) in corpus.iter().enumerate() {
        let name = format!("prog-{i:03}");
        let config = evm_config(program, default_gas(program));
        let (orig, wall_o) = timed_runs(original, &config, fuel, reps)?;
        let (comp, wall_c) = timed_runs(compiled, &config, fuel, reps)?;
        let equivalent = orig.config == comp.config;
        if !equivalent {
            failures.push(format!(
                "{name}: final configurations differ\n{}",
                print_evm_program(program)
            ));
        }
        let speedup = wall_o as f64 / wall_c.max(1) as f64;
        let delta = 1.0 - comp.steps as f64 / orig.steps.max(1) as f64;
        records.push(TestRecord {
            name,
            steps_original: orig.steps,
            steps_compiled: comp.steps,
            wall_original_ns: wall_o,
            wall_compiled_ns: wall_c,
            speedup,
            delta_steps: delta,
            equivalent,
        });
    }

    let mut speedups: Vec<f64> = records.iter().map(|r| r.speedup).collect();
    speedups.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = speedups.len();
    let geomean = (speedups.iter().map(|s| s.ln()).sum::<f64>() / n as f64).exp();
    let median = speedups[n / 2];
    let p90 = speedups[(((n as f64) * 0.9).ceil() as usize).clamp(1, n) - 1];
    let mut wins = 0;
    let mut ties = 0;
    let mut losses = 0;
    for s in &speedups {
        if (*s - 1.0).abs() <= 0.01 {
            ties += 1;
        } else if *s > 1.0 {
            wins += 1;
        } else {
            losses += 1;
        }
    }
    Ok(BenchReport {
        records,
        geomean_speedup: geomean,
        median_speedup: median,
        p90_speedup: p90,
        wins,
        ties,
        losses,
        equivalence_failures: failures,
    })
}

/// Line-delimited machine-readable report with fixed field order.
pub fn machine_report(report: &BenchReport) -> String {
    let mut out = String::new();
    for r in &report.records {
        writeln!(
            out,
            "test={} steps_original={} steps_compiled={} wall_original_ns={} wall_compiled_ns={} speedup={:.4} delta_steps={:.4} equivalent={}",
            r.name,
            r.steps_original,
            r.steps_compiled,
            r.wall_original_ns,
            r.wall_compiled_ns,
            r.speedup,
            r.delta_steps,
            r.equivalent
        )
        .unwrap();
    }
    writeln!(
        out,
        "aggregate tests={} geomean_speedup={:.4} median_speedup={:.4} p90_speedup={:.4} wins={} ties={} losses={} equivalence_failures={}",
        report.records.len(),
        report.geomean_speedup,
        report.median_speedup,
        report.p90_speedup,
        report.wins,
        report.ties,
        report.losses,
        report.equivalence_failures.len()
    )
    .unwrap();
    out
}

pub fn human_report(report: &BenchReport) -> String {
    let total_o: usize = report.records.iter().map(|r| r.steps_original).sum();
    let total_c: usize = report.records.iter().map(|r| r.steps_compiled).sum();
    let mean_delta: f64 =
        report.records.iter().map(|r| r.delta_steps).sum::<f64>() / report.records.len() as f64;
    let mut out = String::new();
    writeln!(out, "tests:            {}", report.records.len()).unwrap();
    writeln!(
        out,
        "total steps:      {total_o} original, {total_c} compiled"
    )
    .unwrap();
    writeln!(out, "mean delta-steps: {mean_delta:.4}").unwrap();
    writeln!(
        out,
        "speedup:          geomean {:.3}  median {:.3}  p90 {:.3}",
        report.geomean_speedup, report.median_speedup, report.p90_speedup
    )
    .unwrap();
    writeln!(
        out,
        "wins/ties/losses: {}/{}/{} (tie band ±1%)",
        report.wins, report.ties, report.losses
    )
    .unwrap();
    if report.equivalence_failures.is_empty() {
        writeln!(out, "equivalence:      all final configurations identical").unwrap();
    } else {
        writeln!(
            out,
            "equivalence:      {} FAILURES",
            report.equivalence_failures.len()
        )
        .unwrap();
        for f in &report.equivalence_failures {
            writeln!(out, "  {f}").unwrap();
        }
    }
    out
}
