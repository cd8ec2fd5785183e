//! Command-line driver: construct reachability proofs over a semantics,
//! compile them into consolidated rules, run programs, validate proof
//! files, and benchmark original vs compiled semantics.

mod bench;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use prooforge_core::aprp::{check_graph, construct_aprp, ProofConfig};
use prooforge_core::builtins::{default_gas, evm_config, gen_programs, parse_evm_program};
use prooforge_core::compiler::{emit_rules, normalize};
use prooforge_core::executor::{run_concrete_with, RunEnd};
use prooforge_core::parse::{parse_config, parse_semantics, parse_spec};
use prooforge_core::print::{print_cells, print_semantics, print_term};
use prooforge_core::semantics::{integrate, Semantics};
use prooforge_core::term::Term;
use prooforge_core::{dot, proof_json};

#[derive(Parser)]
#[command(
    name = "prooforge",
    version,
    about = "Compile term-rewriting semantics by proving"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct an all-path reachability proof for a specification.
    Prove {
        /// Semantics file (.sem) or builtin name (mini-evm, loop-lang).
        semantics: String,
        /// Specification file (.spec).
        spec: PathBuf,
        /// Maximum rewrites per symbolic execution call.
        #[arg(long, default_value_t = 1)]
        max_depth: usize,
        /// Worklist iteration bound.
        #[arg(long, default_value_t = 1000)]
        max_iterations: usize,
        /// Exhaustive subsumption checking against ancestors.
        #[arg(long)]
        precise: bool,
        /// Write a DOT rendering of the proof graph.
        #[arg(long)]
        emit_dot: Option<PathBuf>,
        /// Output proof file (defaults to <spec>.proof.json).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Compile proofs into consolidated rules integrated at high priority.
    Compile {
        /// Proof files produced by `prove`.
        #[arg(required = true)]
        proofs: Vec<PathBuf>,
        /// Semantics the proofs were built against.
        #[arg(short, long)]
        semantics: String,
        /// Output semantics file.
        #[arg(short, long)]
        out: PathBuf,
        /// Transformation pass budget.
        #[arg(long, default_value_t = 50)]
        budget: usize,
    },
    /// Run a program concretely and print the final configuration.
    Run {
        /// Semantics file (.sem) or builtin name.
        semantics: String,
        /// Program: .evm opcode listing, .cfg configuration, or .spec
        /// (whose ground initial state is used).
        program: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        fuel: usize,
        /// Print one line per applied rule.
        #[arg(long)]
        trace: bool,
    },
    /// Validate a proof file against the graph invariants.
    Check { semantics: String, proof: PathBuf },
    /// Benchmark original vs compiled semantics on a generated corpus.
    Bench {
        original: String,
        compiled: String,
        /// Number of generated programs (seed from --seed or PROOFORGE_SEED).
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// Write the machine-readable report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_semantics(name: &str) -> Result<Semantics> {
    if name == "mini-evm" || name == "loop-lang" {
        return Ok(prooforge_core::builtins::builtin(name)?);
    }
    let text = std::fs::read_to_string(name).with_context(|| format!("reading {name}"))?;
    Ok(parse_semantics(&text)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Prove {
            semantics,
            spec,
            max_depth,
            max_iterations,
            precise,
            emit_dot,
            out,
        } => {
            let sem = load_semantics(&semantics)?;
            let spec_text = std::fs::read_to_string(&spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            let spec = parse_spec(&spec_text, &sem)?;
            let cfg = ProofConfig::new(max_depth, max_iterations, precise, &spec.options);
            let graph = construct_aprp(&sem, &spec, &cfg)?;
            let out = out.unwrap_or_else(|| PathBuf::from(format!("{}.proof.json", spec.name)));
            std::fs::write(&out, proof_json::to_json(&sem, &graph))
                .with_context(|| format!("writing {}", out.display()))?;
            if let Some(path) = emit_dot {
                std::fs::write(&path, dot::to_dot(&sem, &graph))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let pending = graph.pending().len();
            println!(
                "proof `{}`: {} vertices, {} step edges, {} cover edges, {} branch edges -> {}",
                spec.name,
                graph.vertices.len(),
                graph.step_edges.len(),
                graph.cover_edges.len(),
                graph.branch_edges.len(),
                out.display()
            );
            if graph.is_complete() {
                println!("proof complete");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("proof partial: {pending} pending vertices at the iteration bound");
                Ok(ExitCode::from(2))
            }
        }
        Command::Compile {
            proofs,
            semantics,
            out,
            budget,
        } => {
            let sem = load_semantics(&semantics)?;
            let mut all_rules = Vec::new();
            for path in &proofs {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let graph = proof_json::from_json(&text, &sem)?;
                let violations = check_graph(&sem, &graph);
                if !violations.is_empty() {
                    for v in &violations {
                        eprintln!("{}: {v}", path.display());
                    }
                    bail!("proof {} fails validation", path.display());
                }
                let (normalized, report) = normalize(&graph, budget)?;
                if !report.reached_fixpoint {
                    eprintln!(
                        "warning: {}: transformation budget exhausted after {} passes",
                        path.display(),
                        report.passes
                    );
                }
                let (rules, skipped) = emit_rules(&normalized, &sem)?;
                for s in skipped {
                    eprintln!("warning: {}: {s}", path.display());
                }
                println!(
                    "{}: {} compiled rules ({} rewrites consolidated)",
                    path.display(),
                    rules.len(),
                    rules.iter().map(|r| r.consolidated).sum::<usize>()
                );
                all_rules.extend(rules.into_iter().map(|r| r.rule));
            }
            let merged = integrate(&sem, &all_rules)?;
            std::fs::write(&out, print_semantics(&merged))
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} ({} rules)", out.display(), merged.rules.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            semantics,
            program,
            fuel,
            trace,
        } => {
            let sem = load_semantics(&semantics)?;
            let config = load_program(&sem, &program)?;
            let k_label = sem.sig.k_label();
            let result = run_concrete_with(&sem, &config, fuel, |step, rule, cfg| {
                if trace {
                    let head = cfg
                        .as_cells()
                        .and_then(|bag| bag.get(&k_label))
                        .map(|body| match &**body {
                            Term::App(a) if a.ctor.as_str() == prooforge_core::semantics::KSEQ => {
                                print_term(&sem.sig, &a.args[0])
                            }
                            _ => print_term(&sem.sig, body),
                        })
                        .unwrap_or_default();
                    println!("step {step}: {rule} | k: {head}");
                }
            })?;
            println!("{}", print_cells(&sem.sig, &result.config));
            println!("steps: {}", result.steps);
            match result.end {
                RunEnd::Stuck => Ok(ExitCode::SUCCESS),
                RunEnd::FuelExhausted => {
                    eprintln!("fuel exhausted after {} steps", result.steps);
                    Ok(ExitCode::from(3))
                }
            }
        }
        Command::Check { semantics, proof } => {
            let sem = load_semantics(&semantics)?;
            let text = std::fs::read_to_string(&proof)
                .with_context(|| format!("reading {}", proof.display()))?;
            let graph = proof_json::from_json(&text, &sem)?;
            let violations = check_graph(&sem, &graph);
            if violations.is_empty() {
                println!(
                    "ok: {} vertices, {} step edges, {} cover edges, {} branch edges",
                    graph.vertices.len(),
                    graph.step_edges.len(),
                    graph.cover_edges.len(),
                    graph.branch_edges.len()
                );
                Ok(ExitCode::SUCCESS)
            } else {
                for v in &violations {
                    eprintln!("violation: {v}");
                }
                bail!("{} violations", violations.len());
            }
        }
        Command::Bench {
            original,
            compiled,
            count,
            seed,
            reps,
            fuel,
            out,
        } => {
            let orig = load_semantics(&original)?;
            let comp = load_semantics(&compiled)?;
            let seed = match std::env::var("PROOFORGE_SEED") {
                Ok(v) => v.parse().map_err(|_| anyhow!("bad PROOFORGE_SEED `{v}`"))?,
                Err(_) => seed,
            };
            let corpus = gen_programs(seed, count);
            let report = bench::run_bench(&orig, &comp, &corpus, reps, fuel)?;
            print!("{}", bench::human_report(&report));
            if let Some(path) = out {
                std::fs::write(&path, bench::machine_report(&report))
                    .with_context(|| format!("writing {}", path.display()))?;
                println!("report written to {}", path.display());
            }
            if report.equivalence_failures.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                bail!(
                    "equivalence violations: {}",
                    report.equivalence_failures.len()
                );
            }
        }
    }
}

/// Load an initial configuration from a program file. `.evm` files are
/// opcode listings, `.cfg` files are configuration terms, `.spec` files
/// contribute their (ground) initial state.
fn load_program(sem: &Semantics, path: &Path) -> Result<prooforge_core::term::TermRef> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("evm") => {
            let program = parse_evm_program(&text)?;
            Ok(evm_config(&program, default_gas(&program)))
        }
        Some("spec") => {
            let spec = parse_spec(&text, sem)?;
            if !spec.init.is_ground() {
                bail!("spec initial state is symbolic; cannot run it concretely");
            }
            // Sanity: a runnable initial state mentions no variables at all.
            let vars: BTreeSet<_> = prooforge_core::term::free_vars(&spec.init.config);
            debug_assert!(vars.is_empty());
            Ok(spec.init.config)
        }
        Some("cfg") => Ok(parse_config(&text, sem)?),
        _ => bail!("unknown program format (expected .evm, .cfg or .spec)"),
    }
}
