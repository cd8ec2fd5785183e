//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values once its assertions hold. Run with
//! `cargo test -p prooforge-cli --test acceptance -- --nocapture`.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use prooforge_core::aprp::{check_graph, construct_aprp, AprpGraph, ProofConfig};
use prooforge_core::builtins::{
    builtin, default_gas, evm_config, gen_programs, loop_sum_config, loop_sum_spec, opcode_specs,
};
use prooforge_core::compiler::{
    compress_steps, delta_steps, emit_rules, lift_branch_branch, lift_step_branch, normalize,
    walk_ground,
};
use prooforge_core::constraint::{
    canon_cmp, cmp, csubst_apply, simplify, CmpOp, Constraint, LinAtom,
};
use prooforge_core::executor::{implies, run_concrete, RunEnd};
use prooforge_core::linear::LinExpr;
use prooforge_core::parse::{parse_cterm, parse_semantics, parse_spec};
use prooforge_core::semantics::{integrate, ProgramSpec, Rule, Semantics};
use prooforge_core::solver::{entails, is_sat, EntailResult, SatResult};
use prooforge_core::term::{vars_in_order, Sort, Subst, Term, TermRef};

fn prove_and_compile(sem: &Semantics, spec: &ProgramSpec, n: usize, i: usize) -> Vec<Rule> {
    let cfg = ProofConfig::new(n, i, false, &spec.options);
    let g = construct_aprp(sem, spec, &cfg).expect("proof construction");
    assert!(g.is_complete(), "{}: proof incomplete", spec.name);
    let violations = check_graph(sem, &g);
    assert!(violations.is_empty(), "{}: {violations:?}", spec.name);
    let (normalized, _) = normalize(&g, 50).expect("normalize");
    let violations = check_graph(sem, &normalized);
    assert!(
        violations.is_empty(),
        "{}: post-normalize {violations:?}",
        spec.name
    );
    let (rules, skipped) = emit_rules(&normalized, sem).expect("emit");
    assert!(
        skipped.is_empty(),
        "{}: skipped edges {skipped:?}",
        spec.name
    );
    rules.into_iter().map(|r| r.rule).collect()
}

/// Ground instance of a specification's initial state: integers become 7,
/// data sorts their empty constructors, computations the empty sequence.
fn ground_instance(sem: &Semantics, spec: &ProgramSpec) -> TermRef {
    let mut subst = Subst::new();
    for v in vars_in_order(&spec.init.config) {
        let image = match v.sort.name() {
            "Int" => Term::int(7),
            "WordStack" => Term::app("nil", Sort::new("WordStack"), vec![]),
            "K" => Term::app("#dotk", Sort::k(), vec![]),
            "Code" => Term::app("cnil", Sort::new("Code"), vec![]),
            "Dests" => Term::app("dnil", Sort::new("Dests"), vec![]),
            other => panic!("no ground sample for sort {other}"),
        };
        subst.insert(v.name, image);
    }
    let config = prooforge_core::term::apply_subst(&subst, &spec.init.config);
    assert!(config.is_ground());
    sem.sig
        .check_config(&config)
        .expect("instance is a valid configuration");
    config
}

#[test]
fn criterion_1_add_consolidation() {
    let started = Instant::now();
    let sem = builtin("mini-evm").unwrap();
    let specs = opcode_specs(&sem).unwrap();
    let add = specs.iter().find(|s| s.name.as_str() == "add").unwrap();
    let rules = prove_and_compile(&sem, add, 1, 100);
    assert_eq!(rules.len(), 1);
    let merged = integrate(&sem, &rules).unwrap();

    let instance = ground_instance(&sem, add);
    let original = run_concrete(&sem, &instance, 100).unwrap();
    let compiled = run_concrete(&merged, &instance, 100).unwrap();
    assert_eq!(original.end, RunEnd::Stuck);
    assert_eq!(
        original.steps, 5,
        "one ADD is exactly five modular rewrites"
    );
    assert_eq!(compiled.steps, 1, "the compiled rule fires once");
    assert_eq!(original.config, compiled.config);
    let delta = delta_steps(original.steps, compiled.steps).unwrap();
    assert_eq!(delta, Rational64::new(4, 5), "delta-steps is exactly 0.8");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 1 PASS: ADD runs in 5 rewrites originally, 1 compiled; delta_steps = 0.8 exactly ({}ms)",
        elapsed.as_millis()
    );
}

#[test]
fn criterion_2_opcode_suite_step_reduction() {
    let started = Instant::now();
    let sem = builtin("mini-evm").unwrap();
    let specs = opcode_specs(&sem).unwrap();
    assert!(specs.len() >= 10, "at least ten bundled opcode specs");

    let mut all_rules = Vec::new();
    for spec in &specs {
        all_rules.extend(prove_and_compile(&sem, spec, 1, 200));
    }
    let merged = integrate(&sem, &all_rules).unwrap();

    let mut sum = Rational64::new(0, 1);
    let mut per_opcode = Vec::new();
    for spec in &specs {
        let instance = ground_instance(&sem, spec);
        let original = run_concrete(&sem, &instance, 100).unwrap();
        let compiled = run_concrete(&merged, &instance, 100).unwrap();
        assert_eq!(
            original.end,
            RunEnd::Stuck,
            "{}: happy path must settle",
            spec.name
        );
        assert_eq!(
            original.config, compiled.config,
            "{}: configs differ",
            spec.name
        );
        assert!(
            original.steps >= 4,
            "{}: happy path below four modular rewrites",
            spec.name
        );
        let delta = delta_steps(original.steps, compiled.steps).unwrap();
        per_opcode.push(format!(
            "{}={}/{}",
            spec.name, compiled.steps, original.steps
        ));
        sum += delta;
    }
    let mean = sum / Rational64::new(specs.len() as i64, 1);
    assert!(
        mean >= Rational64::new(3, 4),
        "mean delta-steps {mean} below 0.75 ({per_opcode:?})"
    );
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 2 PASS: mean delta_steps over {} opcode specs = {:.4} >= 0.75 ({}ms)",
        specs.len(),
        *mean.numer() as f64 / *mean.denom() as f64,
        elapsed.as_millis()
    );
}

#[test]
fn criterion_3_equivalence_corpus() {
    let started = Instant::now();
    let sem = builtin("mini-evm").unwrap();
    let specs = opcode_specs(&sem).unwrap();
    let mut all_rules = Vec::new();
    for spec in &specs {
        all_rules.extend(prove_and_compile(&sem, spec, 1, 200));
    }
    let merged = integrate(&sem, &all_rules).unwrap();

    let corpus = gen_programs(42, 200);
    assert_eq!(corpus.len(), 200);
    let mut losses = 0;
    let mut total_orig = 0usize;
    let mut total_comp = 0usize;
    for (i, program) in corpus.iter().enumerate() {
        let config = evm_config(program, default_gas(program));
        let original = run_concrete(&sem, &config, 10_000).unwrap();
        let compiled = run_concrete(&merged, &config, 10_000).unwrap();
        assert_eq!(original.end, RunEnd::Stuck, "program {i} must settle");
        if original.config != compiled.config {
            losses += 1;
            eprintln!("program {i} diverged");
        }
        total_orig += original.steps;
        total_comp += compiled.steps;
    }
    assert_eq!(losses, 0, "zero losses permitted");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 3 PASS: 200 generated programs, identical final configurations; {} vs {} total rewrites ({}ms)",
        total_orig, total_comp, elapsed.as_millis()
    );
}

#[test]
fn criterion_4_loop_whole_unit_compilation() {
    let started = Instant::now();
    let sem = builtin("loop-lang").unwrap();
    let spec = loop_sum_spec(&sem).unwrap();
    let cfg = ProofConfig::new(1, 1000, false, &spec.options);
    let g = construct_aprp(&sem, &spec, &cfg).unwrap();
    assert!(g.is_complete());
    assert!(
        g.vertices.len() < 50,
        "sameloop abstraction must prevent unrolling: {} vertices",
        g.vertices.len()
    );

    let rules = prove_and_compile(&sem, &spec, 1, 1000);
    let merged = integrate(&sem, &rules).unwrap();
    let start = loop_sum_config(&sem).unwrap();

    let original = run_concrete(&sem, &start, 100_000).unwrap();
    let compiled = run_concrete(&merged, &start, 100_000).unwrap();
    assert_eq!(original.config, compiled.config);
    assert!(original.steps >= 10_000, "original {}", original.steps);
    assert!(compiled.steps <= 2_100, "compiled {}", compiled.steps);
    let delta = delta_steps(original.steps, compiled.steps).unwrap();
    assert!(delta >= Rational64::new(4, 5), "delta {delta}");

    // Median-of-5 wall times.
    let median = |sem: &Semantics| -> u128 {
        let mut walls = Vec::new();
        for _ in 0..5 {
            let t = Instant::now();
            let r = run_concrete(sem, &start, 100_000).unwrap();
            assert_eq!(r.end, RunEnd::Stuck);
            walls.push(t.elapsed().as_nanos());
        }
        walls.sort_unstable();
        walls[2]
    };
    let wall_original = median(&sem);
    let wall_compiled = median(&merged);
    let speedup = wall_original as f64 / wall_compiled as f64;
    assert!(speedup >= 3.0, "wall speedup {speedup:.2} below 3.0");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 4 PASS: loop proof {} vertices; {} vs {} rewrites (delta {:.4}); wall speedup {:.2}x ({}ms)",
        g.vertices.len(),
        original.steps,
        compiled.steps,
        *delta.numer() as f64 / *delta.denom() as f64,
        speedup,
        elapsed.as_millis()
    );
}

// ------------------------------------------------------------------
// Criterion 5: random valid proof graphs, transformation soundness
// ------------------------------------------------------------------

fn random_machine(rng: &mut ChaCha8Rng) -> (Semantics, ProgramSpec) {
    let states = rng.gen_range(3..=6usize);
    let mut text = String::from("module randmachine\n\n");
    for i in 0..=states {
        text.push_str(&format!("op s{i} : -> KItem\n"));
    }
    text.push_str("\nconfiguration <k> K </k> <a> Int </a>\n\n");
    for i in 0..states {
        if rng.gen_bool(0.45) {
            let c = rng.gen_range(-4..=4i64);
            let j = rng.gen_range(i + 1..=states);
            let k = rng.gen_range(i + 1..=states);
            let d1 = rng.gen_range(-3..=3i64);
            let d2 = rng.gen_range(-3..=3i64);
            text.push_str(&format!(
                "rule b{i}lo: <k> s{i} ~> REST </k> <a> A </a> => <k> s{j} ~> REST </k> <a> A +Int {d1} </a> requires A <Int {c}\n"
            ));
            text.push_str(&format!(
                "rule b{i}hi: <k> s{i} ~> REST </k> <a> A </a> => <k> s{k} ~> REST </k> <a> A +Int {d2} </a> requires A >=Int {c}\n"
            ));
        } else {
            let d = rng.gen_range(-3..=3i64);
            let j = i + 1;
            text.push_str(&format!(
                "rule t{i}: <k> s{i} ~> REST </k> <a> A </a> => <k> s{j} ~> REST </k> <a> A +Int {d} </a>\n"
            ));
        }
    }
    text.push_str(&format!(
        "rule fin: <k> s{states} ~> REST </k> => <k> REST </k>\n"
    ));
    let sem = parse_semantics(&text).expect("generated semantics parses");
    let spec = parse_spec(
        "spec randspec\ninit <k> s0 ~> REST:K </k> <a> A:Int </a>\nfinal <k> REST </k> <a> AF:Int </a>\n",
        &sem,
    )
    .expect("generated spec parses");
    (sem, spec)
}

#[test]
fn criterion_5_transformation_soundness() {
    let started = Instant::now();
    let mut graphs = 0;
    let mut branchy = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (sem, spec) = random_machine(&mut rng);
        let cfg = ProofConfig::new(1, 400, false, &spec.options);
        let g = construct_aprp(&sem, &spec, &cfg).expect("construction");
        assert!(g.is_complete(), "seed {seed}: incomplete");
        let before = check_graph(&sem, &g);
        assert!(before.is_empty(), "seed {seed}: {before:?}");
        if !g.branch_edges.is_empty() {
            branchy += 1;
        }

        let transformed: Vec<(&str, AprpGraph)> = vec![
            ("compress", compress_steps(&g).unwrap().0),
            ("step-branch", lift_step_branch(&g).unwrap().0),
            ("branch-branch", lift_branch_branch(&g).unwrap().0),
            ("normalize", normalize(&g, 50).unwrap().0),
        ];
        for (name, t) in &transformed {
            let after = check_graph(&sem, t);
            assert!(after.is_empty(), "seed {seed} {name}: {after:?}");
        }

        // Sampled ground instances preserve per-path endpoints and total
        // rewrite counts through every transformation.
        for a in [-6i64, -2, 0, 1, 5] {
            let start = prooforge_core::parse::parse_config(
                &format!("<k> s0 ~> .K </k> <a> {a} </a>"),
                &sem,
            )
            .unwrap();
            let reference = walk_ground(&sem, &g, &start, 200).unwrap();
            let direct = run_concrete(&sem, &start, 200).unwrap();
            assert_eq!(
                direct.config, reference.config,
                "seed {seed}: walk vs direct"
            );
            assert_eq!(
                direct.steps, reference.rewrites,
                "seed {seed}: count vs direct"
            );
            for (name, t) in &transformed {
                let w = walk_ground(&sem, t, &start, 200).unwrap();
                assert_eq!(w.config, reference.config, "seed {seed} {name}: endpoint");
                assert_eq!(
                    w.rewrites, reference.rewrites,
                    "seed {seed} {name}: rewrites"
                );
            }
        }
        graphs += 1;
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 5 PASS: {graphs} random proofs ({branchy} with branches) survive all transformations ({}ms)",
        elapsed.as_millis()
    );
}

// ------------------------------------------------------------------
// Criterion 6: solver and implies soundness against brute force
// ------------------------------------------------------------------

/// Compiled form of a constraint for fast enumeration.
enum CC {
    And(Vec<CC>),
    Or(Vec<CC>),
    Le(Vec<i64>, i64),
    EqZ(Vec<i64>, i64),
    NeZ(Vec<i64>, i64),
}

fn compile_cc(c: &Constraint, names: &BTreeMap<String, usize>) -> CC {
    match c {
        Constraint::And(cs) => CC::And(cs.iter().map(|x| compile_cc(x, names)).collect()),
        Constraint::Or(cs) => CC::Or(cs.iter().map(|x| compile_cc(x, names)).collect()),
        Constraint::Pos(prooforge_core::constraint::Atom::Cmp(op, l, r)) => {
            let lin_to = |lin: &LinExpr| -> (Vec<i64>, i64) {
                let mut coeffs = vec![0i64; names.len()];
                for (t, c) in &lin.coeffs {
                    let key = prooforge_core::constraint::term_key(t);
                    let idx = names[&key];
                    coeffs[idx] = i64::try_from(c.clone()).unwrap();
                }
                (coeffs, i64::try_from(lin.constant.clone()).unwrap())
            };
            match canon_cmp(*op, l, r) {
                LinAtom::Le(lin) => {
                    let (c, k) = lin_to(&lin);
                    CC::Le(c, k)
                }
                LinAtom::EqZ(lin) => {
                    let (c, k) = lin_to(&lin);
                    CC::EqZ(c, k)
                }
                LinAtom::NeZ(lin) => {
                    let (c, k) = lin_to(&lin);
                    CC::NeZ(c, k)
                }
            }
        }
        other => panic!("unexpected constraint shape {other:?}"),
    }
}

fn eval_cc(cc: &CC, vals: &[i64]) -> bool {
    match cc {
        CC::And(cs) => cs.iter().all(|c| eval_cc(c, vals)),
        CC::Or(cs) => cs.iter().any(|c| eval_cc(c, vals)),
        CC::Le(coeffs, k) => coeffs.iter().zip(vals).map(|(c, v)| c * v).sum::<i64>() + k <= 0,
        CC::EqZ(coeffs, k) => coeffs.iter().zip(vals).map(|(c, v)| c * v).sum::<i64>() + k == 0,
        CC::NeZ(coeffs, k) => coeffs.iter().zip(vals).map(|(c, v)| c * v).sum::<i64>() + k != 0,
    }
}

fn random_constraint(rng: &mut ChaCha8Rng, nvars: usize, depth: usize) -> Constraint {
    if depth == 0 || rng.gen_bool(0.5) {
        let lin = |rng: &mut ChaCha8Rng| {
            let mut t = Term::int(rng.gen_range(-8..=8i64));
            for i in 0..nvars {
                if rng.gen_bool(0.5) {
                    let c = rng.gen_range(-3..=3i64);
                    if c != 0 {
                        let v = Term::var(format!("X{i}").as_str(), Sort::int());
                        let scaled = if c == 1 {
                            v
                        } else {
                            Term::app("*Int", Sort::int(), vec![Term::int(c), v])
                        };
                        t = Term::app("+Int", Sort::int(), vec![t, scaled]);
                    }
                }
            }
            t
        };
        let op = match rng.gen_range(0..6) {
            0 => CmpOp::Eq,
            1 => CmpOp::Ne,
            2 => CmpOp::Lt,
            3 => CmpOp::Le,
            4 => CmpOp::Gt,
            _ => CmpOp::Ge,
        };
        let l = lin(rng);
        let r = lin(rng);
        return cmp(op, l, r);
    }
    let a = random_constraint(rng, nvars, depth - 1);
    let b = random_constraint(rng, nvars, depth - 1);
    match rng.gen_range(0..3) {
        0 => Constraint::And(vec![a, b]),
        1 => Constraint::Or(vec![a, b]),
        _ => a.negated(),
    }
}

#[test]
fn criterion_6_solver_and_implies_soundness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let mut decided = 0usize;
    let mut unknown = 0usize;

    for pair in 0..1000usize {
        // Mostly 2-3 variables, some 4, so exhaustive enumeration stays
        // affordable.
        let nvars = match pair % 10 {
            0 => 4,
            1..=4 => 3,
            _ => 2,
        };
        let c1 = random_constraint(&mut rng, nvars, 2);
        let c2 = random_constraint(&mut rng, nvars, 2);
        let names: BTreeMap<String, usize> = (0..nvars).map(|i| (format!("X{i}:Int"), i)).collect();
        let cc1 = compile_cc(&c1, &names);
        let cc2 = compile_cc(&c2, &names);

        let mut bounded = vec![c1.clone()];
        for i in 0..nvars {
            let v = Term::var(format!("X{i}").as_str(), Sort::int());
            bounded.push(cmp(CmpOp::Ge, v.clone(), Term::int(-8)));
            bounded.push(cmp(CmpOp::Le, v, Term::int(8)));
        }
        let bounded = simplify(Constraint::And(bounded));

        // Brute force over the box.
        let mut vals = vec![-8i64; nvars];
        let mut brute_entails = true;
        let mut brute_sat_c1 = false;
        'outer: loop {
            if eval_cc(&cc1, &vals) {
                brute_sat_c1 = true;
                if !eval_cc(&cc2, &vals) {
                    brute_entails = false;
                }
            }
            let mut i = 0;
            loop {
                if i == nvars {
                    break 'outer;
                }
                vals[i] += 1;
                if vals[i] <= 8 {
                    break;
                }
                vals[i] = -8;
                i += 1;
            }
        }

        match entails(&bounded, &c2) {
            EntailResult::Yes => {
                decided += 1;
                assert!(
                    brute_entails,
                    "pair {pair}: solver Yes but brute force finds a counterexample"
                );
            }
            EntailResult::No(w) => {
                decided += 1;
                // The counterexample satisfies c1 and falsifies c2.
                let vals: Vec<i64> = (0..nvars)
                    .map(|i| {
                        w.ints
                            .get(&format!("X{i}:Int"))
                            .map(|b| i64::try_from(b.clone()).unwrap())
                            .unwrap_or(0)
                    })
                    .collect();
                assert!(
                    eval_cc(&cc1, &vals),
                    "pair {pair}: counterexample violates c1"
                );
                assert!(
                    !eval_cc(&cc2, &vals),
                    "pair {pair}: counterexample satisfies c2"
                );
            }
            EntailResult::Unknown => unknown += 1,
        }

        match is_sat(&bounded) {
            SatResult::Sat(w) => {
                let vals: Vec<i64> = (0..nvars)
                    .map(|i| {
                        w.ints
                            .get(&format!("X{i}:Int"))
                            .map(|b| i64::try_from(b.clone()).unwrap())
                            .unwrap_or(0)
                    })
                    .collect();
                assert!(eval_cc(&cc1, &vals), "pair {pair}: sat witness violates c1");
                assert!(
                    brute_sat_c1,
                    "pair {pair}: solver sat but brute force disagrees"
                );
            }
            SatResult::Unsat => {
                assert!(
                    !brute_sat_c1,
                    "pair {pair}: solver unsat but a model exists"
                );
            }
            SatResult::Unknown => {}
        }
    }
    assert!(decided >= 800, "too few decided instances: {decided}");

    // Every implies success passes the application round-trip.
    let sem = builtin("mini-evm").unwrap();
    let general = parse_cterm(
        "<k> #next(ADD) ~> REST </k> <wordStack> W0:Int : WS:WordStack </wordStack> <pc> PC:Int </pc> <gas> G:Int </gas> <code> C:Code </code> <jumpdests> D:Dests </jumpdests>",
        "G >=Int 0",
        &sem,
    )
    .unwrap();
    let mut successes = 0;
    for g in [0i64, 3, 17, 100] {
        for w in [0i64, 5, 9] {
            let specific = parse_cterm(
                &format!(
                    "<k> #next(ADD) ~> .K </k> <wordStack> {w} : nil </wordStack> <pc> 0 </pc> <gas> {g} </gas> <code> cnil </code> <jumpdests> dnil </jumpdests>"
                ),
                "true",
                &sem,
            )
            .unwrap();
            if let Some(alpha) = implies(&specific, &general) {
                assert_eq!(csubst_apply(&alpha, &general), specific);
                successes += 1;
            }
        }
    }
    assert_eq!(successes, 12, "entailment G>=0 holds for all samples");

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 6 PASS: 1000 entailment pairs agree with enumeration ({decided} decided, {unknown} unknown); implies round-trips hold ({}ms)",
        elapsed.as_millis()
    );
}

// ------------------------------------------------------------------
// Criterion 7: iteration bounds and partial-proof compilation
// ------------------------------------------------------------------

#[test]
fn criterion_7_iteration_bounds_and_partial_proofs() {
    let started = Instant::now();

    // Every bundled spec completes within the bound and logs at most one
    // record per iteration.
    let evm = builtin("mini-evm").unwrap();
    for spec in opcode_specs(&evm).unwrap() {
        let max_iterations = 200;
        let cfg = ProofConfig::new(1, max_iterations, false, &spec.options);
        let g = construct_aprp(&evm, &spec, &cfg).unwrap();
        assert!(g.is_complete(), "{}", spec.name);
        assert!(g.iteration_log.len() <= max_iterations);
    }
    let ll = builtin("loop-lang").unwrap();
    let spec = loop_sum_spec(&ll).unwrap();
    let cfg = ProofConfig::new(1, 1000, false, &spec.options);
    let g = construct_aprp(&ll, &spec, &cfg).unwrap();
    assert!(g.is_complete());
    assert!(g.iteration_log.len() <= 1000);

    // With three iterations the CLI reports a partial proof via exit code 2,
    // and compilation still emits rules only for the proved edges.
    let dir = std::env::temp_dir().join(format!("prooforge-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let proof_path = dir.join("loop-partial.proof.json");
    let out = Command::new(env!("CARGO_BIN_EXE_prooforge"))
        .args([
            "prove",
            "loop-lang",
            "../../semantics/loop-sum.spec",
            "--max-iterations",
            "3",
            "-o",
        ])
        .arg(&proof_path)
        .output()
        .expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(2),
        "partial proof must exit 2: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let cfg = ProofConfig::new(1, 3, false, &spec.options);
    let partial = construct_aprp(&ll, &spec, &cfg).unwrap();
    assert!(partial.partial);
    assert_eq!(partial.step_edges.len(), 3, "three proved edges");
    let (normalized, _) = normalize(&partial, 50).unwrap();
    let (rules, skipped) = emit_rules(&normalized, &ll).unwrap();
    assert!(skipped.is_empty());
    assert_eq!(
        rules.len(),
        1,
        "the three proved unit edges compress into one rule"
    );
    assert_eq!(rules[0].consolidated, 3);

    // Unsatisfiable initial states are rejected with exit code 1.
    let bad_spec = dir.join("bad.spec");
    std::fs::write(
        &bad_spec,
        "spec bad\ninit <k> s:KItem ~> REST:K </k> <env> E:Env </env> requires 1 >Int 2\nfinal <k> REST </k> <env> EF:Env </env>\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_prooforge"))
        .args(["prove", "loop-lang"])
        .arg(&bad_spec)
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(1));

    let elapsed = started.elapsed();
    println!(
        "ACCEPTANCE 7 PASS: iteration logs within bounds; I=3 yields exit code 2 and a 3-rewrite compiled rule ({}ms)",
        elapsed.as_millis()
    );
}

#[test]
fn acceptance_tie_band_definition() {
    // Speedup 1.005 counts as a tie under the ±1% band.
    let s = 1.005f64;
    assert!((s - 1.0).abs() <= 0.01);
    let w = 1.02f64;
    assert!(w > 1.0 && (w - 1.0).abs() > 0.01);
}
