//! End-to-end checks of the command-line interface: exit codes, file
//! outputs, canonical serialization stability, and the bench gate.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prooforge"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("prooforge-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn semantics_dir() -> PathBuf {
    // Tests run with the crate as working directory.
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../semantics")
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn prove_compile_bench_pipeline() {
    let dir = workdir("pipeline");
    let mut proofs = Vec::new();
    for name in ["add", "swap1", "push"] {
        let proof = dir.join(format!("{name}.proof.json"));
        let out = run(bin()
            .arg("prove")
            .arg("mini-evm")
            .arg(
                semantics_dir()
                    .join("mini-evm")
                    .join(format!("{name}.spec")),
            )
            .arg("-o")
            .arg(&proof)
            .arg("--emit-dot")
            .arg(dir.join(format!("{name}.dot"))));
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        proofs.push(proof);
    }
    let dot = std::fs::read_to_string(dir.join("add.dot")).unwrap();
    assert!(dot.contains("digraph aprp"));
    assert!(dot.contains("style=dashed"), "cover edges render dashed");

    let compiled = dir.join("compiled.sem");
    let out = run(bin()
        .arg("compile")
        .args(&proofs)
        .arg("--semantics")
        .arg("mini-evm")
        .arg("--out")
        .arg(&compiled));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    // The compiled semantics file reloads bit-exactly.
    let text = std::fs::read_to_string(&compiled).unwrap();
    assert!(text.contains("priority 10"));
    assert!(text.contains("// compiled: proof add"));
    let sem = prooforge_core::parse::parse_semantics(&text).unwrap();
    assert_eq!(prooforge_core::print::print_semantics(&sem), text);

    let out = run(bin()
        .arg("bench")
        .arg("mini-evm")
        .arg(&compiled)
        .args(["--count", "25", "--reps", "2", "--out"])
        .arg(dir.join("report.txt")));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = std::fs::read_to_string(dir.join("report.txt")).unwrap();
    assert_eq!(
        report.lines().count(),
        26,
        "25 records plus the aggregate line"
    );
    assert!(report.contains("equivalence_failures=0"));
}

#[test]
fn bench_identical_semantics_is_equivalent_with_delta_zero() {
    let dir = workdir("selfbench");
    let out = run(bin()
        .arg("bench")
        .arg("mini-evm")
        .arg("mini-evm")
        .args(["--count", "10", "--reps", "2", "--out"])
        .arg(dir.join("report.txt")));
    assert_eq!(out.status.code(), Some(0));
    let report = std::fs::read_to_string(dir.join("report.txt")).unwrap();
    for line in report.lines().filter(|l| l.starts_with("test=")) {
        assert!(line.contains("delta_steps=0.0000"), "{line}");
        assert!(line.contains("equivalent=true"), "{line}");
    }
}

#[test]
fn bench_seed_env_override_changes_corpus() {
    let dir = workdir("seedenv");
    let mut reports = Vec::new();
    for seed in ["7", "8"] {
        let path = dir.join(format!("report-{seed}.txt"));
        let out = run(bin()
            .env("PROOFORGE_SEED", seed)
            .arg("bench")
            .arg("mini-evm")
            .arg("mini-evm")
            .args(["--count", "5", "--reps", "1", "--out"])
            .arg(&path));
        assert_eq!(out.status.code(), Some(0));
        let text = std::fs::read_to_string(&path).unwrap();
        // Strip timing fields; step counts identify the corpus.
        let steps: Vec<String> = text
            .lines()
            .filter_map(|l| l.split("wall_original").next().map(str::to_string))
            .collect();
        reports.push(steps);
    }
    assert_ne!(
        reports[0], reports[1],
        "different seeds generate different corpora"
    );
}

#[test]
fn run_reports_fuel_exhaustion_with_exit_3() {
    let dir = workdir("fuel");
    let prog = dir.join("prog.evm");
    std::fs::write(&prog, "PUSH 1\nPUSH 2\nADD\nSTOP\n").unwrap();
    let out = run(bin()
        .arg("run")
        .arg("mini-evm")
        .arg(&prog)
        .args(["--fuel", "3"]));
    assert_eq!(out.status.code(), Some(3));

    let out = run(bin()
        .arg("run")
        .arg("mini-evm")
        .arg(&prog)
        .args(["--fuel", "100", "--trace"]));
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("step 1:"), "{stdout}");
    assert!(stdout.contains("steps: 19"), "{stdout}");
    assert!(stdout.contains("#halt"), "{stdout}");
}

#[test]
fn check_rejects_tampered_proofs() {
    let dir = workdir("check");
    let proof = dir.join("add.proof.json");
    let out = run(bin()
        .arg("prove")
        .arg("mini-evm")
        .arg(semantics_dir().join("mini-evm/add.spec"))
        .arg("-o")
        .arg(&proof));
    assert_eq!(out.status.code(), Some(0));

    let out = run(bin().arg("check").arg("mini-evm").arg(&proof));
    assert_eq!(out.status.code(), Some(0));

    // Corrupt a step edge length.
    let text = std::fs::read_to_string(&proof).unwrap();
    let tampered = text.replacen("\"n\": 1", "\"n\": 2", 1);
    assert_ne!(text, tampered);
    std::fs::write(&proof, tampered).unwrap();
    let out = run(bin().arg("check").arg("mini-evm").arg(&proof));
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("violation"), "{stderr}");

    // Compile refuses the tampered proof as well.
    let out = run(bin()
        .arg("compile")
        .arg(&proof)
        .args(["--semantics", "mini-evm", "--out"])
        .arg(dir.join("broken.sem")));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_accepts_cfg_and_spec_inputs() {
    let dir = workdir("formats");
    let cfg = dir.join("one.cfg");
    std::fs::write(
        &cfg,
        "<k> #next(ISZERO) </k> <wordStack> 0 : nil </wordStack> <pc> 0 </pc> <gas> 10 </gas> <code> cnil </code> <jumpdests> dnil </jumpdests>\n",
    )
    .unwrap();
    let out = run(bin().arg("run").arg("mini-evm").arg(&cfg));
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("1 : nil"), "ISZERO(0) pushes 1: {stdout}");
    assert!(stdout.contains("steps: 5"), "{stdout}");

    let out = run(bin()
        .arg("run")
        .arg("loop-lang")
        .arg(semantics_dir().join("loop-sum.spec"))
        .args(["--fuel", "100000"]));
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("bind(x, 1000, bind(i, 1000, emptyEnv))"),
        "{stdout}"
    );

    // A symbolic spec cannot be run concretely.
    let out = run(bin()
        .arg("run")
        .arg("mini-evm")
        .arg(semantics_dir().join("mini-evm/add.spec")));
    assert_eq!(out.status.code(), Some(1));
}
