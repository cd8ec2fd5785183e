//! The two bundled semantics (a small EVM-style stack machine and a small
//! imperative loop language), their program specifications, program loaders
//! and a deterministic program generator for equivalence testing.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::parse::{parse_semantics, parse_spec};
use crate::semantics::{ProgramSpec, Semantics, KDOT, KSEQ};
use crate::term::{CellBag, Ident, Sort, Term, TermRef};

pub const MINI_EVM_SEM: &str = include_str!("../../../semantics/mini-evm.sem");
pub const LOOP_LANG_SEM: &str = include_str!("../../../semantics/loop-lang.sem");
pub const LOOP_SUM_SPEC: &str = include_str!("../../../semantics/loop-sum.spec");

pub const OPCODE_SPECS: &[(&str, &str)] = &[
    ("add", include_str!("../../../semantics/mini-evm/add.spec")),
    ("sub", include_str!("../../../semantics/mini-evm/sub.spec")),
    ("lt", include_str!("../../../semantics/mini-evm/lt.spec")),
    ("gt", include_str!("../../../semantics/mini-evm/gt.spec")),
    (
        "iszero",
        include_str!("../../../semantics/mini-evm/iszero.spec"),
    ),
    ("pop", include_str!("../../../semantics/mini-evm/pop.spec")),
    (
        "push",
        include_str!("../../../semantics/mini-evm/push.spec"),
    ),
    (
        "dup1",
        include_str!("../../../semantics/mini-evm/dup1.spec"),
    ),
    (
        "swap1",
        include_str!("../../../semantics/mini-evm/swap1.spec"),
    ),
    (
        "stop",
        include_str!("../../../semantics/mini-evm/stop.spec"),
    ),
];

/// Load one of the bundled semantics by name.
pub fn builtin(name: &str) -> Result<Semantics> {
    match name {
        "mini-evm" => parse_semantics(MINI_EVM_SEM),
        "loop-lang" => parse_semantics(LOOP_LANG_SEM),
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

/// The bundled opcode specifications, parsed against the mini-EVM.
pub fn opcode_specs(sem: &Semantics) -> Result<Vec<ProgramSpec>> {
    OPCODE_SPECS
        .iter()
        .map(|(_, text)| parse_spec(text, sem))
        .collect()
}

pub fn loop_sum_spec(sem: &Semantics) -> Result<ProgramSpec> {
    parse_spec(LOOP_SUM_SPEC, sem)
}

// ------------------------------------------------------------------
// Mini-EVM programs
// ------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvmOp {
    Add,
    Sub,
    Lt,
    Gt,
    IsZero,
    Pop,
    Push(i64),
    Dup1,
    Swap1,
    Jump,
    Jumpi,
    Jumpdest,
    Stop,
}

impl EvmOp {
    pub fn mnemonic(&self) -> String {
        match self {
            EvmOp::Add => "ADD".into(),
            EvmOp::Sub => "SUB".into(),
            EvmOp::Lt => "LT".into(),
            EvmOp::Gt => "GT".into(),
            EvmOp::IsZero => "ISZERO".into(),
            EvmOp::Pop => "POP".into(),
            EvmOp::Push(n) => format!("PUSH {n}"),
            EvmOp::Dup1 => "DUP1".into(),
            EvmOp::Swap1 => "SWAP1".into(),
            EvmOp::Jump => "JUMP".into(),
            EvmOp::Jumpi => "JUMPI".into(),
            EvmOp::Jumpdest => "JUMPDEST".into(),
            EvmOp::Stop => "STOP".into(),
        }
    }

    fn term(&self) -> TermRef {
        let sort = Sort::new("OpCode");
        match self {
            EvmOp::Push(n) => Term::app("PUSH", sort, vec![Term::int(*n)]),
            other => Term::app(
                match other {
                    EvmOp::Add => "ADD",
                    EvmOp::Sub => "SUB",
                    EvmOp::Lt => "LT",
                    EvmOp::Gt => "GT",
                    EvmOp::IsZero => "ISZERO",
                    EvmOp::Pop => "POP",
                    EvmOp::Dup1 => "DUP1",
                    EvmOp::Swap1 => "SWAP1",
                    EvmOp::Jump => "JUMP",
                    EvmOp::Jumpi => "JUMPI",
                    EvmOp::Jumpdest => "JUMPDEST",
                    EvmOp::Stop => "STOP",
                    EvmOp::Push(_) => unreachable!("handled above"),
                },
                sort,
                vec![],
            ),
        }
    }
}

/// One mnemonic per line; blank lines and `//` comments are skipped.
pub fn parse_evm_program(text: &str) -> Result<Vec<EvmOp>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let mnemonic = parts.next().unwrap();
        let op = match mnemonic {
            "ADD" => EvmOp::Add,
            "SUB" => EvmOp::Sub,
            "LT" => EvmOp::Lt,
            "GT" => EvmOp::Gt,
            "ISZERO" => EvmOp::IsZero,
            "POP" => EvmOp::Pop,
            "PUSH" => {
                let arg = parts
                    .next()
                    .ok_or_else(|| Error::parse(lineno + 1, 1, "PUSH needs an immediate"))?;
                EvmOp::Push(arg.parse().map_err(|_| {
                    Error::parse(lineno + 1, 1, format!("bad PUSH immediate `{arg}`"))
                })?)
            }
            "DUP1" => EvmOp::Dup1,
            "SWAP1" => EvmOp::Swap1,
            "JUMP" => EvmOp::Jump,
            "JUMPI" => EvmOp::Jumpi,
            "JUMPDEST" => EvmOp::Jumpdest,
            "STOP" => EvmOp::Stop,
            other => {
                return Err(Error::parse(
                    lineno + 1,
                    1,
                    format!("unknown opcode `{other}`"),
                ))
            }
        };
        if parts.next().is_some() {
            return Err(Error::parse(lineno + 1, 1, "trailing input after opcode"));
        }
        out.push(op);
    }
    Ok(out)
}

pub fn print_evm_program(program: &[EvmOp]) -> String {
    let mut out = String::new();
    for op in program {
        out.push_str(&op.mnemonic());
        out.push('\n');
    }
    out
}

/// Initial configuration for a program: the instructions unpacked into the
/// k cell, the program in the code cell, jump destinations collected from
/// `JUMPDEST` positions, an empty stack and the given gas.
pub fn evm_config(program: &[EvmOp], gas: i64) -> TermRef {
    let k_sort = Sort::k();
    let mut k = Term::app(KDOT, k_sort.clone(), vec![]);
    let mut code = Term::app("cnil", Sort::new("Code"), vec![]);
    for op in program.iter().rev() {
        let item = Term::app("#next", Sort::k_item(), vec![op.term()]);
        k = Term::app(KSEQ, k_sort.clone(), vec![item, k]);
        code = Term::app("ccons", Sort::new("Code"), vec![op.term(), code]);
    }
    let mut dests = Term::app("dnil", Sort::new("Dests"), vec![]);
    for (idx, op) in program.iter().enumerate().rev() {
        if *op == EvmOp::Jumpdest {
            dests = Term::app(
                "dcons",
                Sort::new("Dests"),
                vec![Term::int(idx as i64), dests],
            );
        }
    }
    let cells = vec![
        (Ident::new("k"), k),
        (
            Ident::new("wordStack"),
            Term::app("nil", Sort::new("WordStack"), vec![]),
        ),
        (Ident::new("pc"), Term::int(0)),
        (Ident::new("gas"), Term::int(gas)),
        (Ident::new("code"), code),
        (Ident::new("jumpdests"), dests),
    ];
    Term::cells(CellBag::new(cells).expect("distinct labels"))
}

/// Enough gas for any path through the program.
pub fn default_gas(program: &[EvmOp]) -> i64 {
    8 * program.len() as i64 + 64
}

/// Deterministic pseudo-random mini-EVM programs with valid stack depths.
/// Conditional jumps only go forward (to a generated `JUMPDEST`), so every
/// program terminates.
pub fn gen_programs(seed: u64, count: usize) -> Vec<Vec<EvmOp>> {
    assert!(count >= 1, "gen_programs needs a positive count");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| gen_program(&mut rng)).collect()
}

fn gen_program(rng: &mut ChaCha8Rng) -> Vec<EvmOp> {
    let target_len = rng.gen_range(6..=36);
    let mut out: Vec<EvmOp> = Vec::new();
    let mut depth = 0usize;
    while out.len() < target_len {
        let roll = rng.gen_range(0u32..100);
        match roll {
            _ if roll < 30 || depth == 0 => {
                out.push(EvmOp::Push(rng.gen_range(0..256)));
                depth += 1;
            }
            _ if roll < 45 && depth >= 2 => {
                out.push(match rng.gen_range(0u32..4) {
                    0 => EvmOp::Add,
                    1 => EvmOp::Sub,
                    2 => EvmOp::Lt,
                    _ => EvmOp::Gt,
                });
                depth -= 1;
            }
            _ if roll < 55 => {
                out.push(EvmOp::IsZero);
            }
            _ if roll < 65 => {
                out.push(EvmOp::Pop);
                depth -= 1;
            }
            _ if roll < 75 => {
                out.push(EvmOp::Dup1);
                depth += 1;
            }
            _ if roll < 82 && depth >= 2 => {
                out.push(EvmOp::Swap1);
            }
            _ if roll < 92 => {
                // Forward conditional branch over a stack-neutral block.
                let cond = rng.gen_range(0..2);
                let block: &[EvmOp] = if rng.gen_bool(0.5) {
                    &[EvmOp::Push(7), EvmOp::Pop]
                } else {
                    &[EvmOp::Push(2), EvmOp::Push(3), EvmOp::Add, EvmOp::Pop]
                };
                let dest = (out.len() + 3 + block.len()) as i64;
                out.push(EvmOp::Push(cond));
                out.push(EvmOp::Push(dest));
                out.push(EvmOp::Jumpi);
                out.extend_from_slice(block);
                out.push(EvmOp::Jumpdest);
            }
            _ => {
                // Forward unconditional jump; the skipped block is dead code.
                let dest = (out.len() + 4) as i64;
                out.push(EvmOp::Push(dest));
                out.push(EvmOp::Jump);
                out.push(EvmOp::Push(9));
                out.push(EvmOp::Pop);
                out.push(EvmOp::Jumpdest);
            }
        }
    }
    out.push(EvmOp::Stop);
    out
}

// ------------------------------------------------------------------
// Loop-language program
// ------------------------------------------------------------------

/// The concrete initial configuration of the bundled loop program (the
/// init state of `loop-sum.spec`).
pub fn loop_sum_config(sem: &Semantics) -> Result<TermRef> {
    let spec = loop_sum_spec(sem)?;
    if !spec.init.is_ground() {
        return Err(Error::Precondition("loop-sum init is not ground".into()));
    }
    Ok(spec.init.config)
}
