//! Builtin evaluation hooks and the term normalizer.
//!
//! After every rewrite the new configuration is normalized: hooked function
//! applications over sufficiently concrete arguments are evaluated, and
//! integer arithmetic is rewritten to a canonical linear form. Symbolic
//! arguments simply stay symbolic.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::constraint::canon_cmp;
use crate::constraint::LinAtom;
use crate::linear::{linearize, rebuild};
use crate::semantics::{Signature, KDOT, KSEQ};
use crate::term::{CellBag, Sort, Term, TermRef};

/// Normalize a term bottom-up: evaluate hooks, fold ground comparisons and
/// boolean connectives, canonicalize `+Int`/`-Int`/`*Int` chains. Returns
/// the same `Arc` when nothing changed.
pub fn simplify_term(sig: &Signature, t: &TermRef) -> TermRef {
    match &**t {
        Term::Var(_) | Term::Int(_) | Term::Bool(_) => t.clone(),
        Term::Cells(bag) => {
            let mut changed = false;
            let cells: Vec<_> = bag
                .iter()
                .map(|(l, body)| {
                    let new = simplify_term(sig, body);
                    if !Arc::ptr_eq(&new, body) {
                        changed = true;
                    }
                    (l.clone(), new)
                })
                .collect();
            if changed {
                Term::cells(CellBag::new(cells).expect("labels unchanged"))
            } else {
                t.clone()
            }
        }
        Term::App(a) => {
            let mut changed = false;
            let args: Vec<TermRef> = a
                .args
                .iter()
                .map(|x| {
                    let new = simplify_term(sig, x);
                    if !Arc::ptr_eq(&new, x) {
                        changed = true;
                    }
                    new
                })
                .collect();
            let rebuilt = if changed {
                Term::app(a.ctor.clone(), a.sort.clone(), args.clone())
            } else {
                t.clone()
            };
            match eval_app(sig, &rebuilt, &args) {
                Some(out) => out,
                None => rebuilt,
            }
        }
    }
}

/// Try to evaluate one application whose arguments are already normalized.
fn eval_app(sig: &Signature, t: &TermRef, args: &[TermRef]) -> Option<TermRef> {
    let a = t.as_app()?;
    match a.ctor.as_str() {
        "+Int" | "-Int" | "*Int" => {
            let canon = rebuild(&linearize(t));
            if canon != *t {
                return Some(canon);
            }
            return None;
        }
        "==Int" | "=/=Int" | "<Int" | "<=Int" | ">Int" | ">=Int" => {
            let op = match a.ctor.as_str() {
                "==Int" => crate::constraint::CmpOp::Eq,
                "=/=Int" => crate::constraint::CmpOp::Ne,
                "<Int" => crate::constraint::CmpOp::Lt,
                "<=Int" => crate::constraint::CmpOp::Le,
                ">Int" => crate::constraint::CmpOp::Gt,
                _ => crate::constraint::CmpOp::Ge,
            };
            return match canon_cmp(op, &args[0], &args[1]) {
                LinAtom::Le(l) if l.is_constant() => {
                    Some(Term::boolean(l.constant <= BigInt::zero()))
                }
                LinAtom::EqZ(l) if l.is_constant() => Some(Term::boolean(l.constant.is_zero())),
                LinAtom::NeZ(l) if l.is_constant() => Some(Term::boolean(!l.constant.is_zero())),
                _ => None,
            };
        }
        "andBool" => {
            return match (args[0].as_bool(), args[1].as_bool()) {
                (Some(false), _) | (_, Some(false)) => Some(Term::boolean(false)),
                (Some(true), _) => Some(args[1].clone()),
                (_, Some(true)) => Some(args[0].clone()),
                _ => None,
            }
        }
        "orBool" => {
            return match (args[0].as_bool(), args[1].as_bool()) {
                (Some(true), _) | (_, Some(true)) => Some(Term::boolean(true)),
                (Some(false), _) => Some(args[1].clone()),
                (_, Some(false)) => Some(args[0].clone()),
                _ => None,
            }
        }
        "notBool" => return args[0].as_bool().map(|b| Term::boolean(!b)),
        _ => {}
    }
    let decl = sig.op(&a.ctor)?;
    let hook = decl.hook.as_deref()?;
    match hook {
        "k.eq" => {
            if args[0] == args[1] {
                Some(Term::boolean(true))
            } else if args[0].is_ground() && args[1].is_ground() {
                Some(Term::boolean(false))
            } else {
                None
            }
        }
        "k.ne" => {
            if args[0] == args[1] {
                Some(Term::boolean(false))
            } else if args[0].is_ground() && args[1].is_ground() {
                Some(Term::boolean(true))
            } else {
                None
            }
        }
        "word.lt" => word_cmp(args, |a, b| a < b),
        "word.gt" => word_cmp(args, |a, b| a > b),
        "word.iszero" => {
            let n = args[0].as_int()?;
            Some(Term::int(if n.is_zero() { 1 } else { 0 }))
        }
        "stack.size" => stack_size(&decl.result, &a.ctor, args),
        "code.drop" => code_drop(args),
        "evm.unpack" => evm_unpack(sig, args),
        "evm.cost" => opcode_table(args, |op| match op {
            "JUMP" | "JUMPI" => Some(8),
            "JUMPDEST" => Some(1),
            "STOP" => Some(0),
            _ => Some(3),
        }),
        "evm.needed" => opcode_table(args, |op| match op {
            "ADD" | "SUB" | "LT" | "GT" | "SWAP1" | "JUMPI" => Some(2),
            "ISZERO" | "POP" | "JUMP" | "DUP1" => Some(1),
            "PUSH" | "JUMPDEST" | "STOP" => Some(0),
            _ => None,
        }),
        "evm.delta" => opcode_table(args, |op| match op {
            "ADD" | "SUB" | "LT" | "GT" | "POP" | "JUMP" => Some(-1),
            "JUMPI" => Some(-2),
            "PUSH" | "DUP1" => Some(1),
            "ISZERO" | "SWAP1" | "JUMPDEST" | "STOP" => Some(0),
            _ => None,
        }),
        "evm.width" => {
            args[0].as_app()?;
            Some(Term::int(1))
        }
        "dests.contains" => dests_contains(args),
        "env.lookup" => env_lookup(args),
        "env.store" => env_store(args),
        _ => None,
    }
}

fn word_cmp(args: &[TermRef], f: impl Fn(&BigInt, &BigInt) -> bool) -> Option<TermRef> {
    let a = args[0].as_int()?;
    let b = args[1].as_int()?;
    Some(Term::int(if f(a, b) { 1 } else { 0 }))
}

/// Length of a cons spine (any binary constructor chain ending in a nullary
/// constructor). A symbolic tail yields `n +Int size(tail)`.
fn stack_size(result: &Sort, size_ctor: &crate::term::Ident, args: &[TermRef]) -> Option<TermRef> {
    let mut n = 0i64;
    let mut cur = args[0].clone();
    loop {
        match &*cur.clone() {
            Term::App(a) if a.args.len() == 2 => {
                n += 1;
                cur = a.args[1].clone();
            }
            Term::App(a) if a.args.is_empty() => {
                return Some(Term::int(n));
            }
            _ => {
                if n == 0 {
                    return None;
                }
                let rest = Term::app(size_ctor.clone(), result.clone(), vec![cur]);
                return Some(Term::app("+Int", Sort::int(), vec![rest, Term::int(n)]));
            }
        }
    }
}

fn code_drop(args: &[TermRef]) -> Option<TermRef> {
    let n = args[1].as_int()?;
    let mut n = n.clone();
    let mut cur = args[0].clone();
    while n > BigInt::zero() {
        match &*cur.clone() {
            Term::App(a) if a.args.len() == 2 => {
                cur = a.args[1].clone();
                n -= 1;
            }
            Term::App(a) if a.args.is_empty() => return Some(cur),
            _ => return None,
        }
    }
    Some(cur)
}

/// Turn a concrete instruction list into the `#next(op) ~> ...` computation.
fn evm_unpack(sig: &Signature, args: &[TermRef]) -> Option<TermRef> {
    let next = sig.op(&crate::term::Ident::new("#next"))?;
    let mut ops = Vec::new();
    let mut cur = args[0].clone();
    loop {
        match &*cur.clone() {
            Term::App(a) if a.args.len() == 2 => {
                ops.push(a.args[0].clone());
                cur = a.args[1].clone();
            }
            Term::App(a) if a.args.is_empty() => break,
            _ => return None,
        }
    }
    let mut k = Term::app(KDOT, Sort::k(), vec![]);
    for op in ops.into_iter().rev() {
        let item = Term::app(next.name.clone(), next.result.clone(), vec![op]);
        k = Term::app(KSEQ, Sort::k(), vec![item, k]);
    }
    Some(k)
}

fn opcode_table(args: &[TermRef], f: impl Fn(&str) -> Option<i64>) -> Option<TermRef> {
    let app = args[0].as_app()?;
    f(app.ctor.as_str()).map(Term::int)
}

fn dests_contains(args: &[TermRef]) -> Option<TermRef> {
    let needle = args[0].as_int()?;
    let mut cur = args[1].clone();
    loop {
        match &*cur.clone() {
            Term::App(a) if a.args.len() == 2 => match a.args[0].as_int() {
                Some(v) if v == needle => return Some(Term::boolean(true)),
                Some(_) => cur = a.args[1].clone(),
                None => return None,
            },
            Term::App(a) if a.args.is_empty() => return Some(Term::boolean(false)),
            _ => return None,
        }
    }
}

/// Environment spine: `bind(id, value, rest)` ending in a nullary `nil`.
/// Identifiers must be concrete; values may stay symbolic.
fn env_lookup(args: &[TermRef]) -> Option<TermRef> {
    let id = args[1].as_app()?;
    if !args[1].is_ground() {
        return None;
    }
    let mut cur = args[0].clone();
    loop {
        match &*cur.clone() {
            Term::App(a) if a.args.len() == 3 => {
                let bound = a.args[0].as_app()?;
                if bound.ctor == id.ctor {
                    return Some(a.args[1].clone());
                }
                cur = a.args[2].clone();
            }
            _ => return None,
        }
    }
}

fn env_store(args: &[TermRef]) -> Option<TermRef> {
    if !args[1].is_ground() || args[1].as_app().is_none() {
        return None;
    }
    fn go(env: &TermRef, id: &TermRef, value: &TermRef) -> Option<TermRef> {
        match &**env {
            Term::App(a) if a.args.len() == 3 => {
                let bound = a.args[0].as_app()?;
                if bound.ctor == id.as_app().unwrap().ctor {
                    Some(Term::app(
                        a.ctor.clone(),
                        a.sort.clone(),
                        vec![a.args[0].clone(), value.clone(), a.args[2].clone()],
                    ))
                } else {
                    let rest = go(&a.args[2], id, value)?;
                    Some(Term::app(
                        a.ctor.clone(),
                        a.sort.clone(),
                        vec![a.args[0].clone(), a.args[1].clone(), rest],
                    ))
                }
            }
            // Append a new binding at the end of the spine.
            Term::App(a) if a.args.is_empty() => Some(Term::app(
                "bind",
                a.sort.clone(),
                vec![id.clone(), value.clone(), env.clone()],
            )),
            _ => None,
        }
    }
    go(&args[0], &args[1], &args[2])
}
