//! Canonical textual form of terms, constraints, rules and semantics files.
//! Printing and parsing round-trip exactly: `parse(print(x)) == x` and
//! re-printing a reloaded file is byte-identical.

use std::collections::BTreeSet;

use crate::constraint::{to_bool_term, Constraint};
use crate::semantics::{Provenance, Rule, Semantics, Signature, KDOT, KSEQ};
use crate::term::{Ident, Term, TermRef};

const LVL_ATOM: u8 = 0;
const LVL_ARITH: u8 = 2;
const LVL_CMP: u8 = 3;
const LVL_BOOL: u8 = 4;
const LVL_KSEQ: u8 = 5;

/// Prints terms with each variable annotated `Name:Sort` at its first
/// occurrence and bare afterwards; one printer instance spans one variable
/// scope (a rule, a constrained term, a standalone term).
pub struct Printer<'a> {
    sig: &'a Signature,
    seen: BTreeSet<Ident>,
}

impl<'a> Printer<'a> {
    pub fn new(sig: &'a Signature) -> Printer<'a> {
        Printer {
            sig,
            seen: BTreeSet::new(),
        }
    }

    pub fn term(&mut self, t: &TermRef) -> String {
        self.term_prec(t).0
    }

    pub fn constraint(&mut self, c: &Constraint) -> String {
        self.term(&to_bool_term(c))
    }

    pub fn cells(&mut self, t: &TermRef) -> String {
        match &**t {
            Term::Cells(bag) => {
                let parts: Vec<String> = bag
                    .iter()
                    .map(|(label, body)| format!("<{label}> {} </{label}>", self.term(body)))
                    .collect();
                parts.join(" ")
            }
            _ => self.term(t),
        }
    }

    fn term_prec(&mut self, t: &TermRef) -> (String, u8) {
        match &**t {
            Term::Var(v) => {
                if self.seen.insert(v.name.clone()) {
                    (format!("{}:{}", v.name, v.sort), LVL_ATOM)
                } else {
                    (v.name.to_string(), LVL_ATOM)
                }
            }
            Term::Int(n) => (n.to_string(), LVL_ATOM),
            Term::Bool(b) => (b.to_string(), LVL_ATOM),
            Term::Cells(_) => (self.cells(t), LVL_ATOM),
            Term::App(a) => match a.ctor.as_str() {
                k if k == KDOT => (".K".to_string(), LVL_ATOM),
                k if k == KSEQ => {
                    let mut parts = Vec::new();
                    let mut cur = t.clone();
                    loop {
                        match &*cur.clone() {
                            Term::App(s) if s.ctor.as_str() == KSEQ => {
                                parts.push(self.child(&s.args[0], LVL_KSEQ, false));
                                cur = s.args[1].clone();
                            }
                            Term::App(s) if s.ctor.as_str() == KDOT => break,
                            _ => {
                                parts.push(self.child(&cur, LVL_KSEQ, false));
                                break;
                            }
                        }
                    }
                    (parts.join(" ~> "), LVL_KSEQ)
                }
                "notBool" => {
                    let arg = self.child(&a.args[0], LVL_CMP, false);
                    (format!("notBool {arg}"), LVL_CMP)
                }
                _ => {
                    let decl = self.sig.op(&a.ctor);
                    let infix = decl.and_then(|d| d.infix.clone());
                    match infix {
                        Some(sym) if a.args.len() == 2 => {
                            let lvl = op_level(&sym);
                            let same = |child: &TermRef| match &**child {
                                Term::App(c) => c.ctor == a.ctor,
                                _ => false,
                            };
                            let l = self.child(&a.args[0], lvl, false);
                            // Right-assoc: a same-operator right child chains
                            // without parentheses.
                            let r = self.child(&a.args[1], lvl, same(&a.args[1]));
                            (format!("{l} {sym} {r}"), lvl)
                        }
                        _ => {
                            if a.args.is_empty() {
                                (a.ctor.to_string(), LVL_ATOM)
                            } else {
                                let args: Vec<String> =
                                    a.args.iter().map(|x| self.term(x)).collect();
                                (format!("{}({})", a.ctor, args.join(", ")), LVL_ATOM)
                            }
                        }
                    }
                }
            },
        }
    }

    /// Print a child, parenthesizing when its level would not reparse under
    /// a parent of level `parent`.
    fn child(&mut self, t: &TermRef, parent: u8, allow_equal: bool) -> String {
        let (s, lvl) = self.term_prec(t);
        if lvl > parent || (lvl == parent && !allow_equal) {
            format!("({s})")
        } else {
            s
        }
    }
}

fn op_level(sym: &str) -> u8 {
    match sym {
        "~>" => LVL_KSEQ,
        "andBool" | "orBool" => LVL_BOOL,
        "==Int" | "=/=Int" | "<Int" | "<=Int" | ">Int" | ">=Int" | "==K" | "=/=K" => LVL_CMP,
        _ => LVL_ARITH,
    }
}

pub fn print_term(sig: &Signature, t: &TermRef) -> String {
    Printer::new(sig).term(t)
}

pub fn print_cells(sig: &Signature, t: &TermRef) -> String {
    Printer::new(sig).cells(t)
}

pub fn print_constraint(sig: &Signature, c: &Constraint) -> String {
    Printer::new(sig).constraint(c)
}

/// Configuration and constraint of one constrained term, sharing a variable
/// scope so annotations appear exactly once.
pub fn print_cterm(sig: &Signature, config: &TermRef, constraint: &Constraint) -> (String, String) {
    let mut p = Printer::new(sig);
    let cfg = p.cells(config);
    let c = p.constraint(constraint);
    (cfg, c)
}

pub fn print_rule(sig: &Signature, rule: &Rule) -> String {
    let mut out = String::new();
    if let Provenance::Compiled {
        proof,
        path,
        consolidated,
    } = &rule.provenance
    {
        out.push_str(&format!(
            "// {}\n",
            crate::parse::provenance_comment(proof, path, *consolidated)
        ));
    }
    let mut p = Printer::new(sig);
    out.push_str(&format!(
        "rule {}: {} => {}",
        rule.name,
        p.cells(&rule.lhs),
        p.cells(&rule.rhs)
    ));
    if !rule.requires.is_true() {
        out.push_str(&format!(" requires {}", p.constraint(&rule.requires)));
    }
    out.push_str(&format!(" priority {}", rule.priority));
    out
}

/// Canonical `.sem` serialization. Reloading and re-printing the output is
/// byte-identical.
pub fn print_semantics(sem: &Semantics) -> String {
    let mut out = String::new();
    out.push_str(&format!("module {}\n", sem.name));

    let user_sorts: Vec<&Ident> = sem
        .sig
        .sorts
        .iter()
        .filter(|s| !matches!(s.as_str(), "Int" | "Bool" | "K" | "KItem"))
        .collect();
    if !user_sorts.is_empty() {
        out.push('\n');
        for s in user_sorts {
            out.push_str(&format!("sort {s}\n"));
        }
    }

    let user_ops: Vec<_> = sem.sig.ops.values().filter(|o| !o.builtin).collect();
    if !user_ops.is_empty() {
        out.push('\n');
        for op in user_ops {
            let args = op
                .args
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&format!(
                "op {} : {}{}-> {}",
                op.name,
                args,
                if args.is_empty() { "" } else { " " },
                op.result
            ));
            let mut attrs = Vec::new();
            if let Some(sym) = &op.infix {
                attrs.push(format!("infix \"{sym}\""));
            }
            if let Some(hook) = &op.hook {
                attrs.push(format!("hook \"{hook}\""));
            }
            if !attrs.is_empty() {
                out.push_str(&format!(" [{}]", attrs.join(", ")));
            }
            out.push('\n');
        }
    }

    out.push('\n');
    out.push_str("configuration ");
    let cells: Vec<String> = sem
        .sig
        .cells
        .iter()
        .map(|c| {
            if c.pc {
                format!("<{0}> {1} [pc] </{0}>", c.label, c.body)
            } else {
                format!("<{0}> {1} </{0}>", c.label, c.body)
            }
        })
        .collect();
    out.push_str(&cells.join(" "));
    out.push('\n');

    if !sem.rules.is_empty() {
        out.push('\n');
        for rule in &sem.rules {
            out.push_str(&print_rule(&sem.sig, rule));
            out.push('\n');
        }
    }
    out
}
