//! Semantics definitions: signatures (sorts, constructors, configuration
//! cells), prioritized rewrite rules, program specifications, and the
//! integration of compiled rules at a higher priority band.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use indexmap::IndexMap;

use crate::constraint::{CTerm, Constraint};
use crate::error::{Error, Result};
use crate::term::{free_vars, sort_fits, Ident, Sort, Term, TermRef};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub name: Ident,
    pub args: Vec<Sort>,
    pub result: Sort,
    /// Surface symbol when the operator is written infix (binary only).
    pub infix: Option<String>,
    /// Name of a builtin evaluation hook, if any.
    pub hook: Option<String>,
    /// Part of the base signature rather than declared in a file.
    pub builtin: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellDecl {
    pub label: Ident,
    pub body: Sort,
    /// Marks the program-counter cell used by the default sameloop predicate.
    pub pc: bool,
}

/// Declared sorts, constructors and configuration cells, plus the builtins
/// every semantics starts from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub sorts: Vec<Ident>,
    pub ops: IndexMap<Ident, OpDecl>,
    pub infix: BTreeMap<String, Ident>,
    pub cells: Vec<CellDecl>,
}

pub const KSEQ: &str = "#kseq";
pub const KDOT: &str = "#dotk";

impl Signature {
    pub fn new() -> Signature {
        let mut sig = Signature {
            sorts: Vec::new(),
            ops: IndexMap::new(),
            infix: BTreeMap::new(),
            cells: Vec::new(),
        };
        for s in ["Int", "Bool", "K", "KItem"] {
            sig.sorts.push(Ident::new(s));
        }
        let int = Sort::int();
        let boo = Sort::bool();
        let k = Sort::k();
        let ki = Sort::k_item();
        // Computation sequencing.
        sig.builtin(
            KSEQ,
            vec![ki.clone(), k.clone()],
            k.clone(),
            Some("~>"),
            None,
        );
        sig.builtin(KDOT, vec![], k.clone(), None, None);
        // Integer arithmetic.
        sig.builtin(
            "+Int",
            vec![int.clone(), int.clone()],
            int.clone(),
            Some("+Int"),
            Some("int.add"),
        );
        sig.builtin(
            "-Int",
            vec![int.clone(), int.clone()],
            int.clone(),
            Some("-Int"),
            Some("int.sub"),
        );
        sig.builtin(
            "*Int",
            vec![int.clone(), int.clone()],
            int.clone(),
            Some("*Int"),
            Some("int.mul"),
        );
        // Integer comparisons.
        for (name, hook) in [
            ("==Int", "int.eq"),
            ("=/=Int", "int.ne"),
            ("<Int", "int.lt"),
            ("<=Int", "int.le"),
            (">Int", "int.gt"),
            (">=Int", "int.ge"),
        ] {
            sig.builtin(
                name,
                vec![int.clone(), int.clone()],
                boo.clone(),
                Some(name),
                Some(hook),
            );
        }
        // Boolean connectives.
        sig.builtin(
            "andBool",
            vec![boo.clone(), boo.clone()],
            boo.clone(),
            Some("andBool"),
            Some("bool.and"),
        );
        sig.builtin(
            "orBool",
            vec![boo.clone(), boo.clone()],
            boo.clone(),
            Some("orBool"),
            Some("bool.or"),
        );
        sig.builtin(
            "notBool",
            vec![boo.clone()],
            boo.clone(),
            None,
            Some("bool.not"),
        );
        // Structural equality over computation items.
        sig.builtin(
            "==K",
            vec![ki.clone(), ki.clone()],
            boo.clone(),
            Some("==K"),
            Some("k.eq"),
        );
        sig.builtin(
            "=/=K",
            vec![ki.clone(), ki],
            boo,
            Some("=/=K"),
            Some("k.ne"),
        );
        sig
    }

    fn builtin(
        &mut self,
        name: &str,
        args: Vec<Sort>,
        result: Sort,
        infix: Option<&str>,
        hook: Option<&str>,
    ) {
        let decl = OpDecl {
            name: Ident::new(name),
            args,
            result,
            infix: infix.map(str::to_string),
            hook: hook.map(str::to_string),
            builtin: true,
        };
        if let Some(sym) = &decl.infix {
            self.infix.insert(sym.clone(), decl.name.clone());
        }
        self.ops.insert(decl.name.clone(), decl);
    }

    pub fn declare_sort(&mut self, name: Ident) -> Result<()> {
        if self.sorts.contains(&name) {
            return Err(Error::validation(format!("sort `{name}` declared twice")));
        }
        self.sorts.push(name);
        Ok(())
    }

    pub fn declare_op(&mut self, decl: OpDecl) -> Result<()> {
        for s in decl.args.iter().chain(std::iter::once(&decl.result)) {
            if !self.has_sort(s) {
                return Err(Error::validation(format!(
                    "op `{}` uses undeclared sort `{s}`",
                    decl.name
                )));
            }
        }
        if self.ops.contains_key(&decl.name) {
            return Err(Error::validation(format!(
                "op `{}` declared twice",
                decl.name
            )));
        }
        if let Some(sym) = &decl.infix {
            if decl.args.len() != 2 {
                return Err(Error::validation(format!(
                    "infix op `{}` must be binary",
                    decl.name
                )));
            }
            if self.infix.contains_key(sym) {
                return Err(Error::validation(format!(
                    "infix symbol `{sym}` declared twice"
                )));
            }
            self.infix.insert(sym.clone(), decl.name.clone());
        }
        self.ops.insert(decl.name.clone(), decl);
        Ok(())
    }

    pub fn has_sort(&self, s: &Sort) -> bool {
        s.is_builtin() || self.sorts.contains(&s.0)
    }

    pub fn op(&self, name: &Ident) -> Option<&OpDecl> {
        self.ops.get(name)
    }

    pub fn cell(&self, label: &Ident) -> Option<&CellDecl> {
        self.cells.iter().find(|c| &c.label == label)
    }

    pub fn pc_cell(&self) -> Option<&CellDecl> {
        self.cells.iter().find(|c| c.pc)
    }

    pub fn k_label(&self) -> Ident {
        Ident::new("k")
    }

    /// Check that `t` is well-sorted and fits at a position expecting
    /// `expected` (when given).
    pub fn check_term(&self, t: &TermRef, expected: Option<&Sort>) -> Result<()> {
        let actual = t.sort();
        if let Some(exp) = expected {
            if !sort_fits(exp, &actual) {
                return Err(Error::sort(format!("expected sort {exp}, found {actual}")));
            }
        }
        match &**t {
            Term::Var(v) => {
                if !self.has_sort(&v.sort) {
                    return Err(Error::sort(format!(
                        "variable {} has undeclared sort {}",
                        v.name, v.sort
                    )));
                }
                Ok(())
            }
            Term::Int(_) | Term::Bool(_) => Ok(()),
            Term::App(a) => {
                let decl = self
                    .op(&a.ctor)
                    .ok_or_else(|| Error::sort(format!("unknown constructor `{}`", a.ctor)))?;
                if decl.args.len() != a.args.len() {
                    return Err(Error::sort(format!(
                        "constructor `{}` expects {} arguments, found {}",
                        a.ctor,
                        decl.args.len(),
                        a.args.len()
                    )));
                }
                if decl.result != a.sort {
                    return Err(Error::sort(format!(
                        "constructor `{}` has result sort {}, found {}",
                        a.ctor, decl.result, a.sort
                    )));
                }
                for (arg, exp) in a.args.iter().zip(decl.args.iter()) {
                    self.check_term(arg, Some(exp))?;
                }
                Ok(())
            }
            Term::Cells(bag) => {
                for (label, body) in bag.iter() {
                    let decl = self
                        .cell(label)
                        .ok_or_else(|| Error::sort(format!("undeclared cell `{label}`")))?;
                    self.check_term(body, Some(&decl.body))?;
                }
                Ok(())
            }
        }
    }

    /// A full configuration: cell labels exactly match the declaration.
    pub fn check_config(&self, t: &TermRef) -> Result<()> {
        let bag = t
            .as_cells()
            .ok_or_else(|| Error::sort("configuration root must be a cell bag".to_string()))?;
        let mut declared: Vec<&Ident> = self.cells.iter().map(|c| &c.label).collect();
        declared.sort();
        let got: Vec<&Ident> = bag.labels().collect();
        if declared != got {
            return Err(Error::sort(format!(
                "configuration cells {:?} do not match declared cells {:?}",
                got.iter().map(|i| i.as_str()).collect::<Vec<_>>(),
                declared.iter().map(|i| i.as_str()).collect::<Vec<_>>()
            )));
        }
        self.check_term(t, None)
    }
}

impl Default for Signature {
    fn default() -> Self {
        Signature::new()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Handwritten,
    Compiled {
        proof: String,
        path: String,
        consolidated: usize,
    },
}

pub const PRIORITY_HANDWRITTEN: i64 = 50;
pub const PRIORITY_COMPILED: i64 = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: Ident,
    /// Lower number = higher priority; handwritten rules default to 50,
    /// compiled rules are installed at 10.
    pub priority: i64,
    /// Partial configuration: unmentioned cells are framed (left unchanged).
    pub lhs: TermRef,
    /// Cells absent here but present in the lhs are unchanged.
    pub rhs: TermRef,
    pub requires: Constraint,
    pub provenance: Provenance,
}

/// Which rules can fire at a configuration, keyed by the head of the k cell.
#[derive(Clone, Debug, Default)]
pub struct RuleIndex {
    by_ctor: HashMap<Ident, Vec<usize>>,
    int_headed: Vec<usize>,
    bool_headed: Vec<usize>,
    empty_headed: Vec<usize>,
    var_headed: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum HeadKey {
    Ctor(Ident),
    IntLit,
    BoolLit,
    Empty,
    Var,
}

fn k_head_key(k_body: &TermRef) -> HeadKey {
    match &**k_body {
        Term::Var(_) => HeadKey::Var,
        Term::App(a) if a.ctor.as_str() == KSEQ => match &*a.args[0] {
            Term::Var(_) => HeadKey::Var,
            Term::Int(_) => HeadKey::IntLit,
            Term::Bool(_) => HeadKey::BoolLit,
            Term::App(h) => HeadKey::Ctor(h.ctor.clone()),
            Term::Cells(_) => HeadKey::Var,
        },
        Term::App(a) if a.ctor.as_str() == KDOT => HeadKey::Empty,
        Term::App(a) => HeadKey::Ctor(a.ctor.clone()),
        Term::Int(_) => HeadKey::IntLit,
        Term::Bool(_) => HeadKey::BoolLit,
        Term::Cells(_) => HeadKey::Var,
    }
}

/// The root constructor of the first item of a configuration's k cell, used
/// by the default sameloop predicate.
pub fn k_head_ctor(config: &TermRef, k_label: &Ident) -> Option<Ident> {
    let bag = config.as_cells()?;
    let body = bag.get(k_label)?;
    match k_head_key(body) {
        HeadKey::Ctor(c) => Some(c),
        _ => None,
    }
}

impl RuleIndex {
    fn build(rules: &[Rule], k_label: &Ident) -> RuleIndex {
        let mut idx = RuleIndex::default();
        for (i, rule) in rules.iter().enumerate() {
            let bag = rule.lhs.as_cells().expect("validated rule lhs");
            let body = bag.get(k_label).expect("validated rule mentions k");
            match k_head_key(body) {
                HeadKey::Ctor(c) => idx.by_ctor.entry(c).or_default().push(i),
                HeadKey::IntLit => idx.int_headed.push(i),
                HeadKey::BoolLit => idx.bool_headed.push(i),
                HeadKey::Empty => idx.empty_headed.push(i),
                HeadKey::Var => idx.var_headed.push(i),
            }
        }
        idx
    }

    /// Indices of rules that could match a configuration with the given k
    /// cell head, ordered by (priority, declaration order).
    pub fn candidates(&self, rules: &[Rule], config_k: &TermRef) -> Vec<usize> {
        let mut out: Vec<usize> = match k_head_key(config_k) {
            HeadKey::Ctor(c) => self.by_ctor.get(&c).cloned().unwrap_or_default(),
            HeadKey::IntLit => self.int_headed.clone(),
            HeadKey::BoolLit => self.bool_headed.clone(),
            HeadKey::Empty => self.empty_headed.clone(),
            // A variable-headed subject can in principle meet any pattern,
            // but symbolic execution in this fragment requires concrete
            // heads, so only variable-headed patterns apply.
            HeadKey::Var => Vec::new(),
        };
        out.extend(self.var_headed.iter().copied());
        out.sort_by_key(|&i| (rules[i].priority, i));
        out
    }
}

#[derive(Clone, Debug)]
pub struct Semantics {
    pub name: Ident,
    pub sig: Signature,
    pub rules: Vec<Rule>,
    index: RuleIndex,
}

impl Semantics {
    pub fn new(name: Ident, sig: Signature, rules: Vec<Rule>) -> Result<Semantics> {
        let mut sem = Semantics {
            name,
            sig,
            rules,
            index: RuleIndex::default(),
        };
        sem.validate()?;
        Ok(sem)
    }

    fn validate(&mut self) -> Result<()> {
        if self.sig.cells.is_empty() {
            return Err(Error::validation("semantics declares no configuration"));
        }
        if self.sig.cell(&self.sig.k_label()).is_none() {
            return Err(Error::validation("configuration must declare a `k` cell"));
        }
        let mut names = BTreeSet::new();
        for rule in &self.rules {
            if !names.insert(rule.name.clone()) {
                return Err(Error::validation(format!(
                    "duplicate rule name `{}`",
                    rule.name
                )));
            }
            self.validate_rule(rule)?;
        }
        self.index = RuleIndex::build(&self.rules, &self.sig.k_label());
        Ok(())
    }

    fn validate_rule(&self, rule: &Rule) -> Result<()> {
        let lhs = rule
            .lhs
            .as_cells()
            .ok_or_else(|| Error::validation(format!("rule `{}`: lhs must be cells", rule.name)))?;
        let rhs = rule
            .rhs
            .as_cells()
            .ok_or_else(|| Error::validation(format!("rule `{}`: rhs must be cells", rule.name)))?;
        if lhs.get(&self.sig.k_label()).is_none() {
            return Err(Error::validation(format!(
                "rule `{}`: lhs must mention the k cell",
                rule.name
            )));
        }
        for (label, _) in rhs.iter() {
            if lhs.get(label).is_none() {
                return Err(Error::validation(format!(
                    "rule `{}`: rhs cell `{label}` not present in lhs",
                    rule.name
                )));
            }
        }
        self.sig
            .check_term(&rule.lhs, None)
            .map_err(|e| Error::validation(format!("rule `{}`: {e}", rule.name)))?;
        self.sig
            .check_term(&rule.rhs, None)
            .map_err(|e| Error::validation(format!("rule `{}`: {e}", rule.name)))?;
        let bound = free_vars(&rule.lhs);
        let mut used = free_vars(&rule.rhs);
        used.extend(rule.requires.free_vars());
        for v in used.difference(&bound) {
            return Err(Error::validation(format!(
                "rule `{}`: variable `{v}` not bound by the lhs",
                rule.name
            )));
        }
        Ok(())
    }

    pub fn index(&self) -> &RuleIndex {
        &self.index
    }

    /// Rule candidates for a configuration, ordered by priority then
    /// declaration order.
    pub fn candidates_for(&self, config: &TermRef) -> Vec<usize> {
        let bag = match config.as_cells() {
            Some(b) => b,
            None => return Vec::new(),
        };
        let body = match bag.get(&self.sig.k_label()) {
            Some(b) => b,
            None => return Vec::new(),
        };
        self.index.candidates(&self.rules, body)
    }
}

/// Add compiled rules at the compiled priority band; original rules stay
/// untouched as fallback. Name clashes get a numeric suffix.
pub fn integrate(sem: &Semantics, compiled: &[Rule]) -> Result<Semantics> {
    let mut rules = sem.rules.clone();
    let mut names: BTreeSet<Ident> = rules.iter().map(|r| r.name.clone()).collect();
    for rule in compiled {
        let mut rule = rule.clone();
        rule.priority = PRIORITY_COMPILED;
        if names.contains(&rule.name) {
            let mut n = 2;
            loop {
                let candidate = Ident::new(&format!("{}-{}", rule.name, n));
                if !names.contains(&candidate) {
                    rule.name = candidate;
                    break;
                }
                n += 1;
            }
        }
        names.insert(rule.name.clone());
        rules.push(rule);
    }
    Semantics::new(sem.name.clone(), sem.sig.clone(), rules)
}

/// How the proof search recognizes two states as visits of one loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SameLoopPolicy {
    /// Equal k-cell head constructor, plus an equal program-counter cell
    /// when the semantics declares one.
    Default,
    /// Equal k-cell head constructor plus the listed cells equal.
    HeadAndCells(Vec<Ident>),
    Off,
}

/// When a state counts as a valid endpoint of the compilation unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TerminalPolicy {
    /// Subsumed by the final specification, or no rule applies.
    SpecFinalOrStuck,
    /// Only subsumption by the final specification.
    SpecFinalOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecOptions {
    pub sameloop: SameLoopPolicy,
    pub terminal: TerminalPolicy,
}

impl Default for SpecOptions {
    fn default() -> Self {
        SpecOptions {
            sameloop: SameLoopPolicy::Default,
            terminal: TerminalPolicy::SpecFinalOrStuck,
        }
    }
}

/// A compilation unit: initial and final constrained configurations.
#[derive(Clone, Debug)]
pub struct ProgramSpec {
    pub name: Ident,
    pub init: CTerm,
    pub final_state: CTerm,
    pub options: SpecOptions,
}

impl ProgramSpec {
    pub fn new(
        name: Ident,
        init: CTerm,
        final_state: CTerm,
        options: SpecOptions,
        sem: &Semantics,
    ) -> Result<ProgramSpec> {
        sem.sig.check_config(&init.config)?;
        sem.sig.check_config(&final_state.config)?;
        Ok(ProgramSpec {
            name,
            init,
            final_state,
            options,
        })
    }
}
