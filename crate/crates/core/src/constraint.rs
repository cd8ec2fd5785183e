//! The constraint language: boolean combinations (negation normal form, with
//! flattened conjunctions) of comparison atoms over linear integer
//! expressions, boolean terms, and equalities between constructor terms.
//!
//! Constraints reuse `Term` for atom operands, so substitution and printing
//! share one infrastructure with configurations.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::linear::{linearize, LinExpr};
use crate::term::{apply_subst, free_vars, Ident, Sort, Subst, Term, TermRef};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn negated(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    pub fn eval(self, l: &BigInt, r: &BigInt) -> bool {
        match self {
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Gt => l > r,
            CmpOp::Ge => l >= r,
        }
    }

    /// The `Int`-suffixed surface spelling.
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==Int",
            CmpOp::Ne => "=/=Int",
            CmpOp::Lt => "<Int",
            CmpOp::Le => "<=Int",
            CmpOp::Gt => ">Int",
            CmpOp::Ge => ">=Int",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Atom {
    /// Integer comparison; operands keep their surface form.
    Cmp(CmpOp, TermRef, TermRef),
    /// A Bool-sorted term (variable or opaque application) asserted true.
    BoolTerm(TermRef),
    /// Structural equality between constructor terms.
    TermEq(TermRef, TermRef),
}

/// Negation normal form: `Neg` only ever wraps `BoolTerm` and `TermEq`
/// (comparison negations flip the operator instead). `And([])` is `true`,
/// `Or([])` is `false`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Constraint {
    And(Vec<Constraint>),
    Or(Vec<Constraint>),
    Pos(Atom),
    Neg(Atom),
}

impl Constraint {
    pub fn tt() -> Constraint {
        Constraint::And(Vec::new())
    }

    pub fn ff() -> Constraint {
        Constraint::Or(Vec::new())
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Constraint::And(cs) if cs.is_empty())
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Constraint::Or(cs) if cs.is_empty())
    }

    pub fn and(parts: Vec<Constraint>) -> Constraint {
        simplify(Constraint::And(parts))
    }

    /// Top-level conjuncts (the constraint itself if not `And`-rooted).
    pub fn conjuncts(&self) -> Vec<Constraint> {
        match self {
            Constraint::And(cs) => cs.clone(),
            other => vec![other.clone()],
        }
    }

    /// NNF negation.
    pub fn negated(&self) -> Constraint {
        match self {
            Constraint::And(cs) => Constraint::Or(cs.iter().map(|c| c.negated()).collect()),
            Constraint::Or(cs) => Constraint::And(cs.iter().map(|c| c.negated()).collect()),
            Constraint::Pos(Atom::Cmp(op, l, r)) => {
                Constraint::Pos(Atom::Cmp(op.negated(), l.clone(), r.clone()))
            }
            Constraint::Pos(a) => Constraint::Neg(a.clone()),
            Constraint::Neg(a) => Constraint::Pos(a.clone()),
        }
    }

    pub fn free_vars(&self) -> std::collections::BTreeSet<Ident> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_terms(&mut |t| out.extend(free_vars(t)));
        out
    }

    pub fn visit_terms(&self, f: &mut impl FnMut(&TermRef)) {
        match self {
            Constraint::And(cs) | Constraint::Or(cs) => {
                for c in cs {
                    c.visit_terms(f);
                }
            }
            Constraint::Pos(a) | Constraint::Neg(a) => match a {
                Atom::Cmp(_, l, r) | Atom::TermEq(l, r) => {
                    f(l);
                    f(r);
                }
                Atom::BoolTerm(t) => f(t),
            },
        }
    }

    /// Map every atom operand through `f` and re-normalize. Used for
    /// substitution (where an atom may turn into a boolean combination) and
    /// for hook evaluation after instantiation.
    pub fn map_terms(&self, f: &mut impl FnMut(&TermRef) -> TermRef) -> Constraint {
        let mapped = self.map_terms_raw(f);
        simplify(mapped)
    }

    fn map_terms_raw(&self, f: &mut impl FnMut(&TermRef) -> TermRef) -> Constraint {
        match self {
            Constraint::And(cs) => Constraint::And(cs.iter().map(|c| c.map_terms_raw(f)).collect()),
            Constraint::Or(cs) => Constraint::Or(cs.iter().map(|c| c.map_terms_raw(f)).collect()),
            Constraint::Pos(a) => rebuild_atom(a, f, false),
            Constraint::Neg(a) => rebuild_atom(a, f, true),
        }
    }
}

fn rebuild_atom(a: &Atom, f: &mut impl FnMut(&TermRef) -> TermRef, negate: bool) -> Constraint {
    let c = match a {
        Atom::Cmp(op, l, r) => Constraint::Pos(Atom::Cmp(*op, f(l), f(r))),
        Atom::TermEq(l, r) => Constraint::Pos(Atom::TermEq(f(l), f(r))),
        // A substituted boolean variable may become a full boolean term, so
        // re-run the term-to-constraint conversion.
        Atom::BoolTerm(t) => from_bool_term(&f(t)),
    };
    if negate {
        c.negated()
    } else {
        c
    }
}

/// Apply a substitution to a constraint, re-normalizing.
pub fn subst_constraint(s: &Subst, c: &Constraint) -> Constraint {
    if s.is_empty() {
        return c.clone();
    }
    c.clone().map_terms(&mut |t| apply_subst(s, t))
}

/// Convert a Bool-sorted term into a constraint, interpreting the builtin
/// connectives and comparisons.
pub fn from_bool_term(t: &TermRef) -> Constraint {
    match &**t {
        Term::Bool(true) => Constraint::tt(),
        Term::Bool(false) => Constraint::ff(),
        Term::App(a) => match (a.ctor.as_str(), a.args.len()) {
            ("andBool", 2) => {
                Constraint::And(vec![from_bool_term(&a.args[0]), from_bool_term(&a.args[1])])
            }
            ("orBool", 2) => {
                Constraint::Or(vec![from_bool_term(&a.args[0]), from_bool_term(&a.args[1])])
            }
            ("notBool", 1) => from_bool_term(&a.args[0]).negated(),
            (op, 2) if cmp_of(op).is_some() => Constraint::Pos(Atom::Cmp(
                cmp_of(op).unwrap(),
                a.args[0].clone(),
                a.args[1].clone(),
            )),
            ("==K", 2) | ("==Bool", 2) => {
                Constraint::Pos(Atom::TermEq(a.args[0].clone(), a.args[1].clone()))
            }
            ("=/=K", 2) | ("=/=Bool", 2) => {
                Constraint::Neg(Atom::TermEq(a.args[0].clone(), a.args[1].clone()))
            }
            _ => Constraint::Pos(Atom::BoolTerm(t.clone())),
        },
        _ => Constraint::Pos(Atom::BoolTerm(t.clone())),
    }
}

fn cmp_of(op: &str) -> Option<CmpOp> {
    match op {
        "==Int" => Some(CmpOp::Eq),
        "=/=Int" => Some(CmpOp::Ne),
        "<Int" => Some(CmpOp::Lt),
        "<=Int" => Some(CmpOp::Le),
        ">Int" => Some(CmpOp::Gt),
        ">=Int" => Some(CmpOp::Ge),
        _ => None,
    }
}

/// Convert back to a Bool-sorted term (for printing and serialization).
pub fn to_bool_term(c: &Constraint) -> TermRef {
    let b = Sort::bool();
    match c {
        Constraint::And(cs) => {
            if cs.is_empty() {
                Term::boolean(true)
            } else {
                cs.iter()
                    .map(to_bool_term)
                    .reduce(|l, r| Term::app("andBool", b.clone(), vec![l, r]))
                    .unwrap()
            }
        }
        Constraint::Or(cs) => {
            if cs.is_empty() {
                Term::boolean(false)
            } else {
                cs.iter()
                    .map(to_bool_term)
                    .reduce(|l, r| Term::app("orBool", b.clone(), vec![l, r]))
                    .unwrap()
            }
        }
        Constraint::Pos(a) => atom_to_term(a),
        Constraint::Neg(a) => Term::app("notBool", b, vec![atom_to_term(a)]),
    }
}

fn atom_to_term(a: &Atom) -> TermRef {
    let b = Sort::bool();
    match a {
        Atom::Cmp(op, l, r) => Term::app(op.symbol(), b, vec![l.clone(), r.clone()]),
        Atom::BoolTerm(t) => t.clone(),
        Atom::TermEq(l, r) => Term::app("==K", b, vec![l.clone(), r.clone()]),
    }
}

// ------------------------------------------------------------------
// Canonical forms
// ------------------------------------------------------------------

/// Canonical literal shape of a comparison: `expr <= 0`, `expr = 0` or
/// `expr != 0`, gcd-reduced (with integer tightening for `<=`) and
/// sign-normalized for `=`/`!=`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinAtom {
    Le(LinExpr),
    EqZ(LinExpr),
    NeZ(LinExpr),
}

pub fn canon_cmp(op: CmpOp, l: &TermRef, r: &TermRef) -> LinAtom {
    let ll = linearize(l);
    let rr = linearize(r);
    match op {
        CmpOp::Lt => LinAtom::Le(tighten(ll - rr + LinExpr::constant(1))),
        CmpOp::Le => LinAtom::Le(tighten(ll - rr)),
        CmpOp::Gt => LinAtom::Le(tighten(rr - ll + LinExpr::constant(1))),
        CmpOp::Ge => LinAtom::Le(tighten(rr - ll)),
        CmpOp::Eq => LinAtom::EqZ(sign_normal(ll - rr)),
        CmpOp::Ne => LinAtom::NeZ(sign_normal(ll - rr)),
    }
}

/// Divide `lin <= 0` by the gcd of its coefficients, tightening the constant
/// to the integer hull.
fn tighten(lin: LinExpr) -> LinExpr {
    if lin.coeffs.is_empty() {
        return lin;
    }
    let mut g = BigInt::zero();
    for c in lin.coeffs.values() {
        g = g.gcd(c);
    }
    if g <= BigInt::from(1) {
        return lin;
    }
    // g*y + c <= 0  <=>  y + ceil(c/g) <= 0
    let constant = lin.constant.div_ceil(&g);
    LinExpr {
        coeffs: lin.coeffs.into_iter().map(|(t, c)| (t, c / &g)).collect(),
        constant,
    }
}

fn sign_normal(lin: LinExpr) -> LinExpr {
    let mut lin = lin;
    if lin.coeffs.is_empty() {
        if lin.constant.is_negative() {
            lin.constant = -lin.constant;
        }
        return lin;
    }
    let mut g = BigInt::zero();
    for c in lin.coeffs.values() {
        g = g.gcd(c);
    }
    g = g.gcd(&lin.constant);
    if g > BigInt::from(1) {
        lin = LinExpr {
            coeffs: lin.coeffs.into_iter().map(|(t, c)| (t, c / &g)).collect(),
            constant: &lin.constant / &g,
        };
    }
    let negate = lin
        .coeffs
        .values()
        .next()
        .map(|c| c.is_negative())
        .unwrap_or(false);
    if negate {
        -lin
    } else {
        lin
    }
}

/// Ordered canonical key of a constraint, used to deduplicate conjuncts and
/// to intersect constraint sets syntactically.
pub fn canon_key(c: &Constraint) -> String {
    match c {
        Constraint::And(cs) => {
            let mut parts: Vec<String> = cs.iter().map(canon_key).collect();
            parts.sort();
            format!("and({})", parts.join(","))
        }
        Constraint::Or(cs) => {
            let mut parts: Vec<String> = cs.iter().map(canon_key).collect();
            parts.sort();
            format!("or({})", parts.join(","))
        }
        Constraint::Pos(Atom::Cmp(op, l, r)) => lin_atom_key(&canon_cmp(*op, l, r)),
        Constraint::Pos(Atom::BoolTerm(t)) => format!("b+({})", term_key(t)),
        Constraint::Neg(Atom::BoolTerm(t)) => format!("b-({})", term_key(t)),
        Constraint::Pos(Atom::TermEq(l, r)) => {
            let (a, b) = ordered_pair(l, r);
            format!("te+({},{})", a, b)
        }
        Constraint::Neg(Atom::TermEq(l, r)) => {
            let (a, b) = ordered_pair(l, r);
            format!("te-({},{})", a, b)
        }
        Constraint::Neg(Atom::Cmp(..)) => unreachable!("comparison negations are normalized away"),
    }
}

fn ordered_pair(l: &TermRef, r: &TermRef) -> (String, String) {
    let a = term_key(l);
    let b = term_key(r);
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn lin_atom_key(a: &LinAtom) -> String {
    match a {
        LinAtom::Le(l) => format!("le({})", lin_key(l)),
        LinAtom::EqZ(l) => format!("eq({})", lin_key(l)),
        LinAtom::NeZ(l) => format!("ne({})", lin_key(l)),
    }
}

fn coeff_key(l: &LinExpr) -> String {
    l.coeffs
        .iter()
        .map(|(t, c)| format!("{}*{}", c, term_key(t)))
        .collect::<Vec<_>>()
        .join("+")
}

fn lin_key(l: &LinExpr) -> String {
    let mut parts: Vec<String> = l
        .coeffs
        .iter()
        .map(|(t, c)| format!("{}*{}", c, term_key(t)))
        .collect();
    parts.push(l.constant.to_string());
    parts.join("+")
}

/// Signature-free canonical rendering of a term, for use as a map key.
pub fn term_key(t: &TermRef) -> String {
    match &**t {
        Term::Var(v) => format!("{}:{}", v.name, v.sort),
        Term::Int(n) => n.to_string(),
        Term::Bool(b) => b.to_string(),
        Term::App(a) => {
            let args: Vec<String> = a.args.iter().map(term_key).collect();
            format!("{}({})", a.ctor, args.join(","))
        }
        Term::Cells(c) => {
            let cells: Vec<String> = c
                .iter()
                .map(|(l, b)| format!("{}={}", l, term_key(b)))
                .collect();
            format!("{{{}}}", cells.join(","))
        }
    }
}

// ------------------------------------------------------------------
// Simplification
// ------------------------------------------------------------------

/// Normalize: flatten and/or, evaluate ground atoms, decompose constructor
/// equalities, propagate unit equalities, deduplicate by canonical key and
/// order conjuncts canonically. The result is logically equivalent.
pub fn simplify(c: Constraint) -> Constraint {
    // A couple of rounds lets unit propagation feed ground evaluation.
    let mut cur = simplify_once(c);
    for _ in 0..3 {
        let next = simplify_once(cur.clone());
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn simplify_once(c: Constraint) -> Constraint {
    match c {
        Constraint::And(parts) => {
            let mut flat: Vec<Constraint> = Vec::new();
            for p in parts {
                let p = simplify_once(p);
                match p {
                    Constraint::And(inner) => flat.extend(inner),
                    other => {
                        if other.is_false() {
                            return Constraint::ff();
                        }
                        if !other.is_true() {
                            flat.push(other);
                        }
                    }
                }
            }
            let flat = match propagate_units(flat) {
                Some(parts) => parts,
                None => return Constraint::ff(),
            };
            let mut seen = BTreeMap::new();
            for p in flat {
                if p.is_false() {
                    return Constraint::ff();
                }
                if p.is_true() {
                    continue;
                }
                seen.entry(canon_key(&p)).or_insert(p);
            }
            // Among `<=`-atoms over the same linear expression keep only the
            // tightest bound.
            let mut tightest: BTreeMap<String, BigInt> = BTreeMap::new();
            for p in seen.values() {
                if let Constraint::Pos(Atom::Cmp(op, l, r)) = p {
                    if let LinAtom::Le(lin) = canon_cmp(*op, l, r) {
                        let key = coeff_key(&lin);
                        let entry = tightest.entry(key).or_insert_with(|| lin.constant.clone());
                        if lin.constant > *entry {
                            *entry = lin.constant;
                        }
                    }
                }
            }
            let out: Vec<Constraint> = seen
                .into_values()
                .filter(|p| {
                    if let Constraint::Pos(Atom::Cmp(op, l, r)) = p {
                        if let LinAtom::Le(lin) = canon_cmp(*op, l, r) {
                            return tightest.get(&coeff_key(&lin)) == Some(&lin.constant);
                        }
                    }
                    true
                })
                .collect();
            if out.len() == 1 {
                out.into_iter().next().unwrap()
            } else {
                Constraint::And(out)
            }
        }
        Constraint::Or(parts) => {
            let mut flat: Vec<Constraint> = Vec::new();
            for p in parts {
                let p = simplify_once(p);
                match p {
                    Constraint::Or(inner) => flat.extend(inner),
                    other => {
                        if other.is_true() {
                            return Constraint::tt();
                        }
                        if !other.is_false() {
                            flat.push(other);
                        }
                    }
                }
            }
            let mut seen = BTreeMap::new();
            for p in flat {
                seen.entry(canon_key(&p)).or_insert(p);
            }
            let out: Vec<Constraint> = seen.into_values().collect();
            if out.len() == 1 {
                out.into_iter().next().unwrap()
            } else {
                Constraint::Or(out)
            }
        }
        Constraint::Pos(a) => eval_atom(a, false),
        Constraint::Neg(a) => eval_atom(a, true),
    }
}

fn eval_atom(a: Atom, negated: bool) -> Constraint {
    let lit = |b: bool| {
        if b {
            Constraint::tt()
        } else {
            Constraint::ff()
        }
    };
    let c = match &a {
        Atom::Cmp(op, l, r) => match canon_cmp(*op, l, r) {
            LinAtom::Le(lin) if lin.is_constant() => lit(lin.constant <= BigInt::zero()),
            LinAtom::EqZ(lin) if lin.is_constant() => lit(lin.constant.is_zero()),
            LinAtom::NeZ(lin) if lin.is_constant() => lit(!lin.constant.is_zero()),
            _ => Constraint::Pos(a),
        },
        Atom::BoolTerm(t) => from_bool_term(t),
        Atom::TermEq(l, r) => {
            if l == r {
                lit(true)
            } else {
                match (&**l, &**r) {
                    (Term::App(la), Term::App(ra)) => {
                        if la.ctor != ra.ctor || la.args.len() != ra.args.len() {
                            lit(false)
                        } else {
                            // Injectivity: decompose argument-wise.
                            let parts = la
                                .args
                                .iter()
                                .zip(ra.args.iter())
                                .map(|(x, y)| equality_of(x, y))
                                .collect();
                            simplify_once(Constraint::And(parts))
                        }
                    }
                    (Term::Int(_), Term::Int(_)) | (Term::Bool(_), Term::Bool(_)) => lit(false),
                    _ => Constraint::Pos(a),
                }
            }
        }
    };
    if negated {
        // The atom may have simplified; re-normalize the negation.
        match c {
            Constraint::Pos(a) => Constraint::Pos(a).negated(),
            other => simplify_once(other.negated()),
        }
    } else {
        c
    }
}

fn equality_of(l: &TermRef, r: &TermRef) -> Constraint {
    if l.sort() == Sort::int() || r.sort() == Sort::int() {
        Constraint::Pos(Atom::Cmp(CmpOp::Eq, l.clone(), r.clone()))
    } else if l.sort() == Sort::bool() && r.sort() == Sort::bool() {
        // Logical iff, expanded.
        let a = from_bool_term(l);
        let b = from_bool_term(r);
        Constraint::Or(vec![
            Constraint::And(vec![a.clone(), b.clone()]),
            Constraint::And(vec![a.negated(), b.negated()]),
        ])
    } else {
        Constraint::Pos(Atom::TermEq(l.clone(), r.clone()))
    }
}

/// Unit propagation within a conjunction: `X = <ground int>`, `X = <ground
/// term>`, `B` and `notBool B` (for variables) are substituted into sibling
/// conjuncts. The defining conjuncts themselves are kept. `None` signals a
/// contradiction between two unit definitions of the same variable.
fn propagate_units(parts: Vec<Constraint>) -> Option<Vec<Constraint>> {
    let mut units: Subst = Subst::new();
    let mut define = |name: &Ident, image: TermRef| -> bool {
        match units.get(name) {
            Some(prev) => *prev == image,
            None => {
                units.insert(name.clone(), image);
                true
            }
        }
    };
    for p in &parts {
        let consistent = match p {
            Constraint::Pos(Atom::Cmp(CmpOp::Eq, l, r)) => {
                if let (Term::Var(v), Term::Int(_)) = (&**l, &**r) {
                    define(&v.name, r.clone())
                } else if let (Term::Int(_), Term::Var(v)) = (&**l, &**r) {
                    define(&v.name, l.clone())
                } else {
                    true
                }
            }
            Constraint::Pos(Atom::TermEq(l, r)) => {
                if let (Term::Var(v), true) = (&**l, r.is_ground()) {
                    define(&v.name, r.clone())
                } else if let (Term::Var(v), true) = (&**r, l.is_ground()) {
                    define(&v.name, l.clone())
                } else {
                    true
                }
            }
            Constraint::Pos(Atom::BoolTerm(t)) => {
                if let Term::Var(v) = &**t {
                    define(&v.name, Term::boolean(true))
                } else {
                    true
                }
            }
            Constraint::Neg(Atom::BoolTerm(t)) => {
                if let Term::Var(v) = &**t {
                    define(&v.name, Term::boolean(false))
                } else {
                    true
                }
            }
            _ => true,
        };
        if !consistent {
            return None;
        }
    }
    if units.is_empty() {
        return Some(parts);
    }
    Some(
        parts
            .into_iter()
            .map(|p| {
                let defines_unit = match &p {
                    Constraint::Pos(Atom::Cmp(CmpOp::Eq, l, r)) => {
                        matches!((&**l, &**r), (Term::Var(_), _) | (_, Term::Var(_)))
                    }
                    Constraint::Pos(Atom::TermEq(l, r)) => {
                        matches!(&**l, Term::Var(_)) || matches!(&**r, Term::Var(_))
                    }
                    Constraint::Pos(Atom::BoolTerm(t)) | Constraint::Neg(Atom::BoolTerm(t)) => {
                        matches!(&**t, Term::Var(_))
                    }
                    _ => false,
                };
                if defines_unit {
                    p
                } else {
                    simplify_once(subst_raw(&units, &p))
                }
            })
            .collect(),
    )
}

fn subst_raw(s: &Subst, c: &Constraint) -> Constraint {
    match c {
        Constraint::And(cs) => Constraint::And(cs.iter().map(|x| subst_raw(s, x)).collect()),
        Constraint::Or(cs) => Constraint::Or(cs.iter().map(|x| subst_raw(s, x)).collect()),
        Constraint::Pos(a) => rebuild_atom(a, &mut |t| apply_subst(s, t), false),
        Constraint::Neg(a) => rebuild_atom(a, &mut |t| apply_subst(s, t), true),
    }
}

/// Conjunction of the conjuncts appearing (by canonical key) in both inputs.
pub fn common_constraints(c1: &Constraint, c2: &Constraint) -> Constraint {
    let left = c1.conjuncts();
    let right: std::collections::BTreeSet<String> = c2.conjuncts().iter().map(canon_key).collect();
    let shared: Vec<Constraint> = left
        .into_iter()
        .filter(|c| right.contains(&canon_key(c)))
        .collect();
    simplify(Constraint::And(shared))
}

// ------------------------------------------------------------------
// Constrained terms and constrained substitutions
// ------------------------------------------------------------------

/// A configuration term together with its path constraint.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CTerm {
    pub config: TermRef,
    pub constraint: Constraint,
}

impl CTerm {
    pub fn new(config: TermRef, constraint: Constraint) -> CTerm {
        CTerm {
            config,
            constraint: simplify(constraint),
        }
    }

    pub fn unconstrained(config: TermRef) -> CTerm {
        CTerm {
            config,
            constraint: Constraint::tt(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.config.is_ground() && self.constraint.is_true()
    }
}

/// A structural substitution paired with a constraint conjunction.
/// Application yields `(s(config), s(constraint) ∧ extra)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CSubst {
    pub subst: Subst,
    pub constraint: Constraint,
}

impl CSubst {
    pub fn new(subst: Subst, constraint: Constraint) -> CSubst {
        CSubst {
            subst,
            constraint: simplify(constraint),
        }
    }

    pub fn identity() -> CSubst {
        CSubst {
            subst: Subst::new(),
            constraint: Constraint::tt(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.subst.is_empty() && self.constraint.is_true()
    }
}

pub fn csubst_apply(a: &CSubst, t: &CTerm) -> CTerm {
    let config = apply_subst(&a.subst, &t.config);
    let constraint = Constraint::And(vec![
        subst_constraint(&a.subst, &t.constraint),
        a.constraint.clone(),
    ]);
    CTerm::new(config, constraint)
}

/// `compose(first, second)` applies like `second ∘ first`:
/// `csubst_apply(compose(a, b), t) == csubst_apply(b, csubst_apply(a, t))`.
pub fn csubst_compose(first: &CSubst, second: &CSubst) -> CSubst {
    let subst = Subst::compose(&first.subst, &second.subst);
    let constraint = Constraint::And(vec![
        subst_constraint(&second.subst, &first.constraint),
        second.constraint.clone(),
    ]);
    CSubst::new(subst, constraint)
}

/// Group helper: conjoin two constraints without building vectors by hand.
pub fn conj(a: &Constraint, b: &Constraint) -> Constraint {
    simplify(Constraint::And(vec![a.clone(), b.clone()]))
}

pub fn cmp(op: CmpOp, l: TermRef, r: TermRef) -> Constraint {
    simplify(Constraint::Pos(Atom::Cmp(op, l, r)))
}

impl From<Atom> for Constraint {
    fn from(a: Atom) -> Self {
        Constraint::Pos(a)
    }
}

pub fn bool_var(name: &str) -> TermRef {
    Term::var(name, Sort::bool())
}

pub fn int_var(name: &str) -> TermRef {
    Term::var(name, Sort::int())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> TermRef {
        int_var("X")
    }

    #[test]
    fn simplify_drops_ground_true_atoms() {
        // 3 > 2 ∧ X > 0  ==>  X > 0
        let c = Constraint::And(vec![
            cmp(CmpOp::Gt, Term::int(3), Term::int(2)),
            Constraint::Pos(Atom::Cmp(CmpOp::Gt, x(), Term::int(0))),
        ]);
        let s = simplify(c);
        assert_eq!(s, Constraint::Pos(Atom::Cmp(CmpOp::Gt, x(), Term::int(0))));
    }

    #[test]
    fn simplify_detects_conflicting_equalities() {
        let c = Constraint::And(vec![
            Constraint::Pos(Atom::Cmp(CmpOp::Eq, x(), Term::int(1))),
            Constraint::Pos(Atom::Cmp(CmpOp::Eq, x(), Term::int(2))),
        ]);
        assert!(simplify(c).is_false());
    }

    #[test]
    fn simplify_true_conjunction() {
        let c = Constraint::And(vec![Constraint::tt(), Constraint::tt()]);
        assert!(simplify(c).is_true());
    }

    #[test]
    fn unit_propagation_evaluates_siblings() {
        // X = 5 ∧ X > 0  ==>  X = 5
        let c = Constraint::And(vec![
            Constraint::Pos(Atom::Cmp(CmpOp::Eq, x(), Term::int(5))),
            Constraint::Pos(Atom::Cmp(CmpOp::Gt, x(), Term::int(0))),
        ]);
        let s = simplify(c);
        assert_eq!(s, Constraint::Pos(Atom::Cmp(CmpOp::Eq, x(), Term::int(5))));
    }

    #[test]
    fn common_constraints_intersects_atoms() {
        let g = int_var("G");
        let i = int_var("I");
        let c1 = simplify(Constraint::And(vec![
            Constraint::Pos(Atom::Cmp(CmpOp::Ge, g.clone(), Term::int(3))),
            Constraint::Pos(Atom::Cmp(CmpOp::Lt, i.clone(), Term::int(1000))),
        ]));
        let c2 = simplify(Constraint::And(vec![
            Constraint::Pos(Atom::Cmp(CmpOp::Ge, g.clone(), Term::int(3))),
            Constraint::Pos(Atom::Cmp(CmpOp::Lt, i.clone(), Term::int(999))),
        ]));
        let shared = common_constraints(&c1, &c2);
        assert_eq!(
            shared,
            Constraint::Pos(Atom::Cmp(CmpOp::Ge, g, Term::int(3)))
        );
    }

    #[test]
    fn common_constraints_identity() {
        let c = simplify(Constraint::And(vec![
            Constraint::Pos(Atom::Cmp(CmpOp::Ge, int_var("G"), Term::int(3))),
            Constraint::Pos(Atom::BoolTerm(bool_var("B"))),
        ]));
        assert_eq!(common_constraints(&c, &c), c);
    }

    #[test]
    fn canon_key_identifies_equivalent_spellings() {
        // 2 + s >= 2  and  s >= 0 share a canonical key.
        let s_ = int_var("s");
        let a = Constraint::Pos(Atom::Cmp(
            CmpOp::Ge,
            Term::app("+Int", Sort::int(), vec![Term::int(2), s_.clone()]),
            Term::int(2),
        ));
        let b = Constraint::Pos(Atom::Cmp(CmpOp::Ge, s_, Term::int(0)));
        assert_eq!(canon_key(&a), canon_key(&b));
    }

    #[test]
    fn csubst_apply_identity() {
        let t = CTerm::new(
            x(),
            Constraint::Pos(Atom::Cmp(CmpOp::Gt, x(), Term::int(0))),
        );
        assert_eq!(csubst_apply(&CSubst::identity(), &t), t);
    }

    #[test]
    fn csubst_apply_substitutes_and_simplifies() {
        let t = CTerm::new(
            x(),
            Constraint::Pos(Atom::Cmp(CmpOp::Gt, x(), Term::int(0))),
        );
        let a = CSubst::new(Subst::singleton("X", Term::int(3)), Constraint::tt());
        let applied = csubst_apply(&a, &t);
        assert_eq!(applied.config, Term::int(3));
        assert!(applied.constraint.is_true());
    }

    #[test]
    fn csubst_compose_law() {
        let t = CTerm::new(
            Term::app("f", Sort::int(), vec![x()]),
            Constraint::Pos(Atom::Cmp(CmpOp::Ge, x(), Term::int(0))),
        );
        let a = CSubst::new(
            Subst::singleton("X", int_var("Y")),
            Constraint::Pos(Atom::Cmp(CmpOp::Lt, int_var("Y"), Term::int(10))),
        );
        let b = CSubst::new(Subst::singleton("Y", Term::int(4)), Constraint::tt());
        let composed = csubst_compose(&a, &b);
        assert_eq!(
            csubst_apply(&composed, &t),
            csubst_apply(&b, &csubst_apply(&a, &t))
        );
    }

    #[test]
    fn negation_flips_comparisons_without_neg_nodes() {
        let c = Constraint::Pos(Atom::Cmp(CmpOp::Lt, x(), Term::int(5)));
        let n = c.negated();
        assert_eq!(n, Constraint::Pos(Atom::Cmp(CmpOp::Ge, x(), Term::int(5))));
    }
}
