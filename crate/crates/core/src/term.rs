//! Sorted first-order terms, substitutions, one-way structural matching and
//! anti-unification (least general generalization).
//!
//! Terms are immutable and shared through `Arc`, so cloning a term is cheap
//! and terms can be moved freely across threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Interned-ish identifier: cheap to clone, ordered, hashable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident(Arc<str>);

impl Ident {
    pub fn new(s: &str) -> Self {
        Ident(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A sort (type) name. `Int`, `Bool`, `K`, `KItem` and `Cells` are built in;
/// everything else comes from the semantics file.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(pub Ident);

impl Sort {
    pub fn new(s: &str) -> Self {
        Sort(Ident::new(s))
    }

    pub fn int() -> Self {
        Sort::new("Int")
    }

    pub fn bool() -> Self {
        Sort::new("Bool")
    }

    /// Computation sequences (the body of a `k` cell).
    pub fn k() -> Self {
        Sort::new("K")
    }

    /// Any single item of a computation sequence.
    pub fn k_item() -> Self {
        Sort::new("KItem")
    }

    /// Pseudo-sort of a cell bag.
    pub fn cells() -> Self {
        Sort::new("Cells")
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self.0.as_str(), "Int" | "Bool" | "K" | "KItem" | "Cells")
    }

    pub fn name(&self) -> &str {
        self.0.as_str()
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type TermRef = Arc<Term>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Var {
    pub name: Ident,
    pub sort: Sort,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct App {
    pub ctor: Ident,
    pub sort: Sort,
    pub args: Vec<TermRef>,
}

/// A bag of labeled cells, kept sorted by label so that structural equality
/// is insensitive to the order cells were written in.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct CellBag {
    cells: Vec<(Ident, TermRef)>,
}

impl CellBag {
    pub fn new(mut cells: Vec<(Ident, TermRef)>) -> Result<Self> {
        cells.sort_by(|a, b| a.0.cmp(&b.0));
        for w in cells.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::validation(format!(
                    "duplicate cell label `{}`",
                    w[0].0
                )));
            }
        }
        Ok(CellBag { cells })
    }

    pub fn get(&self, label: &Ident) -> Option<&TermRef> {
        self.cells
            .binary_search_by(|(l, _)| l.cmp(label))
            .ok()
            .map(|i| &self.cells[i].1)
    }

    pub fn labels(&self) -> impl Iterator<Item = &Ident> {
        self.cells.iter().map(|(l, _)| l)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Ident, TermRef)> {
        self.cells.iter()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// New bag with the given cells replaced. Labels must already exist.
    pub fn with_cells(&self, updates: &BTreeMap<Ident, TermRef>) -> Result<Self> {
        let mut cells = self.cells.clone();
        for (label, term) in updates {
            match cells.binary_search_by(|(l, _)| l.cmp(label)) {
                Ok(i) => cells[i].1 = term.clone(),
                Err(_) => {
                    return Err(Error::validation(format!("unknown cell label `{label}`")));
                }
            }
        }
        Ok(CellBag { cells })
    }

    /// Sub-bag restricted to the given labels (all of which must exist).
    pub fn restrict(&self, labels: &[Ident]) -> Result<Self> {
        let mut cells = Vec::with_capacity(labels.len());
        for label in labels {
            match self.get(label) {
                Some(t) => cells.push((label.clone(), t.clone())),
                None => return Err(Error::validation(format!("unknown cell label `{label}`"))),
            }
        }
        CellBag::new(cells)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(Var),
    Int(BigInt),
    Bool(bool),
    App(App),
    Cells(CellBag),
}

impl Term {
    pub fn var(name: impl Into<Ident>, sort: Sort) -> TermRef {
        Arc::new(Term::Var(Var {
            name: name.into(),
            sort,
        }))
    }

    pub fn int(v: impl Into<BigInt>) -> TermRef {
        Arc::new(Term::Int(v.into()))
    }

    pub fn boolean(v: bool) -> TermRef {
        Arc::new(Term::Bool(v))
    }

    pub fn app(ctor: impl Into<Ident>, sort: Sort, args: Vec<TermRef>) -> TermRef {
        Arc::new(Term::App(App {
            ctor: ctor.into(),
            sort,
            args,
        }))
    }

    pub fn cells(bag: CellBag) -> TermRef {
        Arc::new(Term::Cells(bag))
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort.clone(),
            Term::Int(_) => Sort::int(),
            Term::Bool(_) => Sort::bool(),
            Term::App(a) => a.sort.clone(),
            Term::Cells(_) => Sort::cells(),
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Term::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Term::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_app(&self) -> Option<&App> {
        match self {
            Term::App(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_cells(&self) -> Option<&CellBag> {
        match self {
            Term::Cells(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Int(_) | Term::Bool(_) => true,
            Term::App(a) => a.args.iter().all(|t| t.is_ground()),
            Term::Cells(c) => c.iter().all(|(_, t)| t.is_ground()),
        }
    }
}

/// Exact set of variables occurring in `t`.
pub fn free_vars(t: &Term) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    collect_vars(t, &mut out);
    out
}

fn collect_vars(t: &Term, out: &mut BTreeSet<Ident>) {
    match t {
        Term::Var(v) => {
            out.insert(v.name.clone());
        }
        Term::Int(_) | Term::Bool(_) => {}
        Term::App(a) => {
            for arg in &a.args {
                collect_vars(arg, out);
            }
        }
        Term::Cells(c) => {
            for (_, body) in c.iter() {
                collect_vars(body, out);
            }
        }
    }
}

/// Variables with their sorts, first-occurrence order (preorder traversal,
/// cells visited in label order).
pub fn vars_in_order(t: &Term) -> Vec<Var> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    fn walk(t: &Term, seen: &mut BTreeSet<Ident>, out: &mut Vec<Var>) {
        match t {
            Term::Var(v) => {
                if seen.insert(v.name.clone()) {
                    out.push(v.clone());
                }
            }
            Term::Int(_) | Term::Bool(_) => {}
            Term::App(a) => a.args.iter().for_each(|x| walk(x, seen, out)),
            Term::Cells(c) => c.iter().for_each(|(_, x)| walk(x, seen, out)),
        }
    }
    walk(t, &mut seen, &mut out);
    out
}

/// An idempotent, sort-preserving substitution.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Subst {
    bindings: BTreeMap<Ident, TermRef>,
}

impl Subst {
    pub fn new() -> Self {
        Subst::default()
    }

    pub fn singleton(name: impl Into<Ident>, t: TermRef) -> Self {
        let mut s = Subst::new();
        s.bindings.insert(name.into(), t);
        s
    }

    pub fn get(&self, name: &Ident) -> Option<&TermRef> {
        self.bindings.get(name)
    }

    pub fn insert(&mut self, name: Ident, t: TermRef) {
        self.bindings.insert(name, t);
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &TermRef)> {
        self.bindings.iter()
    }

    /// Keep only the bindings for `names`.
    pub fn restrict(&self, names: &BTreeSet<Ident>) -> Subst {
        Subst {
            bindings: self
                .bindings
                .iter()
                .filter(|(n, _)| names.contains(*n))
                .map(|(n, t)| (n.clone(), t.clone()))
                .collect(),
        }
    }

    /// Composition: `compose(a, b)` behaves like applying `a` first, then `b`.
    pub fn compose(first: &Subst, second: &Subst) -> Subst {
        let mut bindings = BTreeMap::new();
        for (name, t) in &first.bindings {
            bindings.insert(name.clone(), apply_subst(second, t));
        }
        for (name, t) in &second.bindings {
            bindings.entry(name.clone()).or_insert_with(|| t.clone());
        }
        Subst { bindings }
    }
}

/// Replace every bound variable of `t` by its image; unbound variables pass
/// through unchanged. Shares unchanged subtrees.
pub fn apply_subst(s: &Subst, t: &TermRef) -> TermRef {
    if s.is_empty() {
        return t.clone();
    }
    match &**t {
        Term::Var(v) => match s.get(&v.name) {
            Some(image) => image.clone(),
            None => t.clone(),
        },
        Term::Int(_) | Term::Bool(_) => t.clone(),
        Term::App(a) => {
            let mut changed = false;
            let args: Vec<TermRef> = a
                .args
                .iter()
                .map(|arg| {
                    let new = apply_subst(s, arg);
                    if !Arc::ptr_eq(&new, arg) {
                        changed = true;
                    }
                    new
                })
                .collect();
            if changed {
                Term::app(a.ctor.clone(), a.sort.clone(), args)
            } else {
                t.clone()
            }
        }
        Term::Cells(c) => {
            let mut changed = false;
            let cells: Vec<(Ident, TermRef)> = c
                .iter()
                .map(|(l, body)| {
                    let new = apply_subst(s, body);
                    if !Arc::ptr_eq(&new, body) {
                        changed = true;
                    }
                    (l.clone(), new)
                })
                .collect();
            if changed {
                Term::cells(CellBag { cells })
            } else {
                t.clone()
            }
        }
    }
}

/// Can a subject of sort `actual` stand at a position expecting `expected`?
/// `KItem` accepts any single item (anything but a whole `K` sequence).
pub fn sort_fits(expected: &Sort, actual: &Sort) -> bool {
    if expected == actual {
        return true;
    }
    *expected == Sort::k_item() && *actual != Sort::k() && *actual != Sort::cells()
}

/// Syntactic one-way matching: variables bind only in the pattern.
///
/// Returns `Ok(None)` when no substitution exists and `Err` when the pattern
/// and subject roots have incompatible sorts (malformed input rather than a
/// mere match failure).
pub fn match_term(pattern: &TermRef, subject: &TermRef) -> Result<Option<Subst>> {
    let psort = pattern.sort();
    let ssort = subject.sort();
    if !sort_fits(&psort, &ssort) && !sort_fits(&ssort, &psort) {
        return Err(Error::sort(format!(
            "cannot match pattern of sort {psort} against subject of sort {ssort}"
        )));
    }
    let mut subst = Subst::new();
    if match_into(pattern, subject, &mut subst) {
        Ok(Some(subst))
    } else {
        Ok(None)
    }
}

/// Match `pattern` against `subject`, extending `subst`. Returns false on
/// mismatch (the substitution may then be partially extended).
pub fn match_into(pattern: &TermRef, subject: &TermRef, subst: &mut Subst) -> bool {
    match (&**pattern, &**subject) {
        (Term::Var(v), _) => {
            if !sort_fits(&v.sort, &subject.sort()) {
                return false;
            }
            match subst.get(&v.name) {
                Some(prev) => prev == subject,
                None => {
                    subst.insert(v.name.clone(), subject.clone());
                    true
                }
            }
        }
        (Term::Int(a), Term::Int(b)) => a == b,
        (Term::Bool(a), Term::Bool(b)) => a == b,
        (Term::App(pa), Term::App(sa)) => {
            if pa.ctor != sa.ctor || pa.args.len() != sa.args.len() {
                return false;
            }
            pa.args
                .iter()
                .zip(sa.args.iter())
                .all(|(p, s)| match_into(p, s, subst))
        }
        (Term::Cells(pc), Term::Cells(sc)) => {
            if pc.len() != sc.len() {
                return false;
            }
            pc.iter()
                .zip(sc.iter())
                .all(|((pl, pb), (sl, sb))| pl == sl && match_into(pb, sb, subst))
        }
        _ => false,
    }
}

/// Monotone supply of fresh variables, named `V#0`, `V#1`, ... so that proof
/// construction output is deterministic.
#[derive(Debug, Default, Clone)]
pub struct VarSupply {
    next: u64,
}

impl VarSupply {
    pub fn new() -> Self {
        VarSupply::default()
    }

    pub fn fresh(&mut self, sort: Sort) -> Var {
        let name = Ident::new(&format!("V#{}", self.next));
        self.next += 1;
        Var { name, sort }
    }
}

/// Anti-unification: least general syntactic generalization of two terms of
/// the same sort. Identical subterm positions are preserved; differing
/// positions become fresh variables, with repeated identical differences
/// reusing one variable.
///
/// Returns `(gen, s1, s2)` with `apply_subst(s1, gen) == t1` and
/// `apply_subst(s2, gen) == t2`.
pub fn anti_unify(
    t1: &TermRef,
    t2: &TermRef,
    fresh: &mut VarSupply,
) -> Result<(TermRef, Subst, Subst)> {
    let (sa, sb) = (t1.sort(), t2.sort());
    // Differing item sorts can still be generalized at a KItem position, so
    // only sequence/bag sort mismatches are malformed.
    let structural = |s: &Sort| *s == Sort::k() || *s == Sort::cells();
    if sa != sb && (structural(&sa) || structural(&sb)) {
        return Err(Error::sort(format!(
            "anti_unify requires same-sorted terms, got {sa} vs {sb}"
        )));
    }
    let mut memo: BTreeMap<(TermRef, TermRef), TermRef> = BTreeMap::new();
    let mut s1 = Subst::new();
    let mut s2 = Subst::new();
    let gen = au(t1, t2, fresh, &mut memo, &mut s1, &mut s2);
    Ok((gen, s1, s2))
}

fn au(
    t1: &TermRef,
    t2: &TermRef,
    fresh: &mut VarSupply,
    memo: &mut BTreeMap<(TermRef, TermRef), TermRef>,
    s1: &mut Subst,
    s2: &mut Subst,
) -> TermRef {
    if t1 == t2 {
        return t1.clone();
    }
    match (&**t1, &**t2) {
        (Term::App(a1), Term::App(a2)) if a1.ctor == a2.ctor && a1.args.len() == a2.args.len() => {
            let args = a1
                .args
                .iter()
                .zip(a2.args.iter())
                .map(|(x, y)| au(x, y, fresh, memo, s1, s2))
                .collect();
            Term::app(a1.ctor.clone(), a1.sort.clone(), args)
        }
        (Term::Cells(c1), Term::Cells(c2))
            if c1.len() == c2.len() && c1.labels().eq(c2.labels()) =>
        {
            let cells = c1
                .iter()
                .zip(c2.iter())
                .map(|((l, x), (_, y))| (l.clone(), au(x, y, fresh, memo, s1, s2)))
                .collect();
            Term::cells(CellBag { cells })
        }
        _ => {
            let key = (t1.clone(), t2.clone());
            if let Some(v) = memo.get(&key) {
                return v.clone();
            }
            let sort = if t1.sort() == t2.sort() {
                t1.sort()
            } else {
                Sort::k_item()
            };
            let v = fresh.fresh(sort);
            let var = Term::var(v.name.clone(), v.sort);
            s1.insert(v.name.clone(), t1.clone());
            s2.insert(v.name.clone(), t2.clone());
            memo.insert(key, var.clone());
            var
        }
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        fn rank(t: &Term) -> u8 {
            match t {
                Term::Var(_) => 0,
                Term::Int(_) => 1,
                Term::Bool(_) => 2,
                Term::App(_) => 3,
                Term::Cells(_) => 4,
            }
        }
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => (&a.name, &a.sort).cmp(&(&b.name, &b.sort)),
            (Term::Int(a), Term::Int(b)) => a.cmp(b),
            (Term::Bool(a), Term::Bool(b)) => a.cmp(b),
            (Term::App(a), Term::App(b)) => (&a.ctor, &a.args).cmp(&(&b.ctor, &b.args)),
            (Term::Cells(a), Term::Cells(b)) => a.cells.cmp(&b.cells),
            (a, b) => rank(a).cmp(&rank(b)),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
