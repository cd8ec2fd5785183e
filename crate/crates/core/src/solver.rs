//! Bundled decision procedure for the constraint language: normalization,
//! unit propagation, Fourier–Motzkin style elimination for unsatisfiability
//! and a bounded integer model search for witnesses. Answers `Unknown` when
//! the budget runs out rather than guessing.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::constraint::{canon_cmp, simplify, term_key, Atom, Constraint, LinAtom};
use crate::linear::LinExpr;
use crate::term::{Term, TermRef};

/// Witness assignment over opaque keys (variable names and opaque
/// applications, rendered canonically).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub ints: BTreeMap<String, BigInt>,
    pub bools: BTreeMap<String, bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Assignment),
    Unsat,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntailResult {
    Yes,
    No(Assignment),
    Unknown,
}

const CUBE_BUDGET: usize = 2048;
const FM_ROW_BUDGET: usize = 512;
const SEARCH_NODE_BUDGET: usize = 20_000;
const VALUE_RANGE: i64 = 1 << 16;
const ENUM_WIDTH: i64 = 48;

pub fn is_sat(c: &Constraint) -> SatResult {
    let c = simplify(c.clone());
    solve(&c, 0)
}

pub fn entails(c1: &Constraint, c2: &Constraint) -> EntailResult {
    let q = simplify(Constraint::And(vec![c1.clone(), c2.negated()]));
    match solve(&q, 0) {
        SatResult::Unsat => EntailResult::Yes,
        SatResult::Sat(w) => EntailResult::No(w),
        SatResult::Unknown => EntailResult::Unknown,
    }
}

fn solve(c: &Constraint, depth: usize) -> SatResult {
    if c.is_true() {
        return SatResult::Sat(Assignment::default());
    }
    if c.is_false() {
        return SatResult::Unsat;
    }
    if depth > 4 {
        return SatResult::Unknown;
    }
    let (cubes, complete) = dnf(c, CUBE_BUDGET);
    let mut all_unsat = true;
    for cube in cubes {
        match solve_cube(&cube, depth) {
            SatResult::Sat(w) => return SatResult::Sat(w),
            SatResult::Unsat => {}
            SatResult::Unknown => all_unsat = false,
        }
    }
    if complete && all_unsat {
        SatResult::Unsat
    } else {
        SatResult::Unknown
    }
}

/// Expand to disjunctive normal form, up to `budget` cubes. The flag reports
/// whether the expansion is complete.
fn dnf(c: &Constraint, budget: usize) -> (Vec<Vec<Constraint>>, bool) {
    match c {
        Constraint::And(parts) => {
            let mut cubes: Vec<Vec<Constraint>> = vec![Vec::new()];
            for p in parts {
                let (sub, sub_complete) = dnf(p, budget);
                if !sub_complete {
                    return (Vec::new(), false);
                }
                let mut next = Vec::new();
                for cube in &cubes {
                    for s in &sub {
                        let mut merged = cube.clone();
                        merged.extend(s.iter().cloned());
                        next.push(merged);
                        if next.len() > budget {
                            return (next, false);
                        }
                    }
                }
                cubes = next;
            }
            (cubes, true)
        }
        Constraint::Or(parts) => {
            let mut cubes = Vec::new();
            for p in parts {
                let (sub, sub_complete) = dnf(p, budget.saturating_sub(cubes.len()));
                cubes.extend(sub);
                if !sub_complete || cubes.len() > budget {
                    return (cubes, false);
                }
            }
            (cubes, true)
        }
        lit => (vec![vec![lit.clone()]], true),
    }
}

struct Cube {
    les: Vec<LinExpr>,
    eqs: Vec<LinExpr>,
    nes: Vec<LinExpr>,
    bools: BTreeMap<String, bool>,
    undecidable: bool,
}

fn solve_cube(lits: &[Constraint], depth: usize) -> SatResult {
    // Re-simplify as a conjunction; unit propagation may decide it outright
    // or decompose constructor equalities into new disjunctions.
    let conj = simplify(Constraint::And(lits.to_vec()));
    if conj.is_true() {
        return SatResult::Sat(Assignment::default());
    }
    if conj.is_false() {
        return SatResult::Unsat;
    }
    let parts = conj.conjuncts();
    if parts
        .iter()
        .any(|p| matches!(p, Constraint::Or(_) | Constraint::And(_)))
    {
        return solve(&conj, depth + 1);
    }

    let mut cube = Cube {
        les: Vec::new(),
        eqs: Vec::new(),
        nes: Vec::new(),
        bools: BTreeMap::new(),
        undecidable: false,
    };
    for lit in &parts {
        match lit {
            Constraint::Pos(Atom::Cmp(op, l, r)) => match canon_cmp(*op, l, r) {
                LinAtom::Le(lin) => cube.les.push(lin),
                LinAtom::EqZ(lin) => cube.eqs.push(lin),
                LinAtom::NeZ(lin) => cube.nes.push(lin),
            },
            Constraint::Pos(Atom::BoolTerm(t)) => {
                if insert_bool(&mut cube.bools, t, true).is_err() {
                    return SatResult::Unsat;
                }
            }
            Constraint::Neg(Atom::BoolTerm(t)) => {
                if insert_bool(&mut cube.bools, t, false).is_err() {
                    return SatResult::Unsat;
                }
            }
            // Residual constructor equalities between non-ground terms are
            // outside the decidable fragment; refuse to guess.
            Constraint::Pos(Atom::TermEq(..)) | Constraint::Neg(Atom::TermEq(..)) => {
                cube.undecidable = true;
            }
            Constraint::Neg(Atom::Cmp(..)) => unreachable!("normalized away"),
            Constraint::And(_) | Constraint::Or(_) => unreachable!("flattened"),
        }
    }

    // Gaussian step: eliminate equalities with a unit coefficient, keeping
    // the elimination chain so witnesses can be completed afterwards.
    let mut elim: Vec<(TermRef, LinExpr)> = Vec::new();
    loop {
        let mut eliminated = false;
        for i in 0..cube.eqs.len() {
            let eq = cube.eqs[i].clone();
            if let Some((key, coeff)) = eq.coeffs.iter().find(|(_, c)| c.abs() == BigInt::from(1)) {
                let key = key.clone();
                let coeff = coeff.clone();
                // key = -(eq - coeff*key)/coeff
                let mut rest = eq.clone();
                rest.coeffs.remove(&key);
                let image = if coeff.is_positive() { -rest } else { rest };
                cube.eqs.remove(i);
                subst_all(&mut cube, &key, &image);
                elim.push((key, image));
                eliminated = true;
                break;
            }
        }
        if !eliminated {
            break;
        }
        for eq in &cube.eqs {
            if eq.is_constant() && !eq.constant.is_zero() {
                return SatResult::Unsat;
            }
        }
    }

    // Ground checks after elimination.
    for le in &cube.les {
        if le.is_constant() && le.constant.is_positive() {
            return SatResult::Unsat;
        }
    }
    for eq in &cube.eqs {
        if eq.is_constant() && !eq.constant.is_zero() {
            return SatResult::Unsat;
        }
        // gcd divisibility: g | constant required.
        if !eq.is_constant() {
            let mut g = BigInt::zero();
            for c in eq.coeffs.values() {
                g = g.gcd(c);
            }
            if !g.is_zero() && !eq.constant.mod_floor(&g).is_zero() {
                return SatResult::Unsat;
            }
        }
    }
    for ne in &cube.nes {
        if ne.is_constant() && ne.constant.is_zero() {
            return SatResult::Unsat;
        }
    }

    // Represent remaining equalities as inequality pairs for elimination and
    // bounds derivation.
    let mut les = cube.les.clone();
    for eq in &cube.eqs {
        les.push(eq.clone());
        les.push(-eq.clone());
    }

    if fourier_motzkin_unsat(&les) {
        return SatResult::Unsat;
    }

    match search_witness(&cube, &les) {
        SearchResult::Found(mut values) => {
            if cube.undecidable {
                return SatResult::Unknown;
            }
            // Complete the witness for eliminated keys, newest first: each
            // image only mentions keys that are already valued by then.
            for (key, image) in elim.iter().rev() {
                let mut v = image.constant.clone();
                for (t, c) in &image.coeffs {
                    match values.get(t) {
                        Some(tv) => v += c * tv,
                        None => return SatResult::Unknown,
                    }
                }
                values.insert(key.clone(), v);
            }
            let asg = Assignment {
                ints: values.into_iter().map(|(t, v)| (term_key(&t), v)).collect(),
                bools: cube.bools.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            };
            SatResult::Sat(asg)
        }
        // An exhaustive search over sound per-variable bounds found nothing.
        SearchResult::ExhaustedComplete => SatResult::Unsat,
        SearchResult::GaveUp => SatResult::Unknown,
    }
}

fn insert_bool(map: &mut BTreeMap<String, bool>, t: &TermRef, v: bool) -> Result<(), ()> {
    let key = term_key(t);
    match map.insert(key, v) {
        Some(prev) if prev != v => Err(()),
        _ => Ok(()),
    }
}

fn subst_all(cube: &mut Cube, key: &TermRef, image: &LinExpr) {
    let apply = |lin: &LinExpr| -> LinExpr {
        match lin.coeffs.get(key) {
            None => lin.clone(),
            Some(c) => {
                let c = c.clone();
                let mut l = lin.clone();
                l.coeffs.remove(key);
                l + image.scale(&c)
            }
        }
    };
    cube.les = cube.les.iter().map(apply).collect();
    cube.eqs = cube.eqs.iter().map(apply).collect();
    cube.nes = cube.nes.iter().map(apply).collect();
}

/// Sound unsatisfiability check by variable elimination over the rationals.
fn fourier_motzkin_unsat(les: &[LinExpr]) -> bool {
    let mut rows: Vec<LinExpr> = les.to_vec();
    loop {
        if rows
            .iter()
            .any(|r| r.is_constant() && r.constant.is_positive())
        {
            return true;
        }
        let var = match rows.iter().flat_map(|r| r.coeffs.keys()).next() {
            Some(v) => v.clone(),
            None => return false,
        };
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut rest = Vec::new();
        for r in rows {
            match r.coeffs.get(&var) {
                Some(c) if c.is_positive() => pos.push(r),
                Some(_) => neg.push(r),
                None => rest.push(r),
            }
        }
        if pos.len() * neg.len() + rest.len() > FM_ROW_BUDGET {
            return false;
        }
        for p in &pos {
            for n in &neg {
                let a = p.coeffs.get(&var).unwrap().clone();
                let b = -n.coeffs.get(&var).unwrap().clone();
                // b*p + a*n eliminates var; both multipliers positive.
                let mut combined = p.scale(&b) + n.scale(&a);
                combined.coeffs.remove(&var);
                rest.push(combined);
            }
        }
        rows = rest;
    }
}

enum SearchResult {
    Found(BTreeMap<TermRef, BigInt>),
    /// Every integer point in the sound per-variable bounds was tried.
    ExhaustedComplete,
    GaveUp,
}

/// Bounded integer model search over the opaque keys, trying interval
/// endpoints and the values near atom boundaries. Small intervals are
/// enumerated exhaustively, which makes a failed search a proof of
/// unsatisfiability.
fn search_witness(cube: &Cube, les: &[LinExpr]) -> SearchResult {
    let mut keys: BTreeSet<TermRef> = BTreeSet::new();
    for lin in les.iter().chain(cube.nes.iter()).chain(cube.eqs.iter()) {
        keys.extend(lin.coeffs.keys().cloned());
    }
    let keys: Vec<TermRef> = keys.into_iter().collect();
    let mut budget = SEARCH_NODE_BUDGET;
    let mut values: BTreeMap<TermRef, BigInt> = BTreeMap::new();
    let mut complete = true;
    if dfs(
        &keys,
        0,
        &mut values,
        les.to_vec(),
        cube.eqs.clone(),
        cube.nes.clone(),
        &mut budget,
        &mut complete,
    ) {
        SearchResult::Found(values)
    } else if complete {
        SearchResult::ExhaustedComplete
    } else {
        SearchResult::GaveUp
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    keys: &[TermRef],
    idx: usize,
    values: &mut BTreeMap<TermRef, BigInt>,
    les: Vec<LinExpr>,
    eqs: Vec<LinExpr>,
    nes: Vec<LinExpr>,
    budget: &mut usize,
    complete: &mut bool,
) -> bool {
    if *budget == 0 {
        *complete = false;
        return false;
    }
    *budget -= 1;

    // Ground violations prune the branch.
    if les
        .iter()
        .any(|l| l.is_constant() && l.constant.is_positive())
        || eqs.iter().any(|l| l.is_constant() && !l.constant.is_zero())
        || nes.iter().any(|l| l.is_constant() && l.constant.is_zero())
    {
        return false;
    }
    if idx == keys.len() {
        return true;
    }

    let key = &keys[idx];
    let (lo, hi, capped) = bounds_for(key, &les);
    if lo > hi {
        return false;
    }
    let (cands, exhaustive) = candidates(&lo, &hi);
    if !exhaustive || capped {
        *complete = false;
    }
    for v in cands {
        let vi = LinExpr::constant(v.clone());
        let sub = |lin: &LinExpr| -> LinExpr {
            match lin.coeffs.get(key) {
                None => lin.clone(),
                Some(c) => {
                    let c = c.clone();
                    let mut l = lin.clone();
                    l.coeffs.remove(key);
                    l + vi.scale(&c)
                }
            }
        };
        let les2: Vec<LinExpr> = les.iter().map(sub).collect();
        let eqs2: Vec<LinExpr> = eqs.iter().map(sub).collect();
        let nes2: Vec<LinExpr> = nes.iter().map(sub).collect();
        values.insert(key.clone(), v);
        if dfs(keys, idx + 1, values, les2, eqs2, nes2, budget, complete) {
            return true;
        }
        values.remove(key);
    }
    false
}

/// Sound interval for `key` from univariate rows; the flag reports whether
/// either side is the synthetic search cap rather than a derived bound.
fn bounds_for(key: &TermRef, les: &[LinExpr]) -> (BigInt, BigInt, bool) {
    let mut lo: Option<BigInt> = None;
    let mut hi: Option<BigInt> = None;
    for l in les {
        if l.coeffs.len() == 1 {
            if let Some(c) = l.coeffs.get(key) {
                // c*x + k <= 0
                let k = &l.constant;
                if c.is_positive() {
                    let b = (-k).div_floor(c);
                    if hi.as_ref().map_or(true, |h| b < *h) {
                        hi = Some(b);
                    }
                } else {
                    let b = (-k).div_ceil(c);
                    if lo.as_ref().map_or(true, |l0| b > *l0) {
                        lo = Some(b);
                    }
                }
            }
        }
    }
    let cap = BigInt::from(VALUE_RANGE);
    let mut capped = lo.is_none() || hi.is_none();
    let mut lo = lo.unwrap_or(-cap.clone());
    let mut hi = hi.unwrap_or(cap.clone());
    if lo < -cap.clone() {
        lo = -cap.clone();
        capped = true;
    }
    if hi > cap {
        hi = cap;
        capped = true;
    }
    (lo, hi, capped)
}

/// Candidate values for one variable; the flag reports whether the interval
/// was enumerated exhaustively.
fn candidates(lo: &BigInt, hi: &BigInt) -> (Vec<BigInt>, bool) {
    let width = hi - lo;
    let mut out: Vec<BigInt> = Vec::new();
    if width <= BigInt::from(ENUM_WIDTH) {
        let mut v = lo.clone();
        while &v <= hi {
            out.push(v.clone());
            v += 1;
        }
        return (out, true);
    }
    let mut push = |v: BigInt| {
        if &v >= lo && &v <= hi && !out.contains(&v) {
            out.push(v);
        }
    };
    push(lo.clone());
    push(lo + 1);
    push(hi.clone());
    push(hi - 1);
    for s in [0i64, 1, -1, 2, -2, 3, -3, 8, -8] {
        push(BigInt::from(s));
    }
    (out, false)
}

/// Evaluate a constraint under an assignment; `None` when a key is missing
/// or a residual atom cannot be decided.
pub fn eval_constraint(c: &Constraint, asg: &Assignment) -> Option<bool> {
    match c {
        Constraint::And(cs) => {
            for x in cs {
                if !eval_constraint(x, asg)? {
                    return Some(false);
                }
            }
            Some(true)
        }
        Constraint::Or(cs) => {
            for x in cs {
                if eval_constraint(x, asg)? {
                    return Some(true);
                }
            }
            Some(false)
        }
        Constraint::Pos(a) => eval_atom(a, asg),
        Constraint::Neg(a) => eval_atom(a, asg).map(|b| !b),
    }
}

fn eval_atom(a: &Atom, asg: &Assignment) -> Option<bool> {
    match a {
        Atom::Cmp(op, l, r) => {
            let lv = eval_lin(&crate::linear::linearize(l), asg)?;
            let rv = eval_lin(&crate::linear::linearize(r), asg)?;
            Some(op.eval(&lv, &rv))
        }
        Atom::BoolTerm(t) => match &**t {
            Term::Bool(b) => Some(*b),
            _ => asg.bools.get(&term_key(t)).copied(),
        },
        Atom::TermEq(l, r) => {
            if l == r {
                Some(true)
            } else if l.is_ground() && r.is_ground() {
                Some(false)
            } else {
                None
            }
        }
    }
}

fn eval_lin(lin: &LinExpr, asg: &Assignment) -> Option<BigInt> {
    let mut total = lin.constant.clone();
    for (t, c) in &lin.coeffs {
        let v = asg.ints.get(&term_key(t))?;
        total += c * v;
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{cmp, int_var, CmpOp};

    fn x() -> TermRef {
        int_var("X")
    }

    #[test]
    fn contradictory_bounds_are_unsat() {
        let c = Constraint::And(vec![
            cmp(CmpOp::Gt, x(), Term::int(2)),
            cmp(CmpOp::Lt, x(), Term::int(2)),
        ]);
        assert_eq!(is_sat(&c), SatResult::Unsat);
    }

    #[test]
    fn true_is_sat_with_empty_witness() {
        assert_eq!(
            is_sat(&Constraint::tt()),
            SatResult::Sat(Assignment::default())
        );
    }

    #[test]
    fn opaque_applications_act_as_integer_unknowns() {
        // size(WS) <= 1024 ∧ G >= 3
        let size = Term::app(
            "#sizeWordStack",
            crate::term::Sort::int(),
            vec![Term::var("WS", crate::term::Sort::new("WordStack"))],
        );
        let c = Constraint::And(vec![
            cmp(CmpOp::Le, size, Term::int(1024)),
            cmp(CmpOp::Ge, int_var("G"), Term::int(3)),
        ]);
        match is_sat(&c) {
            SatResult::Sat(w) => {
                assert_eq!(eval_constraint(&simplify(c), &w), Some(true));
            }
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn entails_simple() {
        let c1 = cmp(CmpOp::Eq, x(), Term::int(5));
        let c2 = cmp(CmpOp::Gt, x(), Term::int(0));
        assert_eq!(entails(&c1, &c2), EntailResult::Yes);
        match entails(&c2, &c1) {
            EntailResult::No(w) => {
                // Counterexample satisfies X > 0 ∧ X ≠ 5.
                let v = w.ints.get("X:Int").expect("X assigned");
                assert!(v > &BigInt::zero() && v != &BigInt::from(5));
            }
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn entails_conjunction_projection() {
        let g = int_var("G");
        let s = int_var("S");
        let c1 = Constraint::And(vec![
            cmp(CmpOp::Ge, g.clone(), Term::int(3)),
            cmp(CmpOp::Le, s, Term::int(1024)),
        ]);
        let c2 = cmp(CmpOp::Ge, g, Term::int(3));
        assert_eq!(entails(&c1, &c2), EntailResult::Yes);
    }

    #[test]
    fn disequalities_rule_out_single_point() {
        let c = Constraint::And(vec![
            cmp(CmpOp::Ge, x(), Term::int(3)),
            cmp(CmpOp::Le, x(), Term::int(3)),
            cmp(CmpOp::Ne, x(), Term::int(3)),
        ]);
        assert_eq!(is_sat(&c), SatResult::Unsat);
    }

    #[test]
    fn multivariable_system_finds_model() {
        let y = int_var("Y");
        let c = Constraint::And(vec![
            cmp(
                CmpOp::Le,
                Term::app("+Int", crate::term::Sort::int(), vec![x(), y.clone()]),
                Term::int(10),
            ),
            cmp(CmpOp::Ge, x(), Term::int(4)),
            cmp(CmpOp::Ge, y, Term::int(5)),
        ]);
        match is_sat(&c) {
            SatResult::Sat(w) => assert_eq!(eval_constraint(&simplify(c), &w), Some(true)),
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_multivariable_system_is_unsat() {
        let y = int_var("Y");
        let c = Constraint::And(vec![
            cmp(
                CmpOp::Le,
                Term::app("+Int", crate::term::Sort::int(), vec![x(), y.clone()]),
                Term::int(8),
            ),
            cmp(CmpOp::Ge, x(), Term::int(4)),
            cmp(CmpOp::Ge, y, Term::int(5)),
        ]);
        assert_eq!(is_sat(&c), SatResult::Unsat);
    }
}
