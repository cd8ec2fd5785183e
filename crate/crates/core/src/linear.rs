//! Linear views of integer-sorted terms: a constant plus integer coefficients
//! over "opaque" subterms (variables and non-arithmetic applications).
//!
//! Used both by the constraint solver and by term canonicalization so that
//! syntactically different spellings of the same linear expression share one
//! normal form.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::term::{Sort, Term, TermRef};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinExpr {
    /// Coefficients over opaque terms; zero coefficients are never stored.
    pub coeffs: BTreeMap<TermRef, BigInt>,
    pub constant: BigInt,
}

impl LinExpr {
    pub fn constant(c: impl Into<BigInt>) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: c.into(),
        }
    }

    pub fn opaque(t: TermRef) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(t, BigInt::one());
        LinExpr {
            coeffs,
            constant: BigInt::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn insert(&mut self, t: TermRef, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(t) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, k: &BigInt) -> LinExpr {
        if k.is_zero() {
            return LinExpr::constant(0);
        }
        LinExpr {
            coeffs: self
                .coeffs
                .iter()
                .map(|(t, c)| (t.clone(), c * k))
                .collect(),
            constant: &self.constant * k,
        }
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(mut self, rhs: LinExpr) -> LinExpr {
        for (t, c) in rhs.coeffs {
            self.insert(t, c);
        }
        self.constant += rhs.constant;
        self
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: LinExpr) -> LinExpr {
        self + rhs.neg()
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        LinExpr {
            coeffs: self.coeffs.into_iter().map(|(t, c)| (t, -c)).collect(),
            constant: -self.constant,
        }
    }
}

impl Mul<BigInt> for LinExpr {
    type Output = LinExpr;
    fn mul(self, rhs: BigInt) -> LinExpr {
        self.scale(&rhs)
    }
}

/// Linearize an Int-sorted term. `+Int`, `-Int` and `*Int`-by-constant are
/// interpreted; everything else (variables, hooks, unknown functions) becomes
/// an opaque coefficient-1 entry.
pub fn linearize(t: &TermRef) -> LinExpr {
    match &**t {
        Term::Int(n) => LinExpr::constant(n.clone()),
        Term::Var(_) => LinExpr::opaque(t.clone()),
        Term::App(a) if a.sort == Sort::int() => match a.ctor.as_str() {
            "+Int" if a.args.len() == 2 => linearize(&a.args[0]) + linearize(&a.args[1]),
            "-Int" if a.args.len() == 2 => linearize(&a.args[0]) - linearize(&a.args[1]),
            "*Int" if a.args.len() == 2 => {
                let l = linearize(&a.args[0]);
                let r = linearize(&a.args[1]);
                if l.is_constant() {
                    r.scale(&l.constant)
                } else if r.is_constant() {
                    l.scale(&r.constant)
                } else {
                    LinExpr::opaque(t.clone())
                }
            }
            _ => LinExpr::opaque(t.clone()),
        },
        _ => LinExpr::opaque(t.clone()),
    }
}

/// Rebuild a canonical Int term from a linear expression: opaque terms in
/// `Ord` order joined with `+Int`/`-Int`, the constant last. `rebuild` and
/// `linearize` are mutually inverse on canonical terms.
pub fn rebuild(lin: &LinExpr) -> TermRef {
    let int = Sort::int();
    let mut acc: Option<TermRef> = None;
    let mut pending_neg: Vec<(TermRef, BigInt)> = Vec::new();

    let with_coeff = |t: &TermRef, c: &BigInt| -> TermRef {
        if c.is_one() {
            t.clone()
        } else {
            Term::app("*Int", int.clone(), vec![Term::int(c.clone()), t.clone()])
        }
    };

    for (t, c) in &lin.coeffs {
        if c.is_positive() {
            let piece = with_coeff(t, c);
            acc = Some(match acc {
                None => piece,
                Some(prev) => Term::app("+Int", int.clone(), vec![prev, piece]),
            });
        } else {
            pending_neg.push((t.clone(), -c.clone()));
        }
    }

    for (t, c) in pending_neg {
        let piece = with_coeff(&t, &c);
        let prev = acc.unwrap_or_else(|| Term::int(0));
        acc = Some(Term::app("-Int", int.clone(), vec![prev, piece]));
    }

    match acc {
        None => Term::int(lin.constant.clone()),
        Some(t) => {
            if lin.constant.is_zero() {
                t
            } else if lin.constant.is_positive() {
                Term::app(
                    "+Int",
                    int.clone(),
                    vec![t, Term::int(lin.constant.clone())],
                )
            } else {
                Term::app(
                    "-Int",
                    int.clone(),
                    vec![t, Term::int(-lin.constant.clone())],
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Sort;

    fn var(n: &str) -> TermRef {
        Term::var(n, Sort::int())
    }

    fn plus(a: TermRef, b: TermRef) -> TermRef {
        Term::app("+Int", Sort::int(), vec![a, b])
    }

    #[test]
    fn linearize_combines_constants() {
        // (2 + s) + -1  ==> s + 1
        let s = var("s");
        let t = plus(plus(Term::int(2), s.clone()), Term::int(-1));
        let lin = linearize(&t);
        assert_eq!(lin.constant, 1.into());
        assert_eq!(lin.coeffs.get(&s), Some(&1.into()));
        assert_eq!(rebuild(&lin), plus(s, Term::int(1)));
    }

    #[test]
    fn rebuild_negative_without_positives() {
        let s = var("s");
        let lin = linearize(&s).neg();
        let t = rebuild(&lin);
        assert_eq!(t, Term::app("-Int", Sort::int(), vec![Term::int(0), s]));
    }

    #[test]
    fn rebuild_roundtrip_is_stable() {
        let x = var("X");
        let y = var("Y");
        let t = plus(
            Term::app("*Int", Sort::int(), vec![Term::int(3), x]),
            Term::app("-Int", Sort::int(), vec![y, Term::int(4)]),
        );
        let once = rebuild(&linearize(&t));
        let twice = rebuild(&linearize(&once));
        assert_eq!(once, twice);
    }
}
