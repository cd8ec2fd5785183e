//! Concrete interpretation and the two symbolic primitives: bounded
//! symbolic rewriting (`execute`) and subsumption checking (`implies`).

use std::collections::BTreeSet;

use crate::constraint::{canon_key, conj, subst_constraint, CSubst, CTerm, Constraint};
use crate::error::{Error, Result};
use crate::hooks::simplify_term;
use crate::semantics::{Rule, Semantics};
use crate::solver::{entails, is_sat, EntailResult, SatResult};
use crate::term::{apply_subst, match_into, Ident, Subst, Term, TermRef};

/// Result of one bounded symbolic run: the state reached, the branch
/// conditions when several rules stay feasible, and the number of rules
/// applied. `applied == 0` with empty branches means the input was stuck.
#[derive(Clone, Debug)]
pub struct StepResult {
    pub next: CTerm,
    pub branches: Vec<CSubst>,
    pub applied: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunEnd {
    Stuck,
    FuelExhausted,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub config: TermRef,
    pub steps: usize,
    pub end: RunEnd,
}

/// Match a rule's partial-configuration lhs against a full configuration.
fn match_rule(rule: &Rule, config: &TermRef) -> Option<Subst> {
    let lhs = rule.lhs.as_cells().expect("validated lhs");
    let bag = config.as_cells()?;
    let mut subst = Subst::new();
    for (label, pattern) in lhs.iter() {
        let subject = bag.get(label)?;
        if !match_into(pattern, subject, &mut subst) {
            return None;
        }
    }
    Some(subst)
}

/// Rewrite `config` with `rule` under the match `subst`: cells mentioned in
/// the rhs are replaced, everything else is framed. The result is
/// normalized.
fn apply_rule(sem: &Semantics, rule: &Rule, subst: &Subst, config: &TermRef) -> Result<TermRef> {
    let rhs = rule.rhs.as_cells().expect("validated rhs");
    let mut updates = std::collections::BTreeMap::new();
    for (label, body) in rhs.iter() {
        let new_body = simplify_term(&sem.sig, &apply_subst(subst, body));
        updates.insert(label.clone(), new_body);
    }
    let bag = config
        .as_cells()
        .ok_or_else(|| Error::Precondition("configuration must be a cell bag".into()))?;
    Ok(Term::cells(bag.with_cells(&updates)?))
}

/// Instantiate a rule guard with the match bindings and evaluate hooks.
fn instantiate_requires(sem: &Semantics, subst: &Subst, c: &Constraint) -> Constraint {
    c.clone()
        .map_terms(&mut |t| simplify_term(&sem.sig, &apply_subst(subst, t)))
}

/// Apply the single highest-priority rule whose guard holds on a ground
/// configuration. `None` means stuck.
pub fn step_concrete(sem: &Semantics, config: &TermRef) -> Result<Option<(TermRef, Ident)>> {
    for idx in sem.candidates_for(config) {
        let rule = &sem.rules[idx];
        let subst = match match_rule(rule, config) {
            Some(s) => s,
            None => continue,
        };
        let guard = instantiate_requires(sem, &subst, &rule.requires);
        if guard.is_true() {
            let next = apply_rule(sem, rule, &subst, config)?;
            return Ok(Some((next, rule.name.clone())));
        }
        if guard.is_false() {
            continue;
        }
        return Err(Error::SemanticsBug(format!(
            "rule `{}`: requires did not evaluate on a concrete configuration",
            rule.name
        )));
    }
    Ok(None)
}

/// Iterate `step_concrete` until stuck or out of fuel, with an optional
/// per-step observer (step index, rule name, configuration after the step).
pub fn run_concrete_with(
    sem: &Semantics,
    config: &TermRef,
    fuel: usize,
    mut observer: impl FnMut(usize, &Ident, &TermRef),
) -> Result<RunResult> {
    if fuel == 0 {
        return Err(Error::Precondition("fuel must be positive".into()));
    }
    let mut cur = simplify_term(&sem.sig, config);
    let mut steps = 0usize;
    while steps < fuel {
        match step_concrete(sem, &cur)? {
            None => {
                return Ok(RunResult {
                    config: cur,
                    steps,
                    end: RunEnd::Stuck,
                });
            }
            Some((next, rule)) => {
                steps += 1;
                observer(steps, &rule, &next);
                cur = next;
            }
        }
    }
    Ok(RunResult {
        config: cur,
        steps,
        end: RunEnd::FuelExhausted,
    })
}

pub fn run_concrete(sem: &Semantics, config: &TermRef, fuel: usize) -> Result<RunResult> {
    run_concrete_with(sem, config, fuel, |_, _, _| {})
}

struct Feasible {
    rule_idx: usize,
    subst: Subst,
    guard: Constraint,
    entailed: bool,
}

/// Rules that structurally match and whose instantiated guard is
/// co-satisfiable with the path constraint, in (priority, declaration)
/// order.
fn feasible_rules(sem: &Semantics, state: &CTerm) -> Vec<Feasible> {
    let mut out = Vec::new();
    for idx in sem.candidates_for(&state.config) {
        let rule = &sem.rules[idx];
        let subst = match match_rule(rule, &state.config) {
            Some(s) => s,
            None => continue,
        };
        let guard = instantiate_requires(sem, &subst, &rule.requires);
        if guard.is_true() {
            out.push(Feasible {
                rule_idx: idx,
                subst,
                guard,
                entailed: true,
            });
            continue;
        }
        if guard.is_false() {
            continue;
        }
        match entails(&state.constraint, &guard) {
            EntailResult::Yes => {
                out.push(Feasible {
                    rule_idx: idx,
                    subst,
                    guard,
                    entailed: true,
                });
            }
            _ => {
                // Keep the rule unless the guard contradicts the path;
                // `unknown` stays feasible to preserve soundness.
                match is_sat(&conj(&state.constraint, &guard)) {
                    SatResult::Unsat => {}
                    _ => out.push(Feasible {
                        rule_idx: idx,
                        subst,
                        guard,
                        entailed: false,
                    }),
                }
            }
        }
    }
    out
}

/// Symbolic rewriting: apply rules while exactly one stays feasible (or the
/// first feasible rule's guard is entailed, which shadows the rest), up to
/// `n` steps. Stops at states where several guarded rules overlap, returning
/// one constrained substitution per arm; arms are made disjoint by negating
/// the guards of earlier arms, mirroring priority order.
pub fn execute(sem: &Semantics, start: &CTerm, n: usize) -> Result<StepResult> {
    if n == 0 {
        return Err(Error::Precondition(
            "execute needs a positive step bound".into(),
        ));
    }
    if is_sat(&start.constraint) == SatResult::Unsat {
        return Err(Error::Precondition(
            "execute called on an unsatisfiable constrained term".into(),
        ));
    }
    let mut state = CTerm::new(
        simplify_term(&sem.sig, &start.config),
        start.constraint.clone(),
    );
    let mut applied = 0usize;
    loop {
        let feasible = feasible_rules(sem, &state);
        if feasible.is_empty() {
            return Ok(StepResult {
                next: state,
                branches: Vec::new(),
                applied,
            });
        }
        let fire_deterministic = feasible[0].entailed || feasible.len() == 1;
        if !fire_deterministic {
            let mut branches = Vec::new();
            let mut negations: Vec<Constraint> = Vec::new();
            for f in &feasible {
                let mut parts = negations.clone();
                parts.push(f.guard.clone());
                let arm = crate::constraint::simplify(Constraint::And(parts));
                negations.push(f.guard.negated());
                let combined = conj(&state.constraint, &arm);
                if is_sat(&combined) == SatResult::Unsat {
                    continue;
                }
                branches.push(CSubst::new(Subst::new(), arm));
            }
            if branches.len() <= 1 {
                // All overlap collapsed onto one feasible arm; treat it as
                // deterministic rather than emitting a degenerate branch.
                if let Some(arm) = branches.pop() {
                    let f = &feasible[0];
                    let rule = &sem.rules[f.rule_idx];
                    let next_config = apply_rule(sem, rule, &f.subst, &state.config)?;
                    state = CTerm::new(next_config, conj(&state.constraint, &arm.constraint));
                    applied += 1;
                    if applied == n {
                        return Ok(StepResult {
                            next: state,
                            branches: Vec::new(),
                            applied,
                        });
                    }
                    continue;
                }
                return Ok(StepResult {
                    next: state,
                    branches: Vec::new(),
                    applied,
                });
            }
            return Ok(StepResult {
                next: state,
                branches,
                applied,
            });
        }
        let f = &feasible[0];
        let rule = &sem.rules[f.rule_idx];
        let next_config = apply_rule(sem, rule, &f.subst, &state.config)?;
        let next_constraint = if f.entailed {
            state.constraint.clone()
        } else {
            conj(&state.constraint, &f.guard)
        };
        state = CTerm::new(next_config, next_constraint);
        applied += 1;
        if applied == n {
            return Ok(StepResult {
                next: state,
                branches: Vec::new(),
                applied,
            });
        }
    }
}

/// Subsumption: does the general pattern `t2` cover `t1`? On success the
/// returned constrained substitution satisfies
/// `csubst_apply(result, t2) == t1`.
pub fn implies(t1: &CTerm, t2: &CTerm) -> Option<CSubst> {
    implies_rigid(t1, t2, &BTreeSet::new())
}

/// Like `implies`, but variables in `rigid` may only bind to themselves.
/// The proof search uses this for the final specification, whose variables
/// are shared with the initial state.
pub fn implies_rigid(t1: &CTerm, t2: &CTerm, rigid: &BTreeSet<Ident>) -> Option<CSubst> {
    let mut subst = Subst::new();
    if !match_into(&t2.config, &t1.config, &mut subst) {
        return None;
    }
    for (name, image) in subst.iter() {
        if rigid.contains(name) {
            match &**image {
                Term::Var(v) if v.name == *name => {}
                _ => return None,
            }
        }
    }
    let instantiated = subst_constraint(&subst, &t2.constraint);
    if entails(&t1.constraint, &instantiated) != EntailResult::Yes {
        return None;
    }
    // Residual: the conjuncts of t1's constraint not already provided by the
    // instantiated target constraint, so that applying the substitution to
    // t2 reproduces t1 exactly.
    let provided: BTreeSet<String> = instantiated.conjuncts().iter().map(canon_key).collect();
    let residual: Vec<Constraint> = t1
        .constraint
        .conjuncts()
        .into_iter()
        .filter(|c| {
            if provided.contains(&canon_key(c)) {
                return false;
            }
            entails(&instantiated, c) != EntailResult::Yes
        })
        .collect();
    Some(CSubst::new(subst, Constraint::And(residual)))
}
