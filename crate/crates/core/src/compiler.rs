//! Proof-based compilation: graph transformations that maximize step-edge
//! length (step compression, step-branch lifting, branch-branch lifting),
//! rule emission from step edges, and the step-reduction metric.

use std::collections::BTreeSet;

use num_rational::Rational64;

use crate::aprp::{AprpGraph, BranchEdge, Status, StepEdge, VertexId};
use crate::constraint::{csubst_apply, csubst_compose, subst_constraint, Constraint};
use crate::error::{Error, Result};
use crate::executor::step_concrete;
use crate::hooks::simplify_term;
use crate::semantics::{Provenance, Rule, Semantics, PRIORITY_COMPILED};
use crate::solver::{is_sat, SatResult};
use crate::term::{apply_subst, free_vars, match_term, vars_in_order, Ident, Subst, Term, TermRef};

/// A rule produced from one step edge of a proof, together with how many
/// original rewrites it replaces.
#[derive(Clone, Debug)]
pub struct CompiledRule {
    pub rule: Rule,
    pub proof: String,
    pub path: String,
    pub consolidated: usize,
}

fn cheap_check(g: &AprpGraph) -> Result<()> {
    for e in &g.step_edges {
        if e.n == 0 {
            return Err(Error::Validation("step edge of length 0".into()));
        }
        if g.vertex(e.from).is_none() || g.vertex(e.to).is_none() {
            return Err(Error::Validation("dangling step edge".into()));
        }
    }
    for b in &g.branch_edges {
        if g.vertex(b.from).is_none() || b.arms.iter().any(|(_, to)| g.vertex(*to).is_none()) {
            return Err(Error::Validation("dangling branch edge".into()));
        }
    }
    for c in &g.cover_edges {
        if g.vertex(c.from).is_none() || g.vertex(c.to).is_none() {
            return Err(Error::Validation("dangling cover edge".into()));
        }
    }
    Ok(())
}

/// Merge adjacent step edges `A -M-> B -N-> C` into `A -(M+N)-> C` whenever
/// the intermediate vertex has exactly that one in-edge and one out-edge and
/// no cover or branch incidence. Applied to a fixpoint.
pub fn compress_steps(g: &AprpGraph) -> Result<(AprpGraph, bool)> {
    cheap_check(g)?;
    let mut g = g.clone();
    let mut changed = false;
    'outer: loop {
        for i in 0..g.step_edges.len() {
            let first = g.step_edges[i].clone();
            let mid = first.to;
            if mid == g.root || mid == g.final_vertex {
                continue;
            }
            if g.in_degree(mid) != 1 {
                continue;
            }
            if g.branch_out(mid).is_some() || g.cover_out(mid).is_some() {
                continue;
            }
            let second = match g.step_edges.iter().position(|e| e.from == mid) {
                Some(j) if j != i => g.step_edges[j].clone(),
                _ => continue,
            };
            g.step_edges
                .retain(|e| !(e.from == first.from && e.to == first.to && e.n == first.n));
            g.step_edges
                .retain(|e| !(e.from == second.from && e.to == second.to && e.n == second.n));
            g.step_edges.push(StepEdge {
                from: first.from,
                to: second.to,
                n: first.n + second.n,
            });
            g.remove_vertex(mid);
            changed = true;
            continue 'outer;
        }
        break;
    }
    g.step_edges.sort_by_key(|e| (e.from, e.to));
    Ok((g, changed))
}

/// Move a branch before the deterministic steps feeding it:
/// `A -M-> B -[a_i]-> C_i` becomes `A -[a_i]-> (a_i(A) -M-> C_i)`.
/// Lifted arms with unsatisfiable constraints are pruned.
pub fn lift_step_branch(g: &AprpGraph) -> Result<(AprpGraph, bool)> {
    cheap_check(g)?;
    let mut g = g.clone();
    let mut changed = false;
    'outer: loop {
        for bi in 0..g.branch_edges.len() {
            let branch = g.branch_edges[bi].clone();
            let mid = branch.from;
            if mid == g.root || mid == g.final_vertex {
                continue;
            }
            if g.in_degree(mid) != 1 || g.cover_out(mid).is_some() {
                continue;
            }
            let step = match g.step_edges.iter().find(|e| e.to == mid) {
                Some(e) => e.clone(),
                None => continue,
            };
            let source = step.from;
            if g.cover_out(source).is_some() {
                continue;
            }
            // A single arm whose guard already follows from the source
            // constraint is no branch at all: splice the steps together.
            if branch.arms.len() == 1 {
                let (alpha, target) = &branch.arms[0];
                let lifted = csubst_apply(alpha, g.cterm(source));
                if lifted == *g.cterm(source) {
                    g.step_edges.retain(|e| !(e.from == source && e.to == mid));
                    g.branch_edges.remove(bi);
                    g.step_edges.push(StepEdge {
                        from: source,
                        to: *target,
                        n: step.n,
                    });
                    g.remove_vertex(mid);
                    changed = true;
                    continue 'outer;
                }
            }
            // Build the lifted arms.
            let mut lifted = Vec::new();
            for (alpha, target) in &branch.arms {
                let arm_state = csubst_apply(alpha, g.cterm(source));
                if is_sat(&arm_state.constraint) == SatResult::Unsat {
                    // Infeasible once moved before the steps; drop the arm
                    // and let the unreachable subtree be pruned.
                    continue;
                }
                let arm_vertex = g.add_vertex(arm_state, Status::Reached);
                lifted.push(((alpha.clone(), arm_vertex), *target));
            }
            g.step_edges.retain(|e| !(e.from == source && e.to == mid));
            g.branch_edges.remove(bi);
            for ((_, arm_vertex), target) in &lifted {
                g.step_edges.push(StepEdge {
                    from: *arm_vertex,
                    to: *target,
                    n: step.n,
                });
            }
            g.branch_edges.push(BranchEdge {
                from: source,
                arms: lifted.into_iter().map(|(arm, _)| arm).collect(),
            });
            g.remove_vertex(mid);
            changed = true;
            continue 'outer;
        }
        break;
    }
    prune_unreachable(&mut g);
    g.step_edges.sort_by_key(|e| (e.from, e.to));
    Ok((g, changed))
}

/// Flatten nested conditionals: when an arm of a branch is itself a branch
/// source, replace the arm with the composed arms. Unsatisfiable
/// compositions are pruned.
pub fn lift_branch_branch(g: &AprpGraph) -> Result<(AprpGraph, bool)> {
    cheap_check(g)?;
    let mut g = g.clone();
    let mut changed = false;
    'outer: loop {
        for bi in 0..g.branch_edges.len() {
            let outer = g.branch_edges[bi].clone();
            for (ai, (alpha_outer, mid)) in outer.arms.iter().enumerate() {
                let mid = *mid;
                if mid == g.root || mid == g.final_vertex {
                    continue;
                }
                if g.in_degree(mid) != 1 || g.cover_out(mid).is_some() {
                    continue;
                }
                if !g.step_out(mid).is_empty() {
                    continue;
                }
                let inner_idx = match g.branch_edges.iter().position(|b| b.from == mid) {
                    Some(j) => j,
                    None => continue,
                };
                let inner = g.branch_edges[inner_idx].clone();
                let source = outer.from;
                let mut new_arms: Vec<(crate::constraint::CSubst, VertexId)> = Vec::new();
                for (alpha_inner, target) in &inner.arms {
                    let composed = csubst_compose(alpha_outer, alpha_inner);
                    let arm_state = csubst_apply(&composed, g.cterm(source));
                    if is_sat(&arm_state.constraint) == SatResult::Unsat {
                        continue;
                    }
                    new_arms.push((composed, *target));
                }
                // Splice the composed arms in place of the lifted arm.
                let mut arms = outer.arms.clone();
                arms.splice(ai..=ai, new_arms);
                g.branch_edges.remove(inner_idx);
                // Indices may have shifted after the removal.
                let bi_now = g
                    .branch_edges
                    .iter()
                    .position(|b| b.from == outer.from)
                    .expect("outer branch still present");
                g.branch_edges[bi_now] = BranchEdge {
                    from: outer.from,
                    arms,
                };
                g.remove_vertex(mid);
                changed = true;
                continue 'outer;
            }
        }
        break;
    }
    prune_unreachable(&mut g);
    Ok((g, changed))
}

/// Drop vertices unreachable from the root (keeping the final vertex) along
/// with edges touching them.
fn prune_unreachable(g: &mut AprpGraph) {
    let mut keep: BTreeSet<VertexId> = BTreeSet::new();
    let mut stack = vec![g.root];
    while let Some(v) = stack.pop() {
        if !keep.insert(v) {
            continue;
        }
        for e in &g.step_edges {
            if e.from == v {
                stack.push(e.to);
            }
        }
        for b in &g.branch_edges {
            if b.from == v {
                for (_, to) in &b.arms {
                    stack.push(*to);
                }
            }
        }
        for c in &g.cover_edges {
            if c.from == v {
                stack.push(c.to);
            }
        }
    }
    keep.insert(g.final_vertex);
    let dead: Vec<VertexId> = g
        .vertices
        .keys()
        .copied()
        .filter(|id| !keep.contains(id))
        .collect();
    for id in dead {
        g.remove_vertex(id);
    }
    g.step_edges
        .retain(|e| keep.contains(&e.from) && keep.contains(&e.to));
    g.cover_edges
        .retain(|e| keep.contains(&e.from) && keep.contains(&e.to));
    g.branch_edges.retain(|b| keep.contains(&b.from));
    for b in &mut g.branch_edges {
        b.arms.retain(|(_, to)| keep.contains(to));
    }
}

#[derive(Clone, Debug)]
pub struct NormalizeReport {
    pub passes: usize,
    pub reached_fixpoint: bool,
}

/// Apply branch-branch lifting, step-branch lifting and step compression to
/// a fixpoint (or until the pass budget runs out; the graph stays valid
/// either way).
pub fn normalize(g: &AprpGraph, budget: usize) -> Result<(AprpGraph, NormalizeReport)> {
    let mut g = g.clone();
    let mut passes = 0;
    let mut reached_fixpoint = false;
    while passes < budget {
        passes += 1;
        let (g1, c1) = lift_branch_branch(&g)?;
        let (g2, c2) = lift_step_branch(&g1)?;
        let (g3, c3) = compress_steps(&g2)?;
        g = g3;
        if !(c1 || c2 || c3) {
            reached_fixpoint = true;
            break;
        }
    }
    Ok((
        g,
        NormalizeReport {
            passes,
            reached_fixpoint,
        },
    ))
}

/// One compiled rule per step edge: left-hand side the source configuration,
/// right-hand side the target configuration, and the target's constraint as
/// the guard (the source constraint plus every guard accumulated along the
/// edge). Variables are renamed canonically. Edges whose guard mentions
/// variables outside the left-hand side (abstraction ghosts) are skipped
/// and reported.
pub fn emit_rules(g: &AprpGraph, sem: &Semantics) -> Result<(Vec<CompiledRule>, Vec<String>)> {
    cheap_check(g)?;
    let mut edges = g.step_edges.clone();
    edges.sort_by_key(|e| (e.from, e.to));
    let mut rules = Vec::new();
    let mut skipped = Vec::new();
    for (idx, e) in edges.iter().enumerate() {
        let from = g.cterm(e.from);
        let to = g.cterm(e.to);
        if is_sat(&from.constraint) == SatResult::Unsat {
            return Err(Error::SemanticsBug(format!(
                "step edge v{}->v{} has an unsatisfiable source constraint",
                e.from, e.to
            )));
        }
        let requires = to.constraint.clone();
        let lhs_vars = free_vars(&from.config);
        let mut used = free_vars(&to.config);
        used.extend(requires.free_vars());
        if !used.is_subset(&lhs_vars) {
            skipped.push(format!(
                "step edge v{}->v{}: guard mentions ghost variables",
                e.from, e.to
            ));
            continue;
        }
        // Canonical variable hygiene: V0..Vk in left-to-right order of the
        // left-hand side.
        let mut rename = Subst::new();
        for (i, v) in vars_in_order(&from.config).iter().enumerate() {
            rename.insert(
                v.name.clone(),
                Term::var(Ident::new(&format!("V{i}")), v.sort.clone()),
            );
        }
        let lhs = apply_subst(&rename, &from.config);
        let rhs = apply_subst(&rename, &to.config);
        let requires = subst_constraint(&rename, &requires);
        sem.sig.check_term(&lhs, None)?;
        sem.sig.check_term(&rhs, None)?;
        let path = format!("v{}->v{}", e.from, e.to);
        let rule = Rule {
            name: Ident::new(&format!("{}-c{}", g.spec_name, idx)),
            priority: PRIORITY_COMPILED,
            lhs,
            rhs,
            requires,
            provenance: Provenance::Compiled {
                proof: g.spec_name.to_string(),
                path: path.clone(),
                consolidated: e.n,
            },
        };
        rules.push(CompiledRule {
            rule,
            proof: g.spec_name.to_string(),
            path,
            consolidated: e.n,
        });
    }
    Ok((rules, skipped))
}

/// The relative reduction in rewriting steps: `1 - compiled/original`.
pub fn delta_steps(original: usize, compiled: usize) -> Result<Rational64> {
    if original == 0 {
        return Err(Error::Precondition(
            "delta_steps needs original >= 1".into(),
        ));
    }
    let o =
        i64::try_from(original).map_err(|_| Error::Precondition("step count too large".into()))?;
    let c =
        i64::try_from(compiled).map_err(|_| Error::Precondition("step count too large".into()))?;
    Ok(Rational64::new(o - c, o))
}

// ------------------------------------------------------------------
// Ground-instance walking (validation oracle)
// ------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct WalkOutcome {
    pub end_vertex: VertexId,
    pub config: TermRef,
    pub rewrites: usize,
}

/// Drive a ground configuration along the graph's edges: step edges execute
/// their recorded number of concrete rewrites, covers re-instantiate into
/// the more general vertex, branches take the unique arm whose guard holds.
/// Used to validate that transformations preserve per-path endpoints and
/// rewrite counts.
///
/// The instantiation of the current vertex is threaded from the root:
/// rewriting introduces no fresh variables, so one ground substitution stays
/// valid along step and branch edges, and cover substitutions translate it
/// into the namespace of the more general vertex.
pub fn walk_ground(
    sem: &Semantics,
    g: &AprpGraph,
    start: &TermRef,
    max_hops: usize,
) -> Result<WalkOutcome> {
    let mut vertex = g.root;
    let mut config = simplify_term(&sem.sig, start);
    let mut rewrites = 0usize;
    let mut subst = match_term(&g.cterm(g.root).config, &config)?
        .ok_or_else(|| Error::Precondition("instance does not match the root vertex".into()))?;
    for _ in 0..max_hops {
        let state = g.cterm(vertex);
        // The instantiated vertex pattern must evaluate to the concrete
        // configuration, and its constraint must hold.
        let expected = simplify_term(&sem.sig, &apply_subst(&subst, &state.config));
        if expected != config {
            return Err(Error::Precondition(format!(
                "instance does not match vertex v{vertex}"
            )));
        }
        match instantiate_ground(sem, &subst, &state.constraint) {
            Some(true) => {}
            _ => {
                return Err(Error::Precondition(format!(
                    "instance violates the constraint of vertex v{vertex}"
                )))
            }
        }
        if vertex == g.final_vertex {
            return Ok(WalkOutcome {
                end_vertex: vertex,
                config,
                rewrites,
            });
        }
        if let Some(cover) = g.cover_out(vertex) {
            // Translate the instantiation into the covering vertex's
            // variable namespace.
            let mut next_subst = Subst::new();
            for (name, image) in cover.csubst.subst.iter() {
                next_subst.insert(
                    name.clone(),
                    simplify_term(&sem.sig, &apply_subst(&subst, image)),
                );
            }
            subst = next_subst;
            vertex = cover.to;
            continue;
        }
        if let Some(edge) = g.step_out(vertex).first().copied() {
            for _ in 0..edge.n {
                match step_concrete(sem, &config)? {
                    Some((next, _)) => config = next,
                    None => {
                        return Err(Error::Precondition(format!(
                            "instance got stuck inside step edge v{}->v{}",
                            edge.from, edge.to
                        )))
                    }
                }
            }
            rewrites += edge.n;
            vertex = edge.to;
            continue;
        }
        if let Some(branch) = g.branch_out(vertex) {
            let mut chosen = None;
            for (alpha, to) in &branch.arms {
                if !alpha.subst.is_empty() {
                    return Err(Error::Precondition(format!(
                        "branch arm at v{vertex} carries a structural substitution"
                    )));
                }
                let guard = instantiate_ground(sem, &subst, &alpha.constraint);
                match guard {
                    Some(true) => {
                        if chosen.is_some() {
                            return Err(Error::Precondition(format!(
                                "two branch arms hold at vertex v{vertex}"
                            )));
                        }
                        chosen = Some(*to);
                    }
                    Some(false) => {}
                    None => {
                        return Err(Error::Precondition(format!(
                            "branch guard at v{vertex} does not evaluate on the instance"
                        )))
                    }
                }
            }
            match chosen {
                Some(to) => {
                    vertex = to;
                    continue;
                }
                // No arm fires: the instance is stuck exactly here.
                None => {
                    return Ok(WalkOutcome {
                        end_vertex: vertex,
                        config,
                        rewrites,
                    })
                }
            }
        }
        // Leaf (stuck or pending vertex).
        return Ok(WalkOutcome {
            end_vertex: vertex,
            config,
            rewrites,
        });
    }
    Err(Error::FuelExhausted(max_hops))
}

fn instantiate_ground(sem: &Semantics, subst: &Subst, c: &Constraint) -> Option<bool> {
    let inst = c
        .clone()
        .map_terms(&mut |t| simplify_term(&sem.sig, &apply_subst(subst, t)));
    if inst.is_true() {
        Some(true)
    } else if inst.is_false() {
        Some(false)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aprp::{check_graph, construct_aprp, ProofConfig};
    use crate::builtins::{builtin, loop_sum_spec, opcode_specs};
    use crate::executor::run_concrete;
    use crate::parse::{parse_config, parse_semantics, parse_spec};
    use crate::semantics::integrate;

    fn add_graph(n: usize) -> (Semantics, AprpGraph) {
        let sem = builtin("mini-evm").unwrap();
        let specs = opcode_specs(&sem).unwrap();
        let add = specs.iter().find(|s| s.name.as_str() == "add").unwrap();
        let cfg = ProofConfig::new(n, 100, false, &add.options);
        let g = construct_aprp(&sem, add, &cfg).unwrap();
        (sem, g)
    }

    #[test]
    fn compress_merges_adjacent_steps() {
        // Unit chunks 2,2,1 collapse into one edge of length 5.
        let sem = builtin("mini-evm").unwrap();
        let specs = opcode_specs(&sem).unwrap();
        let add = specs.iter().find(|s| s.name.as_str() == "add").unwrap();
        let cfg = ProofConfig::new(2, 100, false, &add.options);
        let g = construct_aprp(&sem, add, &cfg).unwrap();
        let lens: Vec<usize> = g.step_edges.iter().map(|e| e.n).collect();
        assert_eq!(lens, vec![2, 2, 1]);
        let (c, changed) = compress_steps(&g).unwrap();
        assert!(changed);
        assert_eq!(c.step_edges.len(), 1);
        assert_eq!(c.step_edges[0].n, 5);
        assert!(check_graph(&sem, &c).is_empty());
        // Compressing again is the identity.
        let (c2, changed2) = compress_steps(&c).unwrap();
        assert!(!changed2);
        assert_eq!(c2.step_edges, c.step_edges);
    }

    #[test]
    fn add_proof_emits_the_consolidated_rule() {
        let (sem, g) = add_graph(1);
        let (n, report) = normalize(&g, 50).unwrap();
        assert!(report.reached_fixpoint);
        assert!(check_graph(&sem, &n).is_empty());
        let (rules, skipped) = emit_rules(&n, &sem).unwrap();
        assert!(skipped.is_empty());
        assert_eq!(rules.len(), 1);
        let compiled = &rules[0];
        assert_eq!(compiled.consolidated, 5);
        let text = crate::print::print_rule(&sem.sig, &compiled.rule);
        // The consolidated rule pops two words, pushes the sum, advances the
        // program counter and charges three gas, guarded by the stack bound
        // and the gas check.
        assert!(text.contains("#next(ADD)"), "{text}");
        assert!(text.contains("+Int 1"), "{text}");
        assert!(text.contains("-Int 3"), "{text}");
        assert!(text.contains(">=Int 3"), "{text}");
        assert!(text.contains("<=Int 1024"), "{text}");
        assert!(text.contains("priority 10"), "{text}");

        // Applying the compiled rule to a ground instance equals running the
        // original semantics for five steps.
        let merged = integrate(&sem, &[compiled.rule.clone()]).unwrap();
        let cfg = parse_config(
            "<k> #next(ADD) </k> <wordStack> 3 : 4 : nil </wordStack> <pc> 0 </pc> \
             <gas> 100 </gas> <code> cnil </code> <jumpdests> dnil </jumpdests>",
            &sem,
        )
        .unwrap();
        let original = run_concrete(&sem, &cfg, 100).unwrap();
        let fast = run_concrete(&merged, &cfg, 100).unwrap();
        assert_eq!(original.config, fast.config);
        assert_eq!(original.steps, 5);
        assert_eq!(fast.steps, 1);
        assert_eq!(
            delta_steps(original.steps, fast.steps).unwrap(),
            Rational64::new(4, 5)
        );
    }

    #[test]
    fn delta_steps_examples() {
        assert_eq!(delta_steps(5, 1).unwrap(), Rational64::new(4, 5));
        assert_eq!(delta_steps(7, 7).unwrap(), Rational64::new(0, 1));
        assert!(delta_steps(0, 0).is_err());
    }

    #[test]
    fn loop_proof_compiles_to_three_rules() {
        let sem = builtin("loop-lang").unwrap();
        let spec = loop_sum_spec(&sem).unwrap();
        let cfg = ProofConfig::new(1, 1000, false, &spec.options);
        let g = construct_aprp(&sem, &spec, &cfg).unwrap();
        let (n, report) = normalize(&g, 50).unwrap();
        assert!(report.reached_fixpoint);
        let violations = check_graph(&sem, &n);
        assert!(violations.is_empty(), "{violations:?}");
        // Prologue rule, loop-body rule, loop-exit rule.
        let (rules, skipped) = emit_rules(&n, &sem).unwrap();
        assert!(skipped.is_empty());
        assert_eq!(rules.len(), 3);
        let mut consolidated: Vec<usize> = rules.iter().map(|r| r.consolidated).collect();
        consolidated.sort();
        assert_eq!(consolidated, vec![10, 16, 18]);

        // The compiled semantics runs the whole program in ~1000 rewrites.
        let merged = integrate(
            &sem,
            &rules.iter().map(|r| r.rule.clone()).collect::<Vec<_>>(),
        )
        .unwrap();
        let start = crate::builtins::loop_sum_config(&sem).unwrap();
        let original = run_concrete(&sem, &start, 50_000).unwrap();
        let fast = run_concrete(&merged, &start, 50_000).unwrap();
        assert_eq!(original.config, fast.config);
        assert!(original.steps >= 10_000, "original {}", original.steps);
        assert!(fast.steps <= 2_100, "compiled {}", fast.steps);
    }

    #[test]
    fn nested_conditionals_flatten_to_one_branch_layer() {
        let sem = parse_semantics(
            r#"
module nested

op s0 : -> KItem
op s1 : -> KItem
op s2 : -> KItem

configuration <k> K </k> <a> Int </a> <b> Int </b>

rule first-low: <k> s0 ~> REST </k> <a> A </a> => <k> s1 ~> REST </k> requires A <Int 0
rule first-high: <k> s0 ~> REST </k> <a> A </a> => <k> s1 ~> REST </k> requires A >=Int 0
rule second-low: <k> s1 ~> REST </k> <b> B </b> => <k> s2 ~> REST </k> requires B <Int 0
rule second-high: <k> s1 ~> REST </k> <b> B </b> => <k> s2 ~> REST </k> requires B >=Int 0
"#,
        )
        .unwrap();
        let spec = parse_spec(
            "\
spec nested
init <k> s0 ~> REST:K </k> <a> A:Int </a> <b> B:Int </b>
final <k> REST </k> <a> AF:Int </a> <b> BF:Int </b>
",
            &sem,
        )
        .unwrap();
        let cfg = ProofConfig::new(1, 200, false, &spec.options);
        let g = construct_aprp(&sem, &spec, &cfg).unwrap();
        assert!(g.is_complete());
        assert_eq!(g.branch_edges.len(), 3, "one outer and two inner splits");
        let (n, _) = normalize(&g, 50).unwrap();
        assert!(check_graph(&sem, &n).is_empty());
        assert_eq!(n.branch_edges.len(), 1, "flattened to a single branch");
        assert_eq!(n.branch_edges[0].from, n.root);
        assert_eq!(n.branch_edges[0].arms.len(), 4, "two nested 2-way splits");
        // Every arm guard is a conjunction of one a-test and one b-test.
        for (alpha, _) in &n.branch_edges[0].arms {
            let text = crate::print::print_constraint(&sem.sig, &alpha.constraint);
            assert!(text.contains("A:Int") && text.contains("B:Int"), "{text}");
        }
        // Ground instances reach the same endpoint through original and
        // transformed graphs, with the same rewrite totals.
        for (a, b) in [(-3, -4), (-3, 4), (3, -4), (3, 4)] {
            let start = parse_config(
                &format!("<k> s0 ~> .K </k> <a> {a} </a> <b> {b} </b>"),
                &sem,
            )
            .unwrap();
            let w1 = walk_ground(&sem, &g, &start, 100).unwrap();
            let w2 = walk_ground(&sem, &n, &start, 100).unwrap();
            assert_eq!(w1.config, w2.config);
            assert_eq!(w1.rewrites, w2.rewrites);
            let direct = run_concrete(&sem, &start, 100).unwrap();
            assert_eq!(direct.config, w2.config);
            assert_eq!(direct.steps, w2.rewrites);
        }
    }

    #[test]
    fn contradictory_composition_is_pruned() {
        let sem = parse_semantics(
            r#"
module prune

op s0 : -> KItem
op s1 : -> KItem
op s2 : -> KItem

configuration <k> K </k> <a> Int </a>

rule first-low: <k> s0 ~> REST </k> <a> A </a> => <k> s1 ~> REST </k> requires A <Int 0
rule first-high: <k> s0 ~> REST </k> <a> A </a> => <k> s1 ~> REST </k> requires A >=Int 0
rule second-low: <k> s1 ~> REST </k> <a> A </a> => <k> s2 ~> REST </k> requires A <Int 5
rule second-high: <k> s1 ~> REST </k> <a> A </a> => <k> s2 ~> REST </k> requires A >=Int 5
"#,
        )
        .unwrap();
        let spec = parse_spec(
            "\
spec prune
init <k> s0 ~> REST:K </k> <a> A:Int </a>
final <k> REST </k> <a> AF:Int </a>
",
            &sem,
        )
        .unwrap();
        let cfg = ProofConfig::new(1, 200, false, &spec.options);
        let g = construct_aprp(&sem, &spec, &cfg).unwrap();
        let (n, _) = normalize(&g, 50).unwrap();
        assert!(check_graph(&sem, &n).is_empty());
        // A < 0 && A >= 5 is impossible: three arms survive out of four.
        assert_eq!(n.branch_edges.len(), 1);
        assert_eq!(n.branch_edges[0].arms.len(), 3);
    }
}

#[cfg(test)]
mod degenerate_tests {
    use super::*;
    use crate::aprp::{check_graph, construct_aprp, BranchEdge, ProofConfig, Status};
    use crate::builtins::{builtin, opcode_specs};
    use crate::constraint::CSubst;

    #[test]
    fn single_entailed_arm_degenerates_to_step_concatenation() {
        let sem = builtin("mini-evm").unwrap();
        let specs = opcode_specs(&sem).unwrap();
        let add = specs.iter().find(|s| s.name.as_str() == "add").unwrap();
        let cfg = ProofConfig::new(1, 100, false, &add.options);
        let mut g = construct_aprp(&sem, add, &cfg).unwrap();

        // Splice a trivially guarded single-arm branch into the chain: the
        // third step edge now goes through an identity branch.
        let edge = g.step_edges[2].clone();
        let mid_state = g.cterm(edge.from).clone();
        let split = g.add_vertex(mid_state, Status::Reached);
        g.step_edges
            .retain(|e| !(e.from == edge.from && e.to == edge.to));
        g.branch_edges.push(BranchEdge {
            from: edge.from,
            arms: vec![(CSubst::identity(), split)],
        });
        g.step_edges.push(StepEdge {
            from: split,
            to: edge.to,
            n: edge.n,
        });
        let violations = check_graph(&sem, &g);
        assert!(violations.is_empty(), "{violations:?}");

        let (n, report) = normalize(&g, 50).unwrap();
        assert!(report.reached_fixpoint);
        assert!(
            n.branch_edges.is_empty(),
            "single entailed arm must dissolve"
        );
        assert_eq!(n.step_edges.len(), 1);
        assert_eq!(n.step_edges[0].n, 5);
        assert!(check_graph(&sem, &n).is_empty());
    }

    #[test]
    fn empty_proof_compiles_to_no_rules() {
        // A spec whose initial state is already final yields a cover-only
        // graph, no step edges, no compiled rules; integration with nothing
        // leaves the semantics unchanged.
        let sem = builtin("mini-evm").unwrap();
        let spec = crate::parse::parse_spec(
            "\
spec noop
init <k> REST:K </k> <wordStack> WS:WordStack </wordStack> <pc> PC:Int </pc> <gas> G:Int </gas> <code> C:Code </code> <jumpdests> D:Dests </jumpdests>
final <k> REST </k> <wordStack> WSF:WordStack </wordStack> <pc> PCF:Int </pc> <gas> GF:Int </gas> <code> CF:Code </code> <jumpdests> DF:Dests </jumpdests>
",
            &sem,
        )
        .unwrap();
        let g = construct_aprp(&sem, &spec, &ProofConfig::default()).unwrap();
        let (n, _) = normalize(&g, 50).unwrap();
        let (rules, skipped) = emit_rules(&n, &sem).unwrap();
        assert!(rules.is_empty() && skipped.is_empty());
        let merged = crate::semantics::integrate(&sem, &[]).unwrap();
        assert_eq!(
            crate::print::print_semantics(&merged),
            crate::print::print_semantics(&sem)
        );
    }

    #[test]
    fn normalize_with_zero_budget_returns_valid_graph() {
        let sem = builtin("mini-evm").unwrap();
        let specs = opcode_specs(&sem).unwrap();
        let add = specs.iter().find(|s| s.name.as_str() == "add").unwrap();
        let cfg = ProofConfig::new(1, 100, false, &add.options);
        let g = construct_aprp(&sem, add, &cfg).unwrap();
        let (out, report) = normalize(&g, 0).unwrap();
        assert!(!report.reached_fixpoint);
        assert_eq!(report.passes, 0);
        assert!(check_graph(&sem, &out).is_empty());
        assert_eq!(out.step_edges.len(), g.step_edges.len());
    }
}
