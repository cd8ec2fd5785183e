//! All-path reachability proofs: the proof graph (vertices with step, cover
//! and branch edges) and its worklist construction via bounded symbolic
//! execution, with loop handling by anti-unification based abstraction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::constraint::{common_constraints, csubst_apply, term_key, CSubst, CTerm};
use crate::error::{Error, Result};
use crate::executor::{execute, implies, implies_rigid};
use crate::semantics::{
    k_head_ctor, ProgramSpec, SameLoopPolicy, Semantics, SpecOptions, TerminalPolicy,
};
use crate::solver::{entails, is_sat, EntailResult, SatResult};
use crate::term::{anti_unify, vars_in_order, Ident, Subst, Term, VarSupply};

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pending,
    Reached,
    Stuck,
    Final,
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub cterm: CTerm,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepEdge {
    pub from: VertexId,
    pub to: VertexId,
    pub n: usize,
}

#[derive(Clone, Debug)]
pub struct CoverEdge {
    pub from: VertexId,
    pub to: VertexId,
    pub csubst: CSubst,
}

#[derive(Clone, Debug)]
pub struct BranchEdge {
    pub from: VertexId,
    pub arms: Vec<(CSubst, VertexId)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub vertex: VertexId,
    pub action: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<VertexId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arms: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct AprpGraph {
    pub semantics_name: Ident,
    pub spec_name: Ident,
    pub vertices: BTreeMap<VertexId, Vertex>,
    pub step_edges: Vec<StepEdge>,
    pub cover_edges: Vec<CoverEdge>,
    pub branch_edges: Vec<BranchEdge>,
    pub root: VertexId,
    pub final_vertex: VertexId,
    pub iteration_log: Vec<IterationRecord>,
    /// Pending vertices remained when the iteration bound was hit.
    pub partial: bool,
    next_id: VertexId,
}

impl AprpGraph {
    fn new(semantics_name: Ident, spec_name: Ident, init: CTerm, final_state: CTerm) -> AprpGraph {
        let mut vertices = BTreeMap::new();
        vertices.insert(
            0,
            Vertex {
                cterm: init,
                status: Status::Pending,
            },
        );
        vertices.insert(
            1,
            Vertex {
                cterm: final_state,
                status: Status::Final,
            },
        );
        AprpGraph {
            semantics_name,
            spec_name,
            vertices,
            step_edges: Vec::new(),
            cover_edges: Vec::new(),
            branch_edges: Vec::new(),
            root: 0,
            final_vertex: 1,
            iteration_log: Vec::new(),
            partial: false,
            next_id: 2,
        }
    }

    /// Reassemble a graph from serialized parts.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        semantics_name: Ident,
        spec_name: Ident,
        vertices: BTreeMap<VertexId, Vertex>,
        step_edges: Vec<StepEdge>,
        cover_edges: Vec<CoverEdge>,
        branch_edges: Vec<BranchEdge>,
        root: VertexId,
        final_vertex: VertexId,
        iteration_log: Vec<IterationRecord>,
        partial: bool,
    ) -> Result<AprpGraph> {
        if !vertices.contains_key(&root) || !vertices.contains_key(&final_vertex) {
            return Err(Error::Format(
                "proof graph lacks root or final vertex".into(),
            ));
        }
        let next_id = vertices.keys().max().map_or(0, |m| m + 1);
        Ok(AprpGraph {
            semantics_name,
            spec_name,
            vertices,
            step_edges,
            cover_edges,
            branch_edges,
            root,
            final_vertex,
            iteration_log,
            partial,
            next_id,
        })
    }

    pub fn add_vertex(&mut self, cterm: CTerm, status: Status) -> VertexId {
        let id = self.next_id;
        self.next_id += 1;
        self.vertices.insert(id, Vertex { cterm, status });
        id
    }

    pub fn remove_vertex(&mut self, id: VertexId) {
        self.vertices.remove(&id);
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.get(&id)
    }

    pub fn cterm(&self, id: VertexId) -> &CTerm {
        &self.vertices[&id].cterm
    }

    pub fn status(&self, id: VertexId) -> Status {
        self.vertices[&id].status
    }

    pub fn set_status(&mut self, id: VertexId, status: Status) {
        self.vertices.get_mut(&id).expect("vertex exists").status = status;
    }

    pub fn pending(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .filter(|(_, v)| v.status == Status::Pending)
            .map(|(id, _)| *id)
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        !self.partial && self.pending().is_empty()
    }

    pub fn step_out(&self, v: VertexId) -> Vec<&StepEdge> {
        self.step_edges.iter().filter(|e| e.from == v).collect()
    }

    pub fn branch_out(&self, v: VertexId) -> Option<&BranchEdge> {
        self.branch_edges.iter().find(|e| e.from == v)
    }

    pub fn cover_out(&self, v: VertexId) -> Option<&CoverEdge> {
        self.cover_edges.iter().find(|e| e.from == v)
    }

    /// In-degree counting step and branch-arm and cover edges.
    pub fn in_degree(&self, v: VertexId) -> usize {
        let steps = self.step_edges.iter().filter(|e| e.to == v).count();
        let covers = self.cover_edges.iter().filter(|e| e.to == v).count();
        let arms = self
            .branch_edges
            .iter()
            .flat_map(|b| b.arms.iter())
            .filter(|(_, to)| *to == v)
            .count();
        steps + covers + arms
    }

    /// Ancestors of `v` along reversed step and branch edges (cover edges
    /// are excluded to avoid cycles), deduplicated, nearest first.
    pub fn reachable_up(&self, v: VertexId) -> Result<Vec<VertexId>> {
        if !self.vertices.contains_key(&v) {
            return Err(Error::Precondition(format!("unknown vertex id {v}")));
        }
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut queue: VecDeque<VertexId> = VecDeque::new();
        let mut out = Vec::new();
        queue.push_back(v);
        seen.insert(v);
        while let Some(cur) = queue.pop_front() {
            let mut preds: Vec<VertexId> = Vec::new();
            for e in &self.step_edges {
                if e.to == cur {
                    preds.push(e.from);
                }
            }
            for b in &self.branch_edges {
                if b.arms.iter().any(|(_, to)| *to == cur) {
                    preds.push(b.from);
                }
            }
            for p in preds {
                if seen.insert(p) {
                    out.push(p);
                    queue.push_back(p);
                }
            }
        }
        Ok(out)
    }
}

/// Knobs of one proof construction run. The step bound `max_step` limits
/// rewrites per `execute` call; `max_iterations` bounds worklist pops; the
/// terminal and sameloop predicates come from the specification's options
/// unless overridden.
#[derive(Clone, Debug)]
pub struct ProofConfig {
    pub max_step: usize,
    pub max_iterations: usize,
    pub precise: bool,
    pub terminal: TerminalPolicy,
    pub sameloop: SameLoopPolicy,
}

impl ProofConfig {
    pub fn new(
        max_step: usize,
        max_iterations: usize,
        precise: bool,
        options: &SpecOptions,
    ) -> ProofConfig {
        ProofConfig {
            max_step: max_step.max(1),
            max_iterations: max_iterations.max(1),
            precise,
            terminal: options.terminal.clone(),
            sameloop: options.sameloop.clone(),
        }
    }
}

impl Default for ProofConfig {
    fn default() -> Self {
        ProofConfig::new(1, 1000, false, &SpecOptions::default())
    }
}

/// The abstraction of two same-shaped states: anti-unification of the
/// configurations plus the conjuncts common to both constraints. This is
/// the weak structural loop invariant used to close loops.
pub fn generalize(t1: &CTerm, t2: &CTerm, fresh: &mut VarSupply) -> Result<CTerm> {
    let (config, _, _) = anti_unify(&t1.config, &t2.config, fresh)?;
    let constraint = common_constraints(&t1.constraint, &t2.constraint);
    Ok(CTerm::new(config, constraint))
}

fn sameloop(policy: &SameLoopPolicy, sem: &Semantics, a: &CTerm, b: &CTerm) -> bool {
    let k_label = sem.sig.k_label();
    let heads_match = match (
        k_head_ctor(&a.config, &k_label),
        k_head_ctor(&b.config, &k_label),
    ) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    };
    if !heads_match {
        return false;
    }
    let cells_equal = |labels: &[Ident]| -> bool {
        labels.iter().all(|label| {
            let av = a.config.as_cells().and_then(|bag| bag.get(label));
            let bv = b.config.as_cells().and_then(|bag| bag.get(label));
            av.is_some() && av == bv
        })
    };
    match policy {
        SameLoopPolicy::Off => false,
        SameLoopPolicy::Default => match sem.sig.pc_cell() {
            Some(cell) => cells_equal(&[cell.label.clone()]),
            None => true,
        },
        SameLoopPolicy::HeadAndCells(cells) => cells_equal(cells),
    }
}

/// Canonical key of a constrained term up to variable renaming, used to
/// reuse an existing abstraction vertex instead of spawning an equivalent
/// one (which is what terminates loops in fast mode).
fn canon_cterm_key(t: &CTerm) -> String {
    let mut order: Vec<crate::term::Var> = vars_in_order(&t.config);
    let mut seen: BTreeSet<Ident> = order.iter().map(|v| v.name.clone()).collect();
    t.constraint.visit_terms(&mut |term| {
        for v in vars_in_order(term) {
            if seen.insert(v.name.clone()) {
                order.push(v);
            }
        }
    });
    let mut rename = Subst::new();
    for (i, v) in order.iter().enumerate() {
        rename.insert(
            v.name.clone(),
            Term::var(Ident::new(&format!("C{i}")), v.sort.clone()),
        );
    }
    let config = crate::term::apply_subst(&rename, &t.config);
    let constraint = crate::constraint::subst_constraint(&rename, &t.constraint);
    format!(
        "{}|{}",
        term_key(&config),
        crate::constraint::canon_key(&constraint)
    )
}

/// Construct the all-path reachability proof for a specification.
///
/// Worklist construction, FIFO order: pop a pending vertex; try the terminal
/// check (subsumption by the final state, shared spec variables rigid); in
/// precise mode try subsumption by each ancestor; fold sameloop ancestors
/// into an abstraction and cover into it when it subsumes the state;
/// otherwise execute up to `max_step` rewrites, recording a step edge and,
/// at control-flow splits, a branch edge with pending arm vertices.
pub fn construct_aprp(sem: &Semantics, spec: &ProgramSpec, cfg: &ProofConfig) -> Result<AprpGraph> {
    if is_sat(&spec.init.constraint) == SatResult::Unsat {
        return Err(Error::Precondition(
            "specification initial state is unsatisfiable".into(),
        ));
    }
    let mut g = AprpGraph::new(
        sem.name.clone(),
        spec.name.clone(),
        spec.init.clone(),
        spec.final_state.clone(),
    );
    let mut rigid: BTreeSet<Ident> = crate::term::free_vars(&spec.init.config);
    rigid.extend(spec.init.constraint.free_vars());

    let mut supply = VarSupply::new();
    let mut interned: BTreeMap<String, VertexId> = BTreeMap::new();
    let mut worklist: VecDeque<VertexId> = VecDeque::new();
    worklist.push_back(g.root);

    let mut iterations = 0usize;
    loop {
        let v = loop {
            match worklist.pop_front() {
                None => break None,
                Some(v) if g.status(v) == Status::Pending => break Some(v),
                Some(_) => continue,
            }
        };
        let v = match v {
            None => break,
            Some(v) => v,
        };
        if iterations >= cfg.max_iterations {
            worklist.push_front(v);
            break;
        }
        iterations += 1;
        let record = |action: &str, target: Option<VertexId>, n: Option<usize>| IterationRecord {
            iteration: iterations,
            vertex: v,
            action: action.to_string(),
            target,
            n,
            arms: None,
        };

        // Terminal check: subsumption by the final specification state.
        let state = g.cterm(v).clone();
        if let Some(alpha) = implies_rigid(&state, g.cterm(g.final_vertex), &rigid) {
            let final_vertex = g.final_vertex;
            g.cover_edges.push(CoverEdge {
                from: v,
                to: final_vertex,
                csubst: alpha,
            });
            g.set_status(v, Status::Reached);
            g.iteration_log
                .push(record("terminal", Some(final_vertex), None));
            continue;
        }

        // Ancestor scan: exact subsumption in precise mode, sameloop
        // abstraction accumulation otherwise.
        let mut abstracted = state.clone();
        let mut did_abstract = false;
        let mut covered = false;
        for anc in g.reachable_up(v)? {
            // Covers from the ancestor scan must make structural progress;
            // otherwise a branch arm (same configuration as its source,
            // stronger constraint) covers straight back into its own source
            // and the proof goes circular.
            if g.cterm(anc).config == state.config {
                continue;
            }
            if cfg.precise {
                if let Some(alpha) = implies(&state, g.cterm(anc)) {
                    g.cover_edges.push(CoverEdge {
                        from: v,
                        to: anc,
                        csubst: alpha,
                    });
                    g.set_status(v, Status::Reached);
                    g.iteration_log.push(record("covered", Some(anc), None));
                    covered = true;
                    break;
                }
            }
            if sameloop(&cfg.sameloop, sem, &state, g.cterm(anc)) {
                abstracted = generalize(&abstracted, g.cterm(anc), &mut supply)?;
                did_abstract = true;
            }
        }
        if covered {
            continue;
        }

        if did_abstract && abstracted.config != state.config {
            // Reuse an existing equivalent abstraction vertex when there is
            // one; otherwise the abstraction becomes a new pending vertex.
            let key = canon_cterm_key(&abstracted);
            let target = interned.get(&key).copied();
            let (target_state, existing) = match target {
                Some(id) => (g.cterm(id).clone(), Some(id)),
                None => (abstracted.clone(), None),
            };
            if let Some(alpha) = implies(&state, &target_state) {
                let target_id = match existing {
                    Some(id) => id,
                    None => {
                        let id = g.add_vertex(abstracted.clone(), Status::Pending);
                        interned.insert(key, id);
                        worklist.push_back(id);
                        id
                    }
                };
                g.cover_edges.push(CoverEdge {
                    from: v,
                    to: target_id,
                    csubst: alpha,
                });
                g.set_status(v, Status::Reached);
                g.iteration_log
                    .push(record("abstracted", Some(target_id), None));
                continue;
            }
            // Abstraction did not subsume the state (for example an unknown
            // from the solver); fall through to execution.
        }

        let result = execute(sem, &state, cfg.max_step)?;
        if result.applied == 0 && result.branches.is_empty() {
            g.set_status(v, Status::Stuck);
            g.iteration_log.push(record("stuck", None, None));
            continue;
        }

        let branch_from = if result.applied > 0 {
            let target = g.add_vertex(result.next.clone(), Status::Pending);
            g.step_edges.push(StepEdge {
                from: v,
                to: target,
                n: result.applied,
            });
            g.set_status(v, Status::Reached);
            if result.branches.is_empty() {
                worklist.push_back(target);
                g.iteration_log
                    .push(record("stepped", Some(target), Some(result.applied)));
                continue;
            }
            g.set_status(target, Status::Reached);
            target
        } else {
            // The vertex itself is a control-flow split; the branch edge
            // starts here without a preceding step edge.
            g.set_status(v, Status::Reached);
            v
        };

        let mut arms = Vec::new();
        for alpha in result.branches {
            let arm_state = csubst_apply(&alpha, g.cterm(branch_from));
            let arm = g.add_vertex(arm_state, Status::Pending);
            worklist.push_back(arm);
            arms.push((alpha, arm));
        }
        g.iteration_log.push(IterationRecord {
            iteration: iterations,
            vertex: v,
            action: "branched".to_string(),
            target: Some(branch_from),
            n: Some(result.applied),
            arms: Some(arms.len()),
        });
        g.branch_edges.push(BranchEdge {
            from: branch_from,
            arms,
        });
    }

    g.partial = !g.pending().is_empty();
    Ok(g)
}

// ------------------------------------------------------------------
// Graph validation
// ------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub message: String,
}

impl Violation {
    fn new(msg: impl Into<String>) -> Violation {
        Violation {
            message: msg.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

/// Audit every graph invariant: edge endpoints, step lengths, the cover
/// application law, branch arm satisfiability, and a symbolic replay of
/// every step edge.
pub fn check_graph(sem: &Semantics, g: &AprpGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let exists = |id: VertexId| g.vertices.contains_key(&id);

    if !exists(g.root) {
        out.push(Violation::new("root vertex missing"));
    }
    if !exists(g.final_vertex) {
        out.push(Violation::new("final vertex missing"));
    }

    for (id, vertex) in &g.vertices {
        if is_sat(&vertex.cterm.constraint) == SatResult::Unsat {
            out.push(Violation::new(format!(
                "vertex {id}: unsatisfiable constraint"
            )));
        }
        let has_out = g.step_out(*id).first().is_some()
            || g.branch_out(*id).is_some()
            || g.cover_out(*id).is_some();
        match vertex.status {
            Status::Reached => {
                if !has_out {
                    out.push(Violation::new(format!(
                        "vertex {id}: reached but has no outgoing edge"
                    )));
                }
            }
            Status::Final => {
                if has_out {
                    out.push(Violation::new(format!(
                        "final vertex {id} has outgoing edges"
                    )));
                }
            }
            Status::Pending | Status::Stuck => {}
        }
        if g.step_out(*id).len() > 1 {
            out.push(Violation::new(format!(
                "vertex {id}: more than one outgoing step edge"
            )));
        }
        if !g.step_out(*id).is_empty() && g.branch_out(*id).is_some() {
            out.push(Violation::new(format!(
                "vertex {id}: has both an outgoing step edge and a branch edge"
            )));
        }
    }

    for (i, e) in g.step_edges.iter().enumerate() {
        if !exists(e.from) || !exists(e.to) {
            out.push(Violation::new(format!("step edge {i}: dangling endpoint")));
            continue;
        }
        if e.n == 0 {
            out.push(Violation::new(format!(
                "step edge {i} ({} -> {}): length 0",
                e.from, e.to
            )));
            continue;
        }
        // Symbolic replay: n rewrites from the source must land exactly on
        // the target.
        match execute(sem, g.cterm(e.from), e.n) {
            Err(err) => out.push(Violation::new(format!(
                "step edge {i} ({} -> {}): replay failed: {err}",
                e.from, e.to
            ))),
            Ok(r) => {
                if r.applied != e.n {
                    out.push(Violation::new(format!(
                        "step edge {i} ({} -> {}): replay applied {} of {} rewrites",
                        e.from, e.to, r.applied, e.n
                    )));
                } else if r.next != *g.cterm(e.to) {
                    out.push(Violation::new(format!(
                        "step edge {i} ({} -> {}): replay does not reach the target state",
                        e.from, e.to
                    )));
                }
            }
        }
    }

    for (i, e) in g.cover_edges.iter().enumerate() {
        if !exists(e.from) || !exists(e.to) {
            out.push(Violation::new(format!("cover edge {i}: dangling endpoint")));
            continue;
        }
        let applied = csubst_apply(&e.csubst, g.cterm(e.to));
        let from = g.cterm(e.from);
        if applied.config != from.config {
            out.push(Violation::new(format!(
                "cover edge {i} ({} -> {}): substitution does not reproduce the source configuration",
                e.from, e.to
            )));
        } else if applied.constraint != from.constraint {
            // Accept semantically equivalent constraints.
            let fwd = entails(&from.constraint, &applied.constraint);
            let bwd = entails(&applied.constraint, &from.constraint);
            if fwd != EntailResult::Yes || bwd != EntailResult::Yes {
                out.push(Violation::new(format!(
                    "cover edge {i} ({} -> {}): constraints differ under the substitution",
                    e.from, e.to
                )));
            }
        }
    }

    for (i, b) in g.branch_edges.iter().enumerate() {
        if !exists(b.from) {
            out.push(Violation::new(format!("branch edge {i}: dangling source")));
            continue;
        }
        if b.arms.is_empty() {
            out.push(Violation::new(format!("branch edge {i}: no arms")));
        }
        for (j, (alpha, to)) in b.arms.iter().enumerate() {
            if !exists(*to) {
                out.push(Violation::new(format!(
                    "branch edge {i} arm {j}: dangling target"
                )));
                continue;
            }
            let expected = csubst_apply(alpha, g.cterm(b.from));
            if expected != *g.cterm(*to) {
                out.push(Violation::new(format!(
                    "branch edge {i} arm {j}: target is not the guarded specialization of the source"
                )));
            }
            if is_sat(&g.cterm(*to).constraint) == SatResult::Unsat {
                out.push(Violation::new(format!(
                    "branch edge {i} arm {j}: unsatisfiable combined constraint"
                )));
            }
        }
    }

    out
}


#[cfg(test)]
mod generalize_tests {
    use super::*;
    use crate::builtins::builtin;
    use crate::parse::parse_cterm;
    use crate::proof_json;
    use crate::term::free_vars;

    #[test]
    fn generalize_abstracts_differing_loop_values() {
        // Two visits of the same loop head differing only in the bound
        // variables generalize to a head with fresh variables; only atoms
        // common to both constraints survive.
        let sem = builtin("loop-lang").unwrap();
        let body = "seq(assign(x, ecall(add1, evar(x))), assign(i, eadd(evar(i), elit(1))))";
        let t1 = parse_cterm(
            &format!("<k> while(elt(evar(i), elit(1000)), {body}) </k> <env> bind(x, 0, bind(i, 0, emptyEnv)) </env>"),
            "G:Int >=Int 3",
            &sem,
        )
        .unwrap();
        let t2 = parse_cterm(
            &format!("<k> while(elt(evar(i), elit(1000)), {body}) </k> <env> bind(x, 5, bind(i, 1, emptyEnv)) </env>"),
            "G:Int >=Int 3 andBool G <Int 100",
            &sem,
        )
        .unwrap();
        let mut supply = VarSupply::new();
        let gen = generalize(&t1, &t2, &mut supply).unwrap();
        let vars = free_vars(&gen.config);
        assert_eq!(vars.len(), 2, "x and i values become fresh variables");
        assert!(vars.iter().all(|v| v.as_str().starts_with("V#")));
        // Identical differences share one variable (standard lgg reuse).
        let t3 = parse_cterm(
            &format!("<k> while(elt(evar(i), elit(1000)), {body}) </k> <env> bind(x, 1, bind(i, 1, emptyEnv)) </env>"),
            "true",
            &sem,
        )
        .unwrap();
        let lockstep = generalize(&t1, &t3, &mut supply).unwrap();
        assert_eq!(free_vars(&lockstep.config).len(), 1);
        // The shared gas atom survives; the one-sided bound does not.
        let c = crate::print::print_constraint(&sem.sig, &gen.constraint);
        assert_eq!(c, "G:Int >=Int 3");
        // Identity case.
        let same = generalize(&t1, &t1, &mut supply).unwrap();
        assert_eq!(same.config, t1.config);
        assert_eq!(same.constraint, t1.constraint);
    }

    #[test]
    fn construction_is_deterministic_byte_for_byte() {
        let sem = builtin("loop-lang").unwrap();
        let spec = crate::builtins::loop_sum_spec(&sem).unwrap();
        let cfg = ProofConfig::new(1, 1000, false, &spec.options);
        let a = construct_aprp(&sem, &spec, &cfg).unwrap();
        let b = construct_aprp(&sem, &spec, &cfg).unwrap();
        assert_eq!(proof_json::to_json(&sem, &a), proof_json::to_json(&sem, &b));
    }
}
