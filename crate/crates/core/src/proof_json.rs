//! Versioned serialization of proof graphs: vertices carry their
//! configuration and constraint in canonical text, edges refer to vertex
//! ids. Output is deterministic and round-trips exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::aprp::{AprpGraph, BranchEdge, CoverEdge, IterationRecord, Status, StepEdge, Vertex};
use crate::constraint::CSubst;
use crate::error::{Error, Result};
use crate::parse::{parse_constraint, parse_cterm, parse_term};
use crate::print::{print_constraint, print_cterm, print_term};
use crate::semantics::Semantics;
use crate::term::{Ident, Subst};

pub const FORMAT: &str = "prooforge-aprp";
pub const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ProofFile {
    format: String,
    version: u32,
    semantics: String,
    spec: String,
    partial: bool,
    root: usize,
    #[serde(rename = "final")]
    final_vertex: usize,
    vertices: Vec<VertexRec>,
    step_edges: Vec<StepRec>,
    cover_edges: Vec<CoverRec>,
    branch_edges: Vec<BranchRec>,
    iteration_log: Vec<IterationRecord>,
}

#[derive(Serialize, Deserialize)]
struct VertexRec {
    id: usize,
    status: Status,
    config: String,
    constraint: String,
}

#[derive(Serialize, Deserialize)]
struct StepRec {
    from: usize,
    to: usize,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct CoverRec {
    from: usize,
    to: usize,
    subst: BTreeMap<String, String>,
    constraint: String,
}

#[derive(Serialize, Deserialize)]
struct BranchRec {
    from: usize,
    arms: Vec<ArmRec>,
}

#[derive(Serialize, Deserialize)]
struct ArmRec {
    subst: BTreeMap<String, String>,
    constraint: String,
    to: usize,
}

fn csubst_out(sem: &Semantics, a: &CSubst) -> (BTreeMap<String, String>, String) {
    let subst = a
        .subst
        .iter()
        .map(|(name, image)| (name.to_string(), print_term(&sem.sig, image)))
        .collect();
    (subst, print_constraint(&sem.sig, &a.constraint))
}

fn csubst_in(
    sem: &Semantics,
    subst: &BTreeMap<String, String>,
    constraint: &str,
) -> Result<CSubst> {
    let mut s = Subst::new();
    for (name, image) in subst {
        s.insert(Ident::new(name), parse_term(image, sem)?);
    }
    let c = parse_constraint(constraint, sem)?;
    Ok(CSubst::new(s, c))
}

pub fn to_json(sem: &Semantics, g: &AprpGraph) -> String {
    let vertices = g
        .vertices
        .iter()
        .map(|(id, v)| {
            let (config, constraint) = print_cterm(&sem.sig, &v.cterm.config, &v.cterm.constraint);
            VertexRec {
                id: *id,
                status: v.status,
                config,
                constraint,
            }
        })
        .collect();
    let step_edges = g
        .step_edges
        .iter()
        .map(|e| StepRec {
            from: e.from,
            to: e.to,
            n: e.n,
        })
        .collect();
    let cover_edges = g
        .cover_edges
        .iter()
        .map(|e| {
            let (subst, constraint) = csubst_out(sem, &e.csubst);
            CoverRec {
                from: e.from,
                to: e.to,
                subst,
                constraint,
            }
        })
        .collect();
    let branch_edges = g
        .branch_edges
        .iter()
        .map(|b| BranchRec {
            from: b.from,
            arms: b
                .arms
                .iter()
                .map(|(alpha, to)| {
                    let (subst, constraint) = csubst_out(sem, alpha);
                    ArmRec {
                        subst,
                        constraint,
                        to: *to,
                    }
                })
                .collect(),
        })
        .collect();
    let file = ProofFile {
        format: FORMAT.to_string(),
        version: VERSION,
        semantics: g.semantics_name.to_string(),
        spec: g.spec_name.to_string(),
        partial: g.partial,
        root: g.root,
        final_vertex: g.final_vertex,
        vertices,
        step_edges,
        cover_edges,
        branch_edges,
        iteration_log: g.iteration_log.clone(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("serializable");
    out.push('\n');
    out
}

pub fn from_json(text: &str, sem: &Semantics) -> Result<AprpGraph> {
    let file: ProofFile =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("proof file: {e}")))?;
    if file.format != FORMAT {
        return Err(Error::Format(format!(
            "unknown proof format `{}`",
            file.format
        )));
    }
    if file.version != VERSION {
        return Err(Error::Format(format!(
            "unsupported proof version {}",
            file.version
        )));
    }
    if file.semantics != g_name(sem) {
        return Err(Error::Format(format!(
            "proof was built against semantics `{}`, not `{}`",
            file.semantics,
            g_name(sem)
        )));
    }
    let mut vertices = BTreeMap::new();
    for v in &file.vertices {
        let cterm = parse_cterm(&v.config, &v.constraint, sem)?;
        vertices.insert(
            v.id,
            Vertex {
                cterm,
                status: v.status,
            },
        );
    }
    let step_edges = file
        .step_edges
        .iter()
        .map(|e| StepEdge {
            from: e.from,
            to: e.to,
            n: e.n,
        })
        .collect();
    let mut cover_edges = Vec::new();
    for e in &file.cover_edges {
        cover_edges.push(CoverEdge {
            from: e.from,
            to: e.to,
            csubst: csubst_in(sem, &e.subst, &e.constraint)?,
        });
    }
    let mut branch_edges = Vec::new();
    for b in &file.branch_edges {
        let mut arms = Vec::new();
        for arm in &b.arms {
            arms.push((csubst_in(sem, &arm.subst, &arm.constraint)?, arm.to));
        }
        branch_edges.push(BranchEdge { from: b.from, arms });
    }
    AprpGraph::from_parts(
        Ident::new(&file.semantics),
        Ident::new(&file.spec),
        vertices,
        step_edges,
        cover_edges,
        branch_edges,
        file.root,
        file.final_vertex,
        file.iteration_log,
        file.partial,
    )
}

fn g_name(sem: &Semantics) -> String {
    sem.name.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aprp::{check_graph, construct_aprp, ProofConfig};
    use crate::builtins::{builtin, loop_sum_spec, opcode_specs};

    #[test]
    fn proof_roundtrip_is_exact() {
        let sem = builtin("mini-evm").unwrap();
        let specs = opcode_specs(&sem).unwrap();
        let add = specs.iter().find(|s| s.name.as_str() == "add").unwrap();
        let cfg = ProofConfig::new(1, 100, false, &add.options);
        let g = construct_aprp(&sem, add, &cfg).unwrap();
        let json = to_json(&sem, &g);
        let back = from_json(&json, &sem).unwrap();
        assert_eq!(to_json(&sem, &back), json);
        assert!(check_graph(&sem, &back).is_empty());
    }

    #[test]
    fn loop_proof_roundtrip_preserves_covers() {
        let sem = builtin("loop-lang").unwrap();
        let spec = loop_sum_spec(&sem).unwrap();
        let cfg = ProofConfig::new(1, 1000, false, &spec.options);
        let g = construct_aprp(&sem, &spec, &cfg).unwrap();
        let json = to_json(&sem, &g);
        let back = from_json(&json, &sem).unwrap();
        assert_eq!(back.cover_edges.len(), g.cover_edges.len());
        assert_eq!(to_json(&sem, &back), json);
        let violations = check_graph(&sem, &back);
        assert!(violations.is_empty(), "{violations:?}");
    }

    #[test]
    fn wrong_semantics_is_rejected() {
        let evm = builtin("mini-evm").unwrap();
        let ll = builtin("loop-lang").unwrap();
        let specs = opcode_specs(&evm).unwrap();
        let cfg = ProofConfig::new(1, 100, false, &specs[0].options);
        let g = construct_aprp(&evm, &specs[0], &cfg).unwrap();
        let json = to_json(&evm, &g);
        assert!(from_json(&json, &ll).is_err());
    }
}
