//! DOT rendering of proof graphs: step edges labeled with their length,
//! branch edges labeled with the arm guard, cover edges dashed.

use crate::aprp::{AprpGraph, Status};
use crate::print::{print_constraint, print_term};
use crate::semantics::Semantics;
use crate::term::Term;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn truncate(s: &str, max: usize) -> String {
    if s.len() <= max {
        s.to_string()
    } else {
        format!("{}...", &s[..max])
    }
}

pub fn to_dot(sem: &Semantics, g: &AprpGraph) -> String {
    let mut out = String::new();
    out.push_str("digraph aprp {\n");
    out.push_str("  rankdir=TB;\n  node [shape=box, fontname=\"monospace\"];\n");
    for (id, v) in &g.vertices {
        let k_label = sem.sig.k_label();
        let head = v
            .cterm
            .config
            .as_cells()
            .and_then(|bag| bag.get(&k_label))
            .map(|body| match &**body {
                Term::App(a) if a.ctor.as_str() == crate::semantics::KSEQ => {
                    print_term(&sem.sig, &a.args[0])
                }
                _ => print_term(&sem.sig, body),
            })
            .unwrap_or_default();
        let status = match v.status {
            Status::Pending => "pending",
            Status::Reached => "reached",
            Status::Stuck => "stuck",
            Status::Final => "final",
        };
        let shape = match v.status {
            Status::Final => ", peripheries=2",
            Status::Stuck => ", style=filled, fillcolor=lightgray",
            _ => "",
        };
        out.push_str(&format!(
            "  v{id} [label=\"v{id} ({status})\\n{}\"{shape}];\n",
            escape(&truncate(&head, 48))
        ));
    }
    for e in &g.step_edges {
        out.push_str(&format!(
            "  v{} -> v{} [label=\"{}\"];\n",
            e.from, e.to, e.n
        ));
    }
    for b in &g.branch_edges {
        for (alpha, to) in &b.arms {
            let guard = print_constraint(&sem.sig, &alpha.constraint);
            out.push_str(&format!(
                "  v{} -> v{} [label=\"{}\", color=blue];\n",
                b.from,
                to,
                escape(&truncate(&guard, 48))
            ));
        }
    }
    for c in &g.cover_edges {
        out.push_str(&format!("  v{} -> v{} [style=dashed];\n", c.from, c.to));
    }
    out.push_str("}\n");
    out
}
