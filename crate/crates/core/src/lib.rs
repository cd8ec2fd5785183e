//! Core of a term-rewriting framework that runs user-defined semantics both
//! concretely and symbolically, builds all-path reachability proofs, and
//! compiles the proofs into consolidated high-priority rewrite rules.

pub mod aprp;
pub mod builtins;
pub mod compiler;
pub mod constraint;
pub mod dot;
pub mod error;
pub mod executor;
pub mod hooks;
pub mod linear;
pub mod parse;
pub mod print;
pub mod proof_json;
pub mod semantics;
pub mod solver;
pub mod term;

pub use error::{Error, Result};
