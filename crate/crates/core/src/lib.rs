//! FedQPL: a logical query-plan language for federations of RDF data sources
//! that sit behind heterogeneous access interfaces (SPARQL endpoints, Triple
//! Pattern Fragments, bindings-restricted TPF).
//!
//! The crate covers the whole pipeline at desk scale: an in-memory RDF model,
//! simulated interfaces, plan expressions with validity checking and
//! set-semantics evaluation, source-selection search with cost analysis, and a
//! rule-based rewriter over the catalog of plan equivalences.

mod lex;

pub mod eval;
pub mod expr;
pub mod federation;
pub mod generate;
pub mod rdf;
pub mod rewrite;
pub mod sample;
pub mod selection;

pub use eval::{EvalContext, EvalError};
pub use expr::{parse_bgp, parse_expr, parse_expr_unbound, Expr, ExprSet, ParseError};
pub use federation::{
    Federation, FederationError, GraphPattern, InterfaceKind, Member, MemberId, Request,
};
pub use rdf::{Bgp, Graph, SolutionMapping, SolutionSet, Term, Triple, TriplePattern, Variable};
