//! Set semantics of FedQPL expressions over a federation, correctness with
//! respect to a BGP, and semantic equivalence.
//!
//! Evaluation is bottom-up and fully materialized: this is a reference
//! semantics, not an execution engine. A brTPF request with an empty binding
//! set returns the unfiltered triple pattern result (see
//! [`crate::federation::interface_eval`]).

use thiserror::Error;

use crate::expr::{validate, Expr, ValidityError};
use crate::federation::{
    eval_over_federation, interface_eval, Federation, FederationError, GraphPattern, Request,
};
use crate::rdf::{Bgp, SolutionSet};

mod membership;

pub use membership::{membership_in_bgp, membership_in_sols, naive_membership, possible_domains};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("invalid expression: {0}")]
    Invalid(#[from] ValidityError),
    #[error(transparent)]
    Federation(#[from] FederationError),
    #[error("not a source assignment: {0}")]
    NotSourceAssignment(String),
}

/// The federation an expression is evaluated against.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub federation: &'a Federation,
}

impl<'a> EvalContext<'a> {
    pub fn new(federation: &'a Federation) -> Self {
        EvalContext { federation }
    }

    /// `sols(e)`; fails if `e` is not valid for the federation.
    pub fn sols(&self, e: &Expr) -> Result<SolutionSet, EvalError> {
        validate(e, self.federation)?;
        self.sols_valid(e)
    }

    /// `sols(e)` for an expression already known to be valid.
    pub(crate) fn sols_valid(&self, e: &Expr) -> Result<SolutionSet, EvalError> {
        let member = |id| {
            self.federation
                .get(id)
                .expect("validity guarantees that members resolve")
        };
        Ok(match e {
            Expr::Req {
                request,
                member: id,
            } => interface_eval(member(id), request)?,
            Expr::TpAdd {
                input,
                tp,
                member: id,
            } => {
                let right = interface_eval(member(id), &Request::Tp(tp.clone()))?;
                self.sols_valid(input)?.join(&right)
            }
            Expr::BgpAdd {
                input,
                bgp,
                member: id,
            } => {
                let right = interface_eval(member(id), &Request::Bgp(bgp.clone()))?;
                self.sols_valid(input)?.join(&right)
            }
            Expr::Join(l, r) => self.sols_valid(l)?.join(&self.sols_valid(r)?),
            Expr::Union(l, r) => self.sols_valid(l)?.union(&self.sols_valid(r)?),
            Expr::Mj(set) => {
                let mut acc = SolutionSet::unit();
                for child in set {
                    acc = acc.join(&self.sols_valid(child)?);
                }
                acc
            }
            Expr::Mu(set) => {
                let mut acc = SolutionSet::new();
                for child in set {
                    acc = acc.union(&self.sols_valid(child)?);
                }
                acc
            }
        })
    }

    /// Whether `e` is valid and produces exactly `⟦b⟧F`.
    pub fn is_correct(&self, e: &Expr, b: &Bgp) -> bool {
        match self.sols(e) {
            Ok(result) => result == self.expected(b),
            Err(_) => false,
        }
    }

    /// `⟦b⟧F`, the answer a correct plan must produce.
    pub fn expected(&self, b: &Bgp) -> SolutionSet {
        eval_over_federation(&GraphPattern::Bgp(b.clone()), self.federation)
    }

    /// Whether both expressions yield the same solutions.
    pub fn sem_equiv(&self, e1: &Expr, e2: &Expr) -> Result<bool, EvalError> {
        Ok(self.sols(e1)? == self.sols(e2)?)
    }
}

pub fn sols(e: &Expr, ctx: &EvalContext<'_>) -> Result<SolutionSet, EvalError> {
    ctx.sols(e)
}

pub fn is_correct(e: &Expr, b: &Bgp, ctx: &EvalContext<'_>) -> bool {
    ctx.is_correct(e, b)
}

pub fn sem_equiv(e1: &Expr, e2: &Expr, ctx: &EvalContext<'_>) -> Result<bool, EvalError> {
    ctx.sem_equiv(e1, e2)
}

#[cfg(test)]
mod tests;
