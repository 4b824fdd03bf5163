//! Validity of an expression for a federation: every member exists and is
//! only asked for what its interface supports.

use thiserror::Error;

use super::Expr;
use crate::federation::{Federation, MemberId, Request};

/// The first invalid subexpression found in preorder.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message} (at {})", display_path(path))]
pub struct ValidityError {
    pub path: Vec<usize>,
    pub message: String,
}

fn display_path(path: &[usize]) -> String {
    if path.is_empty() {
        return "the root".to_string();
    }
    let parts: Vec<String> = path.iter().map(ToString::to_string).collect();
    format!("subexpression /{}", parts.join("/"))
}

pub fn validate(e: &Expr, federation: &Federation) -> Result<(), ValidityError> {
    let mut path = Vec::new();
    check(e, federation, &mut path)
}

pub fn is_valid(e: &Expr, federation: &Federation) -> bool {
    validate(e, federation).is_ok()
}

fn check(e: &Expr, f: &Federation, path: &mut Vec<usize>) -> Result<(), ValidityError> {
    let fail = |message: String| ValidityError {
        path: path.clone(),
        message,
    };
    let lookup = |id: &MemberId| {
        f.get(id)
            .ok_or_else(|| fail(format!("unknown member {id}")))
    };
    match e {
        Expr::Req { request, member } => {
            let m = lookup(member)?;
            if !m.kind.accepts(request) {
                let what = match request {
                    Request::Tp(_) => "triple pattern requests",
                    Request::Bgp(_) => "BGP requests",
                    Request::Pattern(_) => "graph pattern requests",
                    Request::BrTpf(..) => "brTPF requests",
                };
                return Err(fail(format!(
                    "member {} ({}) does not support {what}",
                    m.id, m.kind
                )));
            }
        }
        Expr::TpAdd { member, .. } => {
            let m = lookup(member)?;
            if !m.kind.supports_tp_requests() {
                return Err(fail(format!(
                    "member {} ({}) does not support triple pattern requests",
                    m.id, m.kind
                )));
            }
        }
        Expr::BgpAdd { member, .. } => {
            let m = lookup(member)?;
            if !m.kind.supports_bgp_requests() {
                return Err(fail(format!(
                    "member {} ({}) does not support BGP requests",
                    m.id, m.kind
                )));
            }
        }
        _ => {}
    }
    for (i, child) in e.children().into_iter().enumerate() {
        path.push(i);
        check(child, f, path)?;
        path.pop();
    }
    Ok(())
}
