//! Exhaustive computation of the optimal program, for testing the learner on
//! small instances.
//!
//! Every body (each feature absent or bound to one domain value) is paired
//! with every target atom. A candidate is kept when it is consistent with the
//! transitions and matches at least one positive state of its head; the
//! optimal program is the set of candidates not strictly dominated by another
//! candidate.

use rayon::prelude::*;
use thiserror::Error;

use crate::mvl::{Atom, Program, Rule, Schema, Transition};

pub const DEFAULT_BODY_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{bodies} candidate bodies exceed the enumeration cap of {cap}")]
    TooLarge { bodies: u128, cap: u128 },
    #[error("no transitions given")]
    EmptyInput,
}

/// Number of distinct rule bodies over the schema's features.
pub fn body_count(schema: &Schema) -> u128 {
    schema.features().iter().map(|v| v.domain.len() as u128 + 1).product()
}

/// All bodies in canonical order.
fn enumerate_bodies(schema: &Schema) -> Vec<Vec<Atom>> {
    let mut bodies: Vec<Vec<Atom>> = vec![Vec::new()];
    for (var, v) in schema.features().iter().enumerate().rev() {
        let mut next = Vec::with_capacity(bodies.len() * (v.domain.len() + 1));
        for choice in std::iter::once(None).chain(v.domain.iter().copied().map(Some)) {
            for tail in &bodies {
                let mut body = Vec::with_capacity(tail.len() + 1);
                if let Some(value) = choice {
                    body.push(Atom::new(var, value));
                }
                body.extend_from_slice(tail);
                next.push(body);
            }
        }
        bodies = next;
    }
    bodies.sort();
    bodies
}

pub fn optimal_program(ts: &[Transition], schema: &Schema) -> Result<Program, OracleError> {
    optimal_program_capped(ts, schema, DEFAULT_BODY_CAP)
}

pub fn optimal_program_capped(ts: &[Transition], schema: &Schema, cap: u128) -> Result<Program, OracleError> {
    if ts.is_empty() {
        return Err(OracleError::EmptyInput);
    }
    let bodies = body_count(schema);
    if bodies > cap {
        return Err(OracleError::TooLarge { bodies, cap });
    }
    let bodies = enumerate_bodies(schema);
    let mut optimal = Vec::new();
    for head in schema.target_atoms() {
        let candidates: Vec<Rule> = bodies
            .par_iter()
            .filter_map(|body| {
                let rule = Rule::new(head, body.iter().copied()).expect("enumerated bodies bind each variable once");
                let supported = ts.iter().any(|t| rule.realizes(t));
                (supported && rule.is_consistent(ts)).then_some(rule)
            })
            .collect();
        optimal.extend(
            candidates
                .iter()
                .filter(|r| !candidates.iter().any(|o| o != *r && o.dominates(r)))
                .cloned(),
        );
    }
    Ok(Program::new(schema.clone(), optimal).expect("enumerated rules fit the schema"))
}
