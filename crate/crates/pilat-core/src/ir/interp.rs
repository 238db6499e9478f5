//! Reference interpreter for the raw statement sequence. Used by tests to
//! check that composition preserves semantics: one pass of the original
//! statements, with the non_det sites pinned to given draws, must land in
//! the same state as evaluating the composed polynomial map.

use std::collections::BTreeMap;

use super::{RawExpr, SourceAst};
use crate::Rat;

/// Runs one loop iteration of the raw statements. `draws` supplies the value
/// of each `non_det` site in desugaring order (statement order, arguments
/// left to right). Returns the post state.
pub fn run_source_once(
    ast: &SourceAst,
    state: &BTreeMap<String, Rat>,
    draws: &[Rat],
) -> BTreeMap<String, Rat> {
    let mut state = state.clone();
    let mut next_site = 0usize;
    for stmt in &ast.stmts {
        let values: Vec<Rat> = stmt
            .rhs
            .iter()
            .map(|e| eval(e, &state, draws, &mut next_site))
            .collect();
        for (t, v) in stmt.targets.iter().zip(values) {
            state.insert(t.clone(), v);
        }
    }
    state
}

/// Number of `non_det` sites, i.e. how many draws one pass consumes.
pub fn count_sites(ast: &SourceAst) -> usize {
    fn walk(e: &RawExpr, n: &mut usize) {
        match e {
            RawExpr::NonDet(..) => *n += 1,
            RawExpr::Add(a, b) | RawExpr::Sub(a, b) | RawExpr::Mul(a, b) => {
                walk(a, n);
                walk(b, n);
            }
            RawExpr::Neg(a) => walk(a, n),
            RawExpr::Const(_) | RawExpr::Var(..) => {}
        }
    }
    let mut n = 0;
    for stmt in &ast.stmts {
        for e in &stmt.rhs {
            walk(e, &mut n);
        }
    }
    n
}

fn eval(
    e: &RawExpr,
    state: &BTreeMap<String, Rat>,
    draws: &[Rat],
    next_site: &mut usize,
) -> Rat {
    match e {
        RawExpr::Const(c) => c.clone(),
        RawExpr::Var(n, _) => state
            .get(n)
            .cloned()
            .unwrap_or_else(|| panic!("interpreter state is missing `{n}`")),
        RawExpr::Add(a, b) => {
            eval(a, state, draws, next_site) + eval(b, state, draws, next_site)
        }
        RawExpr::Sub(a, b) => {
            eval(a, state, draws, next_site) - eval(b, state, draws, next_site)
        }
        RawExpr::Neg(a) => -eval(a, state, draws, next_site),
        RawExpr::Mul(a, b) => {
            eval(a, state, draws, next_site) * eval(b, state, draws, next_site)
        }
        RawExpr::NonDet(..) => {
            let v = draws[*next_site].clone();
            *next_site += 1;
            v
        }
    }
}
