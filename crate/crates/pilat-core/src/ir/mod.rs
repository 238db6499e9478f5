//! The loop language: parsing, desugaring of `non_det`, sequential
//! composition into one simultaneous polynomial map, solvability validation
//! and the rounding-noise injection pass.
//!
//! Programs are a single `while * do ... done` loop over rational-valued
//! variables. Constants are exact decimal rationals (`0.68` is `17/25`), so
//! everything downstream can stay exact. A constant pseudo-variable equal to
//! one is implicit and appears only in lifted bases, never in programs.

mod compose;
mod interp;
mod lexer;
mod noise;
mod parser;
mod pretty;
mod solvable;

pub use compose::compose;
pub use interp::{count_sites, run_source_once};
pub use noise::{inject_rounding_noise, NoiseConfig};
pub use parser::parse_source;
pub use pretty::pretty;
pub use solvable::{validate_solvable, SolvablePartition};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::poly::MPoly;
use crate::{Rat, Scalar};

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrError {
    #[error("syntax error at {span}: {msg}")]
    Syntax { span: Span, msg: String },
    #[error("use of undeclared variable `{name}` at {span}")]
    UndeclaredVariable { name: String, span: Span },
    #[error("nested loops are not supported ({span})")]
    NestedLoop { span: Span },
    #[error("conditional statements are not supported ({span})")]
    ConditionalNotSupported { span: Span },
    #[error("variable `{name}` assigned twice in one simultaneous assignment ({span})")]
    DuplicateTarget { name: String, span: Span },
    #[error("simultaneous assignment has {targets} targets but {exprs} expressions ({span})")]
    ArityMismatch { targets: usize, exprs: usize, span: Span },
    #[error("non_det bounds at {span} are not constant; supply an envelope with the nd-envelope option")]
    NonDetBoundsNotConstant { span: Span },
    #[error("non_det bounds at {span} are inverted (lower > upper)")]
    NonDetBoundsInverted { span: Span },
    #[error("initial bounds for `{name}` are inverted ({span})")]
    InitBoundsInverted { name: String, span: Span },
    #[error("body is not a solvable mapping: assignment to `{var}` has monomial {monomial} that is nonlinear in its own dependency class")]
    NotSolvable { var: String, monomial: String },
    #[error("no magnitude bound for rounding noise of `{expr}`: give a global bound or initial intervals for its variables")]
    MissingMagnitudeBound { expr: String },
}

/// A non-deterministic parameter: drawn fresh from `[lo, hi]` each
/// iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamDecl {
    pub name: String,
    pub lo: Rat,
    pub hi: Rat,
    pub origin: ParamOrigin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamOrigin {
    /// Came from a `non_det(lo, hi)` in the source.
    NonDet,
    /// Injected by the rounding-error model.
    Rounding,
}

/// Expression over program state and parameters. Subtraction and negation
/// are structural sugar; polynomial conversion expands them.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Rat),
    Var(usize),
    Param(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Expansion into the combined polynomial ring (variables first, then
    /// parameters).
    pub fn to_poly(&self, nvars: usize, nparams: usize) -> MPoly<Rat> {
        let n = nvars + nparams;
        match self {
            Expr::Const(c) => MPoly::constant(n, c.clone()),
            Expr::Var(i) => MPoly::var(n, *i),
            Expr::Param(j) => MPoly::var(n, nvars + *j),
            Expr::Add(a, b) => a.to_poly(nvars, nparams).add(&b.to_poly(nvars, nparams)),
            Expr::Sub(a, b) => a.to_poly(nvars, nparams).sub(&b.to_poly(nvars, nparams)),
            Expr::Neg(a) => a.to_poly(nvars, nparams).neg(),
            Expr::Mul(a, b) => a.to_poly(nvars, nparams).mul(&b.to_poly(nvars, nparams)),
        }
    }
}

/// Initial constraint for one variable; a point when `lo == hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitBound {
    pub lo: Rat,
    pub hi: Rat,
}

/// A parsed, desugared loop: one simultaneous assignment per iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    /// State variables, ordered by first occurrence in the source.
    pub vars: Vec<String>,
    /// Non-deterministic parameters, in desugaring order.
    pub params: Vec<ParamDecl>,
    /// Declared initial constraints by variable index.
    pub init: BTreeMap<usize, InitBound>,
    /// Right-hand side for each variable, evaluated simultaneously.
    pub body: Vec<Expr>,
}

impl Program {
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn nparams(&self) -> usize {
        self.params.len()
    }

    /// Body as polynomials over the combined (vars ++ params) ring.
    pub fn body_polys(&self) -> Vec<MPoly<Rat>> {
        self.body
            .iter()
            .map(|e| e.to_poly(self.nvars(), self.nparams()))
            .collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// One concrete step: evaluates the body at a state and parameter draw.
    pub fn step(&self, state: &[Rat], draws: &[Rat]) -> Vec<Rat> {
        assert_eq!(state.len(), self.nvars());
        assert_eq!(draws.len(), self.nparams());
        let mut point = state.to_vec();
        point.extend_from_slice(draws);
        self.body_polys().iter().map(|p| p.eval(&point)).collect()
    }
}

/// Raw source expression, before parameter extraction.
#[derive(Debug, Clone, PartialEq)]
pub enum RawExpr {
    Const(Rat),
    Var(String, Span),
    Add(Box<RawExpr>, Box<RawExpr>),
    Sub(Box<RawExpr>, Box<RawExpr>),
    Neg(Box<RawExpr>),
    Mul(Box<RawExpr>, Box<RawExpr>),
    NonDet(Box<RawExpr>, Box<RawExpr>, Span),
}

/// One loop-body statement: `skip`, `x := e` or a simultaneous tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct RawStmt {
    pub targets: Vec<String>,
    pub rhs: Vec<RawExpr>,
    pub span: Span,
}

/// Initial line `init x = v` or `init x in [lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitLine {
    pub var: String,
    pub lo: Rat,
    pub hi: Rat,
    pub span: Span,
}

/// Parse tree of a whole source file, before composition.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceAst {
    pub inits: Vec<InitLine>,
    pub stmts: Vec<RawStmt>,
}

/// Floating-point rounding model.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatModel {
    pub kind: FloatKind,
    pub epsilon: Rat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloatKind {
    Real,
    Single,
    Double,
}

impl FloatModel {
    pub fn real() -> Self {
        FloatModel { kind: FloatKind::Real, epsilon: Rat::from_int(0) }
    }

    /// Machine epsilon 2^-23.
    pub fn single() -> Self {
        FloatModel {
            kind: FloatKind::Single,
            epsilon: Rat::new(1.into(), crate::Int::from(1u64 << 23)),
        }
    }

    /// Machine epsilon 2^-52.
    pub fn double() -> Self {
        FloatModel {
            kind: FloatKind::Double,
            epsilon: Rat::new(1.into(), crate::Int::from(1u64 << 52)),
        }
    }
}

/// Parses and composes a source file in one call.
pub fn parse(source: &str) -> Result<Program, IrError> {
    parse_with_envelopes(source, &[])
}

/// Like [`parse`], with constant envelopes for `non_det` call sites whose
/// arguments are not constant (applied in source order).
pub fn parse_with_envelopes(source: &str, envelopes: &[(Rat, Rat)]) -> Result<Program, IrError> {
    let ast = parse_source(source)?;
    compose(&ast, envelopes)
}
