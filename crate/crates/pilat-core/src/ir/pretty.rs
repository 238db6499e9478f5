//! Canonical printer. Output is itself valid input, and printing a parsed
//! canonical source reproduces it byte for byte: parameters print as
//! `name := non_det(lo, hi);` bindings that desugar back to the same
//! parameter, and all state updates print as one simultaneous assignment.

use super::{Expr, ParamDecl, Program};
use crate::num::ratio::rat_display;

pub fn pretty(p: &Program) -> String {
    let mut out = String::new();
    for (idx, bound) in &p.init {
        let name = &p.vars[*idx];
        if bound.lo == bound.hi {
            out.push_str(&format!("init {name} = {}\n", rat_display(&bound.lo)));
        } else {
            out.push_str(&format!(
                "init {name} in [{}, {}]\n",
                rat_display(&bound.lo),
                rat_display(&bound.hi)
            ));
        }
    }
    out.push_str("while * do\n");
    for d in &p.params {
        out.push_str(&format!(
            "  {} := non_det({}, {});\n",
            d.name,
            rat_display(&d.lo),
            rat_display(&d.hi)
        ));
    }
    if p.vars.is_empty() {
        out.push_str("  skip;\n");
    } else if p.vars.len() == 1 {
        out.push_str(&format!("  {} := {};\n", p.vars[0], render_expr(&p.body[0], &p.vars, &p.params)));
    } else {
        let targets = p.vars.join(", ");
        let rhs: Vec<String> =
            p.body.iter().map(|e| render_expr(e, &p.vars, &p.params)).collect();
        out.push_str(&format!("  ({}) := ({});\n", targets, rhs.join(", ")));
    }
    out.push_str("done\n");
    out
}

/// Expression rendering with minimal parentheses.
pub(super) fn render_expr(e: &Expr, vars: &[String], params: &[ParamDecl]) -> String {
    render_prec(e, 0, vars, params)
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Const(..) | Expr::Var(..) | Expr::Param(..) => 4,
    }
}

fn render_prec(e: &Expr, min: u8, vars: &[String], params: &[ParamDecl]) -> String {
    let mine = prec(e);
    let body = match e {
        Expr::Const(c) => rat_display(c),
        Expr::Var(i) => vars[*i].clone(),
        Expr::Param(j) => params[*j].name.clone(),
        Expr::Add(a, b) => format!(
            "{} + {}",
            render_prec(a, 1, vars, params),
            render_prec(b, 1, vars, params)
        ),
        Expr::Sub(a, b) => format!(
            "{} - {}",
            render_prec(a, 1, vars, params),
            render_prec(b, 2, vars, params)
        ),
        Expr::Mul(a, b) => format!(
            "{}*{}",
            render_prec(a, 2, vars, params),
            render_prec(b, 2, vars, params)
        ),
        Expr::Neg(a) => format!("-{}", render_prec(a, 3, vars, params)),
    };
    if mine < min {
        format!("({body})")
    } else {
        body
    }
}
