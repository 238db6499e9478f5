//! Desugaring and sequential composition.
//!
//! `non_det(lo, hi)` calls become fresh parameters. Statement sequences are
//! folded into one simultaneous assignment by substitution, so `r := e;
//! s0 := r;` reads `e` in `s0`'s slot. Temporaries whose composed value no
//! longer depends on the state and which nobody reads (the classic
//! `N := non_det(a, b)` binding) are dropped from the state vector.

use std::collections::BTreeMap;

use super::{Expr, InitBound, IrError, ParamDecl, ParamOrigin, Program, RawExpr, SourceAst};
use crate::Rat;

/// Composes a parsed source file into a [`Program`]. `envelopes` supplies
/// constant `[lo, hi]` intervals for `non_det` call sites with non-constant
/// arguments, in source order.
pub fn compose(ast: &SourceAst, envelopes: &[(Rat, Rat)]) -> Result<Program, IrError> {
    // Variable universe: first textual occurrence, init lines first.
    let mut names: Vec<String> = Vec::new();
    let mut note = |n: &str| {
        if !names.iter().any(|v| v == n) {
            names.push(n.to_string());
        }
    };
    for line in &ast.inits {
        note(&line.var);
    }
    for stmt in &ast.stmts {
        for t in &stmt.targets {
            note(t);
        }
        for e in &stmt.rhs {
            collect_reads(e, &mut note);
        }
    }

    // Declared = assigned somewhere or given an init line.
    let declared: Vec<String> = names
        .iter()
        .filter(|n| {
            ast.stmts.iter().any(|s| s.targets.contains(n))
                || ast.inits.iter().any(|l| &&l.var == n)
        })
        .cloned()
        .collect();
    for stmt in &ast.stmts {
        for e in &stmt.rhs {
            check_declared(e, &declared)?;
        }
    }

    let index: BTreeMap<&str, usize> =
        declared.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();

    // Desugar and compose in a single pass over the statements.
    let mut params: Vec<ParamDecl> = Vec::new();
    let mut envelope_iter = envelopes.iter();
    let mut sigma: Vec<Expr> = (0..declared.len()).map(Expr::Var).collect();
    // Pure `v := non_det(..)` bindings remember their name so the parameter
    // can inherit it once the temporary is dropped.
    let mut pending_param_name: BTreeMap<usize, usize> = BTreeMap::new();

    for stmt in &ast.stmts {
        let rhs: Vec<Expr> = stmt
            .rhs
            .iter()
            .map(|e| desugar(e, &index, &sigma, &mut params, &mut envelope_iter))
            .collect::<Result<_, _>>()?;
        for (t, e) in stmt.targets.iter().zip(rhs) {
            let ti = index[t.as_str()];
            if let Expr::Param(p) = e {
                pending_param_name.insert(p, ti);
            }
            sigma[ti] = e;
        }
    }

    // Dead temporary elimination to a fixpoint.
    let mut keep = vec![true; declared.len()];
    loop {
        let mut changed = false;
        for v in 0..declared.len() {
            if !keep[v] {
                continue;
            }
            let state_free = !reads_any_var(&sigma[v]);
            let unread = (0..declared.len())
                .filter(|&w| keep[w] && w != v)
                .all(|w| !reads_var(&sigma[w], v));
            let no_init = !ast.inits.iter().any(|l| l.var == declared[v]);
            if state_free && unread && no_init {
                keep[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Dropped pure-binding temporaries donate their name to the parameter.
    for (&p, &v) in &pending_param_name {
        if !keep[v] && !params.iter().enumerate().any(|(q, d)| q != p && d.name == declared[v]) {
            params[p].name = declared[v].clone();
        }
    }

    // Reindex retained variables.
    let mut remap: Vec<Option<usize>> = vec![None; declared.len()];
    let mut vars = Vec::new();
    for (old, name) in declared.iter().enumerate() {
        if keep[old] {
            remap[old] = Some(vars.len());
            vars.push(name.clone());
        }
    }
    let body: Vec<Expr> = (0..declared.len())
        .filter(|&v| keep[v])
        .map(|v| remap_vars(&sigma[v], &remap))
        .collect();

    let mut init = BTreeMap::new();
    for line in &ast.inits {
        let old = index[line.var.as_str()];
        let idx = remap[old].expect("init-constrained variables are never dropped");
        init.insert(idx, InitBound { lo: line.lo.clone(), hi: line.hi.clone() });
    }

    Ok(Program { vars, params, init, body })
}

fn collect_reads(e: &RawExpr, note: &mut impl FnMut(&str)) {
    match e {
        RawExpr::Const(_) => {}
        RawExpr::Var(n, _) => note(n),
        RawExpr::Add(a, b) | RawExpr::Sub(a, b) | RawExpr::Mul(a, b) => {
            collect_reads(a, note);
            collect_reads(b, note);
        }
        RawExpr::Neg(a) => collect_reads(a, note),
        RawExpr::NonDet(a, b, _) => {
            collect_reads(a, note);
            collect_reads(b, note);
        }
    }
}

fn check_declared(e: &RawExpr, declared: &[String]) -> Result<(), IrError> {
    match e {
        RawExpr::Const(_) => Ok(()),
        RawExpr::Var(n, span) => {
            if declared.iter().any(|d| d == n) {
                Ok(())
            } else {
                Err(IrError::UndeclaredVariable { name: n.clone(), span: *span })
            }
        }
        RawExpr::Add(a, b) | RawExpr::Sub(a, b) | RawExpr::Mul(a, b) => {
            check_declared(a, declared)?;
            check_declared(b, declared)
        }
        RawExpr::Neg(a) => check_declared(a, declared),
        RawExpr::NonDet(a, b, _) => {
            check_declared(a, declared)?;
            check_declared(b, declared)
        }
    }
}

/// Constant folding for `non_det` bound expressions.
fn fold_const(e: &RawExpr) -> Option<Rat> {
    match e {
        RawExpr::Const(c) => Some(c.clone()),
        RawExpr::Add(a, b) => Some(fold_const(a)? + fold_const(b)?),
        RawExpr::Sub(a, b) => Some(fold_const(a)? - fold_const(b)?),
        RawExpr::Neg(a) => Some(-fold_const(a)?),
        RawExpr::Mul(a, b) => Some(fold_const(a)? * fold_const(b)?),
        RawExpr::Var(..) | RawExpr::NonDet(..) => None,
    }
}

fn fresh_param_name(params: &[ParamDecl]) -> String {
    for i in 1u32.. {
        let cand = if i == 1 { "N".to_string() } else { format!("N{i}") };
        if !params.iter().any(|p| p.name == cand) {
            return cand;
        }
    }
    unreachable!()
}

fn desugar(
    e: &RawExpr,
    index: &BTreeMap<&str, usize>,
    sigma: &[Expr],
    params: &mut Vec<ParamDecl>,
    envelopes: &mut std::slice::Iter<'_, (Rat, Rat)>,
) -> Result<Expr, IrError> {
    Ok(match e {
        RawExpr::Const(c) => Expr::Const(c.clone()),
        // Substitution: reads refer to the value accumulated so far.
        RawExpr::Var(n, _) => sigma[index[n.as_str()]].clone(),
        RawExpr::Add(a, b) => Expr::Add(
            Box::new(desugar(a, index, sigma, params, envelopes)?),
            Box::new(desugar(b, index, sigma, params, envelopes)?),
        ),
        RawExpr::Sub(a, b) => Expr::Sub(
            Box::new(desugar(a, index, sigma, params, envelopes)?),
            Box::new(desugar(b, index, sigma, params, envelopes)?),
        ),
        RawExpr::Neg(a) => Expr::Neg(Box::new(desugar(a, index, sigma, params, envelopes)?)),
        RawExpr::Mul(a, b) => Expr::Mul(
            Box::new(desugar(a, index, sigma, params, envelopes)?),
            Box::new(desugar(b, index, sigma, params, envelopes)?),
        ),
        RawExpr::NonDet(a, b, span) => {
            let bounds = match (fold_const(a), fold_const(b)) {
                (Some(lo), Some(hi)) => (lo, hi),
                _ => match envelopes.next() {
                    Some((lo, hi)) => (lo.clone(), hi.clone()),
                    None => return Err(IrError::NonDetBoundsNotConstant { span: *span }),
                },
            };
            if bounds.0 > bounds.1 {
                return Err(IrError::NonDetBoundsInverted { span: *span });
            }
            let name = fresh_param_name(params);
            params.push(ParamDecl { name, lo: bounds.0, hi: bounds.1, origin: ParamOrigin::NonDet });
            Expr::Param(params.len() - 1)
        }
    })
}

fn reads_any_var(e: &Expr) -> bool {
    match e {
        Expr::Var(_) => true,
        Expr::Const(_) | Expr::Param(_) => false,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => reads_any_var(a) || reads_any_var(b),
        Expr::Neg(a) => reads_any_var(a),
    }
}

fn reads_var(e: &Expr, v: usize) -> bool {
    match e {
        Expr::Var(i) => *i == v,
        Expr::Const(_) | Expr::Param(_) => false,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => reads_var(a, v) || reads_var(b, v),
        Expr::Neg(a) => reads_var(a, v),
    }
}

fn remap_vars(e: &Expr, remap: &[Option<usize>]) -> Expr {
    match e {
        Expr::Var(i) => Expr::Var(remap[*i].expect("retained variable reads only retained ones")),
        Expr::Const(c) => Expr::Const(c.clone()),
        Expr::Param(p) => Expr::Param(*p),
        Expr::Add(a, b) => Expr::Add(Box::new(remap_vars(a, remap)), Box::new(remap_vars(b, remap))),
        Expr::Sub(a, b) => Expr::Sub(Box::new(remap_vars(a, remap)), Box::new(remap_vars(b, remap))),
        Expr::Neg(a) => Expr::Neg(Box::new(remap_vars(a, remap))),
        Expr::Mul(a, b) => Expr::Mul(Box::new(remap_vars(a, remap)), Box::new(remap_vars(b, remap))),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, IrError};
    use crate::Rat;

    #[test]
    fn fig_style_temp_param_is_dropped_and_named() {
        let src = "while * do N := non_det(-0.1, 0.1); (x, y) := (0.68*(x-y) + N, 0.68*(x+y) + N); done";
        let p = parse(src).unwrap();
        assert_eq!(p.vars, vec!["x", "y"]);
        assert_eq!(p.params.len(), 1);
        assert_eq!(p.params[0].name, "N");
        assert_eq!(p.params[0].lo, Rat::new((-1).into(), 10.into()));
        assert_eq!(p.params[0].hi, Rat::new(1.into(), 10.into()));
    }

    #[test]
    fn filter_temp_with_state_reads_is_kept() {
        let src = "while * do r := 1.5*s0 - 0.7*s1 + non_det(-0.1, 0.1); s1 := s0; s0 := r; done";
        let p = parse(src).unwrap();
        assert_eq!(p.vars, vec!["r", "s0", "s1"]);
        // s0's composed value must equal r's expression (substituted).
        assert_eq!(p.body[p.var_index("s0").unwrap()], p.body[p.var_index("r").unwrap()]);
        // s1 reads the pre-state s0.
        let polys = p.body_polys();
        let s1 = &polys[p.var_index("s1").unwrap()];
        assert_eq!(s1.num_terms(), 1);
    }

    #[test]
    fn undeclared_read_rejected() {
        let src = "while * do x := x + q; done";
        assert!(matches!(
            parse(src),
            Err(IrError::UndeclaredVariable { name, .. }) if name == "q"
        ));
    }

    #[test]
    fn init_only_variable_gets_identity_dynamics() {
        let src = "init c = 3\nwhile * do x := x + c; done";
        let p = parse(src).unwrap();
        let ci = p.var_index("c").unwrap();
        let polys = p.body_polys();
        assert_eq!(polys[ci], crate::poly::MPoly::var(2, ci));
    }

    #[test]
    fn skip_program_is_empty_identity() {
        let p = parse("while * do skip; done").unwrap();
        assert!(p.vars.is_empty());
        assert!(p.body.is_empty());
    }

    #[test]
    fn shared_draw_is_one_parameter() {
        // The same temporary N is read twice: one parameter, used in both slots.
        let src = "while * do N := non_det(0, 1); (x, y) := (x + N, y + N); done";
        let p = parse(src).unwrap();
        assert_eq!(p.params.len(), 1);
        let polys = p.body_polys();
        for poly in &polys {
            assert_eq!(poly.degree_in(&[2]), 1);
        }
    }
}
