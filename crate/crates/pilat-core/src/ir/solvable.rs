//! Solvability validation: the body must admit an ordered partition of the
//! variables where each class updates linearly in itself plus a polynomial
//! in strictly earlier classes and the parameters.

use super::{IrError, Program};
use crate::poly::MPoly;
use crate::{Rat, Scalar};

/// Ordered variable partition witnessing solvability.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvablePartition {
    /// Variable indices, grouped; earlier blocks feed later ones.
    pub blocks: Vec<Vec<usize>>,
}

impl SolvablePartition {
    pub fn single(n: usize) -> Self {
        SolvablePartition { blocks: vec![(0..n).collect()] }
    }
}

/// Checks the triangular shape and returns the partition. Affine bodies
/// return the single-block partition. Rejection names the assignment and the
/// offending monomial.
pub fn validate_solvable(p: &Program) -> Result<SolvablePartition, IrError> {
    let n = p.nvars();
    if n == 0 {
        return Ok(SolvablePartition { blocks: Vec::new() });
    }
    let polys = p.body_polys();

    // Affine: variable degree at most one and no parameter riding on a
    // linear term (the block matrix must be constant).
    let affine = polys.iter().all(|poly| {
        poly.terms().all(|(expo, _)| {
            let var_deg: u32 = expo.0[..n].iter().sum();
            let has_params = expo.0[n..].iter().any(|&e| e > 0);
            var_deg == 0 || (var_deg == 1 && !has_params)
        })
    });
    if affine {
        return Ok(SolvablePartition::single(n));
    }

    // Edge u -> v when u occurs in v's update; an edge is strict when the
    // occurrence is not a plain constant-coefficient linear term, i.e. u must
    // then live in a strictly earlier block than v.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut strict: Vec<(usize, usize, String)> = Vec::new();
    for (v, poly) in polys.iter().enumerate() {
        for (expo, _) in poly.terms() {
            let vars_in: Vec<usize> = (0..n).filter(|&i| expo.0[i] > 0).collect();
            if vars_in.is_empty() {
                continue;
            }
            let var_deg: u32 = vars_in.iter().map(|&i| expo.0[i]).sum();
            let has_params = (n..poly.nvars()).any(|j| expo.0[j] > 0);
            let linear = var_deg == 1 && !has_params;
            for &u in &vars_in {
                if !adj[u].contains(&v) {
                    adj[u].push(v);
                }
                if !linear {
                    strict.push((u, v, monomial_name(p, expo)));
                }
            }
        }
    }

    let comps = crate::graph::scc_topological(&adj);
    let comp_of = {
        let mut m = vec![0usize; n];
        for (ci, comp) in comps.iter().enumerate() {
            for &v in comp {
                m[v] = ci;
            }
        }
        m
    };
    for (u, v, monomial) in strict {
        if comp_of[u] == comp_of[v] {
            return Err(IrError::NotSolvable { var: p.vars[v].clone(), monomial });
        }
    }
    Ok(SolvablePartition { blocks: comps })
}

fn monomial_name(p: &Program, expo: &crate::poly::Expo) -> String {
    let names: Vec<&str> = p
        .vars
        .iter()
        .map(String::as_str)
        .chain(p.params.iter().map(|d| d.name.as_str()))
        .collect();
    MPoly::<Rat>::monomial(expo.0.len(), expo.clone(), Rat::from_int(1))
        .to_string_with(&names, |_| "1".to_string())
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn affine_body_is_single_block() {
        let p = parse("while * do (x, y) := (0.68*(x-y), 0.68*(x+y)); done").unwrap();
        let part = validate_solvable(&p).unwrap();
        assert_eq!(part, SolvablePartition::single(2));
    }

    #[test]
    fn triangular_body_partitions() {
        let p = parse("while * do (x, y) := (2*x, y + x*x); done").unwrap();
        let part = validate_solvable(&p).unwrap();
        assert_eq!(part.blocks, vec![vec![0], vec![1]]);
    }

    #[test]
    fn cyclic_nonlinear_rejected() {
        // Sequential: x reads y, then y reads the squared new x.
        let p = parse("while * do x := x*x + y; y := x*y; done").unwrap();
        let err = validate_solvable(&p).unwrap_err();
        assert!(matches!(err, IrError::NotSolvable { .. }));
    }

    #[test]
    fn self_square_rejected_with_witness() {
        let p = parse("while * do x := x*x; done").unwrap();
        match validate_solvable(&p) {
            Err(IrError::NotSolvable { var, monomial }) => {
                assert_eq!(var, "x");
                assert_eq!(monomial, "x^2");
            }
            other => panic!("expected NotSolvable, got {other:?}"),
        }
    }

    #[test]
    fn param_scaled_linear_term_is_strict() {
        // x := N*x cannot sit in its own block with a constant linear matrix.
        let p = parse("while * do x := non_det(0, 1)*x; done").unwrap();
        assert!(validate_solvable(&p).is_err());
    }

    #[test]
    fn additive_noise_stays_affine() {
        let p = parse(
            "while * do N := non_det(-0.1, 0.1); (x, y) := (0.68*(x-y)+N, 0.68*(x+y)+N); done",
        )
        .unwrap();
        assert_eq!(validate_solvable(&p).unwrap(), SolvablePartition::single(2));
    }
}
