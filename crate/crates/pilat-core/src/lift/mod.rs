//! Monomial lifting: the basis of all monomials up to a degree bound, and
//! the abstract matrix acting on it.
//!
//! For a solvable body `X' = f(X, N)` every basis monomial's image
//! `m(f(X, N))` expands inside the basis again (or the lift fails with
//! `DegreeOverflow`; there is no silent truncation). Row `i` of the abstract
//! matrix is that expansion, entries being polynomials in the parameters.
//! Substituting any concrete draw yields an exact rational matrix.

use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::ir::{ParamDecl, ParamOrigin, Program};
use crate::num::ratio::{rat_from_fraction_string, rat_to_fraction_string};
use crate::poly::{Expo, MPoly};
use crate::{Rat, RatMatrix};

/// Monomials are exponent vectors over the program variables; the all-zero
/// vector is the constant-one pseudo-variable.
pub type Monomial = Expo;

/// Default cap on the basis dimension; override with `PILAT_MONOMIAL_CAP`
/// through the CLI.
pub const DEFAULT_MONOMIAL_CAP: usize = 5000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiftError {
    #[error("monomial basis has dimension {dim}, above the cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("image of monomial {monomial} has degree above the bound {degree}; rerun with a larger degree")]
    DegreeOverflow { monomial: String, degree: u32 },
    #[error("covector length {got} does not match basis dimension {expected}")]
    CovectorDimension { expected: usize, got: usize },
}

/// Ordered monomial basis: graded, then lexicographic by declaration order,
/// with the constant monomial first.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialBasis {
    pub vars: Vec<String>,
    pub monos: Vec<Monomial>,
}

impl MonomialBasis {
    pub fn dim(&self) -> usize {
        self.monos.len()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.monos.binary_search_by(|probe| probe.cmp(m)).ok()
    }

    /// Canonical monomial rendering: `1`, `x`, `x^2*y`.
    pub fn monomial_string(&self, i: usize) -> String {
        render_monomial(&self.monos[i], &self.vars)
    }

    /// Lifts a concrete state to its monomial coordinates.
    pub fn monomial_vector(&self, state: &[Rat]) -> Vec<Rat> {
        assert_eq!(state.len(), self.vars.len());
        self.monos
            .iter()
            .map(|m| {
                let mut acc = Rat::one();
                for (i, &e) in m.0.iter().enumerate() {
                    for _ in 0..e {
                        acc *= state[i].clone();
                    }
                }
                acc
            })
            .collect()
    }
}

pub fn render_monomial(m: &Monomial, vars: &[String]) -> String {
    if m.is_unit() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        if e == 1 {
            parts.push(vars[i].clone());
        } else if e > 1 {
            parts.push(format!("{}^{}", vars[i], e));
        }
    }
    parts.join("*")
}

/// Binomial coefficient with saturation, for the dimension precheck.
fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > u128::MAX / 2 {
            return u128::MAX;
        }
    }
    acc
}

/// All monomials of total degree at most `d` over the given variables, in
/// canonical order. Errors when `C(n+d, d)` exceeds the cap.
pub fn monomial_basis(vars: &[String], d: u32, cap: usize) -> Result<MonomialBasis, LiftError> {
    assert!(d >= 1, "degree bound must be at least 1");
    let n = vars.len();
    let dim = binomial((n as u64) + (d as u64), d as u64);
    if dim > cap as u128 {
        return Err(LiftError::DimensionTooLarge { dim: dim.min(usize::MAX as u128) as usize, cap });
    }
    let mut monos = Vec::with_capacity(dim as usize);
    let mut current = vec![0u32; n];
    for deg in 0..=d {
        emit_degree(&mut monos, &mut current, 0, deg);
    }
    Ok(MonomialBasis { vars: vars.to_vec(), monos })
}

/// Emits all exponent vectors of exact total degree `left`, first index
/// taking the largest share first (lexicographic-descending within the
/// degree stratum, matching the graded-lex order).
fn emit_degree(out: &mut Vec<Monomial>, current: &mut Vec<u32>, idx: usize, left: u32) {
    let n = current.len();
    if n == 0 {
        if left == 0 {
            out.push(Expo(Vec::new()));
        }
        return;
    }
    if idx == n - 1 {
        current[idx] = left;
        out.push(Expo(current.clone()));
        current[idx] = 0;
        return;
    }
    for take in (0..=left).rev() {
        current[idx] = take;
        emit_degree(out, current, idx + 1, left - take);
    }
    current[idx] = 0;
}

/// The abstract linear map: a square matrix over the monomial basis whose
/// entries are polynomials in the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractMatrix {
    pub basis: MonomialBasis,
    pub params: Vec<ParamDecl>,
    /// `rows[i][j]` is the coefficient of basis monomial `j` in the image of
    /// basis monomial `i`, as a polynomial over the parameters.
    pub rows: Vec<Vec<MPoly<Rat>>>,
}

impl AbstractMatrix {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Substitutes a concrete parameter draw.
    pub fn instantiate(&self, draws: &[Rat]) -> RatMatrix {
        assert_eq!(draws.len(), self.params.len());
        let n = self.dim();
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if !self.rows[i][j].is_zero() {
                    m[(i, j)] = self.rows[i][j].eval(draws);
                }
            }
        }
        m
    }

    /// The zero-noise matrix (all parameters at zero).
    pub fn instantiate_at_zero(&self) -> RatMatrix {
        let n = self.dim();
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let c = self.rows[i][j].constant_term();
                if !c.is_zero() {
                    m[(i, j)] = c;
                }
            }
        }
        m
    }

    /// `e · (A - A_0)`: the noise covector of a row vector. Every component
    /// vanishes at the zero draw.
    pub fn noise_covector(&self, e: &[Rat]) -> Result<Vec<MPoly<Rat>>, LiftError> {
        let n = self.dim();
        if e.len() != n {
            return Err(LiftError::CovectorDimension { expected: n, got: e.len() });
        }
        let q = self.params.len();
        let mut delta = vec![MPoly::zero(q); n];
        for (i, coeff) in e.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for j in 0..n {
                let entry = &self.rows[i][j];
                if entry.is_zero() {
                    continue;
                }
                let centered = entry.sub(&MPoly::constant(q, entry.constant_term()));
                if !centered.is_zero() {
                    delta[j] = delta[j].add(&centered.scale(coeff));
                }
            }
        }
        Ok(delta)
    }

    /// Serializes to the interchange JSON form.
    pub fn to_json(&self) -> Value {
        let param_names: Vec<&str> = self.params.iter().map(|p| p.name.as_str()).collect();
        json!({
            "basis": (0..self.dim()).map(|i| self.basis.monomial_string(i)).collect::<Vec<_>>(),
            "params": self.params.iter().map(|p| json!({
                "name": p.name,
                "lo": rat_to_fraction_string(&p.lo),
                "hi": rat_to_fraction_string(&p.hi),
            })).collect::<Vec<_>>(),
            "rows": self.rows.iter().map(|row| {
                row.iter()
                    .map(|p| p.to_string_with(&param_names, rat_to_fraction_string))
                    .collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
        })
    }

    /// Parses the interchange JSON form back.
    pub fn from_json(v: &Value) -> Option<AbstractMatrix> {
        let basis_strings: Vec<String> = v
            .get("basis")?
            .as_array()?
            .iter()
            .map(|s| s.as_str().map(String::from))
            .collect::<Option<_>>()?;
        let params: Vec<ParamDecl> = v
            .get("params")?
            .as_array()?
            .iter()
            .map(|p| {
                Some(ParamDecl {
                    name: p.get("name")?.as_str()?.to_string(),
                    lo: rat_from_fraction_string(p.get("lo")?.as_str()?)?,
                    hi: rat_from_fraction_string(p.get("hi")?.as_str()?)?,
                    origin: ParamOrigin::NonDet,
                })
            })
            .collect::<Option<_>>()?;
        // Variables are reconstructed from the basis strings.
        let mut vars: Vec<String> = Vec::new();
        for s in &basis_strings {
            for factor in s.split('*') {
                let name = factor.split('^').next().unwrap();
                if name != "1" && !vars.iter().any(|v| v == name) {
                    vars.push(name.to_string());
                }
            }
        }
        let monos: Vec<Monomial> = basis_strings
            .iter()
            .map(|s| parse_monomial(s, &vars))
            .collect::<Option<_>>()?;
        let basis = MonomialBasis { vars, monos };
        let param_names: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
        let rows: Vec<Vec<MPoly<Rat>>> = v
            .get("rows")?
            .as_array()?
            .iter()
            .map(|row| {
                row.as_array()?
                    .iter()
                    .map(|cell| parse_param_poly(cell.as_str()?, &param_names))
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<_>>()?;
        if rows.len() != basis.dim() || rows.iter().any(|r| r.len() != basis.dim()) {
            return None;
        }
        Some(AbstractMatrix { basis, params, rows })
    }
}

fn parse_monomial(s: &str, vars: &[String]) -> Option<Monomial> {
    let mut exps = vec![0u32; vars.len()];
    if s == "1" {
        return Some(Expo(exps));
    }
    for factor in s.split('*') {
        let (name, e) = match factor.split_once('^') {
            Some((n, e)) => (n, e.parse::<u32>().ok()?),
            None => (factor, 1),
        };
        let idx = vars.iter().position(|v| v == name)?;
        exps[idx] += e;
    }
    Some(Expo(exps))
}

/// Parses the canonical polynomial rendering produced by
/// [`MPoly::to_string_with`] with `p/q` coefficients.
pub fn parse_param_poly(s: &str, names: &[String]) -> Option<MPoly<Rat>> {
    let q = names.len();
    let s = s.trim();
    if s == "0" {
        return Some(MPoly::zero(q));
    }
    let mut poly = MPoly::zero(q);
    // Canonical separators are " + " and " - "; a leading "-" binds tightly.
    let (mut rest, mut sign) = match s.strip_prefix('-') {
        Some(r) => (r, -Rat::one()),
        None => (s, Rat::one()),
    };
    loop {
        let (term, next) = match (rest.find(" + "), rest.find(" - ")) {
            (Some(a), Some(b)) if a < b => (&rest[..a], Some((&rest[a + 3..], Rat::one()))),
            (Some(_), Some(b)) => (&rest[..b], Some((&rest[b + 3..], -Rat::one()))),
            (Some(a), None) => (&rest[..a], Some((&rest[a + 3..], Rat::one()))),
            (None, Some(b)) => (&rest[..b], Some((&rest[b + 3..], -Rat::one()))),
            (None, None) => (rest, None),
        };
        let mut coeff = sign.clone();
        let mut expo = vec![0u32; q];
        for factor in term.split('*') {
            let factor = factor.trim();
            if factor.is_empty() {
                return None;
            }
            if factor.chars().next().unwrap().is_ascii_digit() {
                coeff *= rat_from_fraction_string(factor)?;
            } else {
                let (name, e) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<u32>().ok()?),
                    None => (factor, 1),
                };
                let idx = names.iter().position(|v| v == name)?;
                expo[idx] += e;
            }
        }
        poly.add_term(Expo(expo), coeff);
        match next {
            Some((r, sg)) => {
                rest = r;
                sign = sg;
            }
            None => break,
        }
    }
    Some(poly)
}

/// Lifts the loop body to the abstract matrix over the degree-`d` basis.
///
/// The partition argument witnesses solvability (checked upstream); the lift
/// itself only needs the closure property, which is enforced exactly: any
/// monomial image leaving the basis raises `DegreeOverflow`.
pub fn lift_to_abstract_matrix(
    p: &Program,
    _partition: &crate::ir::SolvablePartition,
    d: u32,
    cap: usize,
) -> Result<AbstractMatrix, LiftError> {
    let basis = monomial_basis(&p.vars, d, cap)?;
    let n = p.nvars();
    let q = p.nparams();
    let body = p.body_polys();
    let dim = basis.dim();
    let mut rows = Vec::with_capacity(dim);
    // Memoized powers of each body polynomial.
    let mut powers: Vec<Vec<MPoly<Rat>>> =
        body.iter().map(|f| vec![MPoly::constant(n + q, Rat::one()), f.clone()]).collect();
    for m in &basis.monos {
        let mut image = MPoly::constant(n + q, Rat::one());
        for (v, &e) in m.0.iter().enumerate() {
            if e > 0 {
                while powers[v].len() <= e as usize {
                    let next = powers[v].last().unwrap().mul(&body[v]);
                    powers[v].push(next);
                }
                image = image.mul(&powers[v][e as usize]);
            }
        }
        let mut row = vec![MPoly::zero(q); dim];
        for (head, coeff_poly) in image.collect_by_prefix(n) {
            match basis.index_of(&head) {
                Some(j) => row[j] = coeff_poly,
                None => {
                    return Err(LiftError::DegreeOverflow {
                        monomial: render_monomial(m, &basis.vars),
                        degree: d,
                    })
                }
            }
        }
        rows.push(row);
    }
    Ok(AbstractMatrix { basis, params: p.params.clone(), rows })
}

/// Convenience: parameter-polynomial pairing `<delta, basis>` as one
/// polynomial over the combined (vars ++ params) ring.
pub fn covector_pairing(
    delta: &[MPoly<Rat>],
    basis: &MonomialBasis,
    nparams: usize,
) -> MPoly<Rat> {
    let n = basis.vars.len();
    let mut acc = MPoly::zero(n + nparams);
    for (j, d) in delta.iter().enumerate() {
        if d.is_zero() {
            continue;
        }
        for (pe, c) in d.terms() {
            let mut exps = basis.monos[j].0.clone();
            exps.extend_from_slice(&pe.0);
            acc.add_term(Expo(exps), c.clone());
        }
    }
    acc
}

/// A covector over the basis as a polynomial in the program variables.
pub fn covector_polynomial(e: &[Rat], basis: &MonomialBasis) -> MPoly<Rat> {
    let n = basis.vars.len();
    let mut acc = MPoly::zero(n);
    for (j, c) in e.iter().enumerate() {
        if !c.is_zero() {
            acc.add_term(basis.monos[j].clone(), c.clone());
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{parse, validate_solvable};
    use crate::Int;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn basis_two_vars_degree_two() {
        let b = monomial_basis(&names(&["x", "y"]), 2, 5000).unwrap();
        let shown: Vec<String> = (0..b.dim()).map(|i| b.monomial_string(i)).collect();
        assert_eq!(shown, vec!["1", "x", "y", "x^2", "x*y", "y^2"]);
    }

    #[test]
    fn basis_one_var_affine() {
        let b = monomial_basis(&names(&["x"]), 1, 5000).unwrap();
        assert_eq!(b.dim(), 2);
    }

    #[test]
    fn basis_dimension_formula() {
        // C(2+4, 4) = 15
        let b = monomial_basis(&names(&["s0", "s1"]), 4, 5000).unwrap();
        assert_eq!(b.dim(), 15);
        for w in b.monos.windows(2) {
            assert!(w[0] < w[1], "basis not strictly increasing");
        }
    }

    #[test]
    fn basis_cap_enforced() {
        let err = monomial_basis(&names(&["a", "b", "c", "d", "e"]), 10, 100).unwrap_err();
        assert!(matches!(err, LiftError::DimensionTooLarge { dim: 3003, cap: 100 }));
    }

    #[test]
    fn identity_body_lifts_to_identity() {
        let p = parse("init x = 1\ninit y = 1\nwhile * do (x, y) := (x, y); done").unwrap();
        let part = validate_solvable(&p).unwrap();
        let a = lift_to_abstract_matrix(&p, &part, 3, 5000).unwrap();
        let m = a.instantiate_at_zero();
        assert_eq!(m, RatMatrix::identity(a.dim()));
    }

    #[test]
    fn degree_overflow_names_the_monomial() {
        let p = parse("while * do (x, y) := (2*x, y + x*x); done").unwrap();
        let part = validate_solvable(&p).unwrap();
        let err = lift_to_abstract_matrix(&p, &part, 1, 5000).unwrap_err();
        match err {
            LiftError::DegreeOverflow { monomial, degree } => {
                assert_eq!(monomial, "y");
                assert_eq!(degree, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unit_row_is_unit() {
        let p = parse("while * do (x, y) := (0.68*(x-y), 0.68*(x+y)); done").unwrap();
        let part = validate_solvable(&p).unwrap();
        let a = lift_to_abstract_matrix(&p, &part, 2, 5000).unwrap();
        for j in 0..a.dim() {
            let want = if j == 0 { Rat::one() } else { Rat::zero() };
            assert_eq!(a.rows[0][j].constant_term(), want);
            assert_eq!(a.rows[0][j].num_terms(), usize::from(j == 0));
        }
    }

    #[test]
    fn json_round_trip() {
        let p = parse(
            "while * do N := non_det(-0.1, 0.1); (x, y) := (0.68*(x-y)+N, 0.68*(x+y)+N); done",
        )
        .unwrap();
        let part = validate_solvable(&p).unwrap();
        let a = lift_to_abstract_matrix(&p, &part, 2, 5000).unwrap();
        let v = a.to_json();
        let back = AbstractMatrix::from_json(&v).expect("parse back");
        assert_eq!(a.rows, back.rows);
        assert_eq!(a.basis.monos, back.basis.monos);
    }

    #[test]
    fn noise_covector_vanishes_at_zero() {
        let p = parse(
            "while * do N := non_det(-0.1, 0.1); (x, y) := (0.68*(x-y)+N, 0.68*(x+y)+N); done",
        )
        .unwrap();
        let part = validate_solvable(&p).unwrap();
        let a = lift_to_abstract_matrix(&p, &part, 2, 5000).unwrap();
        let e: Vec<Rat> = (0..a.dim()).map(|i| rat(i as i64 + 1, 3)).collect();
        let delta = a.noise_covector(&e).unwrap();
        for d in &delta {
            assert!(d.constant_term().is_zero());
        }
        // Zero covector on a parameter-free matrix.
        let det = parse("while * do (x, y) := (0.68*(x-y), 0.68*(x+y)); done").unwrap();
        let part = validate_solvable(&det).unwrap();
        let b = lift_to_abstract_matrix(&det, &part, 2, 5000).unwrap();
        let delta = b.noise_covector(&vec![Rat::one(); b.dim()]).unwrap();
        assert!(delta.iter().all(MPoly::is_zero));
    }

    #[test]
    fn skip_program_basis_is_unit_only() {
        let p = parse("while * do skip; done").unwrap();
        let part = validate_solvable(&p).unwrap();
        let a = lift_to_abstract_matrix(&p, &part, 1, 5000).unwrap();
        assert_eq!(a.dim(), 1);
        assert_eq!(a.instantiate_at_zero(), RatMatrix::identity(1));
    }
}
