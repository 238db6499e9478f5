//! Exact analysis of quadratic sublevel sets `{X : P(X) <= k}`: positive
//! definiteness, certified coordinate bounds and projection onto a subset of
//! variables. Compactness of the sublevel set is what the optimization stage
//! relies on, so everything here errs on the side of refusing.

use num_traits::{One, Zero};

use super::OptError;
use crate::num::interval::Interval;
use crate::num::ratio::rat_sqrt_upper;
use crate::poly::{Expo, MPoly};
use crate::{Rat, RatMatrix, Scalar};

/// Exact determinant by Gaussian elimination.
pub fn determinant(m: &RatMatrix) -> Rat {
    assert!(m.is_square());
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            for j in 0..n {
                let tmp = a[(p, j)].clone();
                a[(p, j)] = a[(c, j)].clone();
                a[(c, j)] = tmp;
            }
            det = -det;
        }
        det *= a[(c, c)].clone();
        let inv = a[(c, c)].clone();
        for i in (c + 1)..n {
            if !a[(i, c)].is_zero() {
                let f = a[(i, c)].clone() / inv.clone();
                for j in c..n {
                    let v = a[(i, j)].clone() - f.clone() * a[(c, j)].clone();
                    a[(i, j)] = v;
                }
            }
        }
    }
    det
}

/// Exact inverse; `None` when singular.
pub fn inverse(m: &RatMatrix) -> Option<RatMatrix> {
    assert!(m.is_square());
    let n = m.nrows();
    let mut a = m.clone();
    let mut inv = RatMatrix::identity(n);
    for c in 0..n {
        let p = (c..n).find(|&i| !a[(i, c)].is_zero())?;
        if p != c {
            for j in 0..n {
                let tmp = a[(p, j)].clone();
                a[(p, j)] = a[(c, j)].clone();
                a[(c, j)] = tmp;
                let tmp = inv[(p, j)].clone();
                inv[(p, j)] = inv[(c, j)].clone();
                inv[(c, j)] = tmp;
            }
        }
        let piv = a[(c, c)].clone();
        for j in 0..n {
            let v = a[(c, j)].clone() / piv.clone();
            a[(c, j)] = v;
            let v = inv[(c, j)].clone() / piv.clone();
            inv[(c, j)] = v;
        }
        for i in 0..n {
            if i != c && !a[(i, c)].is_zero() {
                let f = a[(i, c)].clone();
                for j in 0..n {
                    let v = a[(i, j)].clone() - f.clone() * a[(c, j)].clone();
                    a[(i, j)] = v;
                    let v = inv[(i, j)].clone() - f.clone() * inv[(c, j)].clone();
                    inv[(i, j)] = v;
                }
            }
        }
    }
    Some(inv)
}

/// Sylvester's criterion: all leading principal minors positive.
pub fn is_positive_definite(s: &RatMatrix) -> bool {
    let n = s.nrows();
    for k in 1..=n {
        let idx: Vec<usize> = (0..k).collect();
        if determinant(&s.submatrix(&idx)) <= Rat::zero() {
            return false;
        }
    }
    true
}

/// Decomposition of a degree-two polynomial `P = x^T S x + b^T x + c` over
/// its support variables.
pub struct QuadDecomp {
    /// Indices (into the ambient variable ring) carrying the form.
    pub support: Vec<usize>,
    pub s: RatMatrix,
    pub b: Vec<Rat>,
    pub c: Rat,
}

/// Splits a polynomial of total degree <= 2; `None` when a term of higher
/// degree occurs.
pub fn quadratic_decomposition(p: &MPoly<Rat>) -> Option<QuadDecomp> {
    let support = p.support();
    let pos = |v: usize| support.iter().position(|&u| u == v).unwrap();
    let m = support.len();
    let mut s = RatMatrix::zeros(m, m);
    let mut b = vec![Rat::zero(); m];
    let mut c = Rat::zero();
    for (expo, coeff) in p.terms() {
        let vars: Vec<(usize, u32)> = expo
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i, e))
            .collect();
        let deg: u32 = vars.iter().map(|&(_, e)| e).sum();
        match deg {
            0 => c = coeff.clone(),
            1 => b[pos(vars[0].0)] = coeff.clone(),
            2 => {
                if vars.len() == 1 {
                    let i = pos(vars[0].0);
                    s[(i, i)] = coeff.clone();
                } else {
                    let i = pos(vars[0].0);
                    let j = pos(vars[1].0);
                    let half = coeff / Rat::from_int(2);
                    s[(i, j)] = half.clone();
                    s[(j, i)] = half;
                }
            }
            _ => return None,
        }
    }
    Some(QuadDecomp { support, s, b, c })
}

/// Certified compact enclosure of `{P <= k}` for the variables in `keep`,
/// plus the exact projection of the constraint onto them.
pub struct SublevelBox {
    /// Interval per kept variable (ambient indices).
    pub bounds: Vec<(usize, Interval<Rat>)>,
    /// `{x_keep : exists x_rest. P <= k}` equals `{x_keep : projected <= k}`.
    pub projected: MPoly<Rat>,
    /// Support variables of the constraint (ambient indices).
    pub support: Vec<usize>,
    /// Inverse of the quadratic form matrix over the support.
    pub s_inv: RatMatrix,
    /// Ellipsoid center, full ambient coordinates.
    pub center: Vec<Rat>,
    /// `k - P(center)`: the sublevel is `(x-c)^T S (x-c) <= radius`.
    pub radius: Rat,
}

/// Derives the box and projection. Errors when the constraint is not a
/// positive-definite quadratic (no finite bounding box is derivable) or when
/// a kept variable does not occur in it at all.
pub fn sublevel_box(p: &MPoly<Rat>, k: &Rat, keep: &[usize]) -> Result<SublevelBox, OptError> {
    let nvars = p.nvars();
    let decomp = quadratic_decomposition(p).ok_or_else(|| OptError::UnboundedSublevel {
        reason: "constraint polynomial has degree above two".into(),
    })?;
    for &v in keep {
        if !decomp.support.contains(&v) {
            return Err(OptError::UnboundedSublevel {
                reason: format!("objective variable #{v} is unconstrained by the sublevel polynomial"),
            });
        }
    }
    if !is_positive_definite(&decomp.s) {
        return Err(OptError::UnboundedSublevel {
            reason: "quadratic part of the constraint is not positive definite".into(),
        });
    }
    let s_inv = inverse(&decomp.s).expect("positive definite implies invertible");
    // Center mu = -S^{-1} b / 2 and radius r = k - P(mu).
    let half = Rat::new(1.into(), 2.into());
    let mu: Vec<Rat> = s_inv
        .mat_vec(&decomp.b)
        .into_iter()
        .map(|v| -v * half.clone())
        .collect();
    let mut full_mu = vec![Rat::zero(); nvars];
    for (loc, &amb) in decomp.support.iter().enumerate() {
        full_mu[amb] = mu[loc].clone();
    }
    let p_mu = p.eval(&full_mu);
    let r = k - &p_mu;
    if r < Rat::zero() {
        return Err(OptError::EmptySublevel);
    }

    // Coordinate bounds: |x_i - mu_i| <= sqrt(r * (S^{-1})_ii).
    let mut bounds = Vec::with_capacity(keep.len());
    for &amb in keep {
        let loc = decomp.support.iter().position(|&u| u == amb).unwrap();
        let rad2 = &r * &s_inv[(loc, loc)];
        let rad = rat_sqrt_upper(&rad2, 32).expect("radius squared nonnegative");
        bounds.push((amb, Interval::new(&mu[loc] - &rad, &mu[loc] + &rad)));
    }

    // Projection: eliminate support variables outside keep by substituting
    // the exact minimizer (affine in the kept variables).
    let elim: Vec<usize> = decomp.support.iter().copied().filter(|v| !keep.contains(v)).collect();
    let projected = if elim.is_empty() {
        p.clone()
    } else {
        project_out(p, &decomp, &elim, nvars)
    };
    Ok(SublevelBox {
        bounds,
        projected,
        support: decomp.support,
        s_inv,
        center: full_mu,
        radius: r,
    })
}

/// Substitutes the minimizing affine expression for each eliminated
/// variable: with `P = x^T A x + 2 x^T B y + y^T C y + bx^T x + by^T y + c`
/// the inner minimum over `y` sits at `y* = -C^{-1}(B^T x + by/2)`.
fn project_out(p: &MPoly<Rat>, decomp: &QuadDecomp, elim: &[usize], nvars: usize) -> MPoly<Rat> {
    let loc = |amb: usize| decomp.support.iter().position(|&u| u == amb).unwrap();
    let ne = elim.len();
    let mut c_mat = RatMatrix::zeros(ne, ne);
    for (a, &ea) in elim.iter().enumerate() {
        for (b, &eb) in elim.iter().enumerate() {
            c_mat[(a, b)] = decomp.s[(loc(ea), loc(eb))].clone();
        }
    }
    let c_inv = inverse(&c_mat).expect("principal submatrix of a PD matrix is PD");
    // rhs_a(x) = (B^T x)_a + by_a/2 as affine polynomials over the ambient ring.
    let half = Rat::new(1.into(), 2.into());
    let mut rhs: Vec<MPoly<Rat>> = Vec::with_capacity(ne);
    for &ea in elim {
        let la = loc(ea);
        let mut acc = MPoly::constant(nvars, decomp.b[la].clone() * half.clone());
        for &kv in &decomp.support {
            if elim.contains(&kv) {
                continue;
            }
            let coeff = decomp.s[(la, loc(kv))].clone();
            if !coeff.is_zero() {
                acc.add_term(Expo::var(nvars, kv), coeff);
            }
        }
        rhs.push(acc);
    }
    // y*_a = -(C^{-1} rhs)_a
    let mut y_star: Vec<MPoly<Rat>> = vec![MPoly::zero(nvars); ne];
    for a in 0..ne {
        for b in 0..ne {
            let f = -c_inv[(a, b)].clone();
            if !f.is_zero() {
                y_star[a] = y_star[a].add(&rhs[b].scale(&f));
            }
        }
    }
    let images: Vec<MPoly<Rat>> = (0..nvars)
        .map(|v| match elim.iter().position(|&e| e == v) {
            Some(a) => y_star[a].clone(),
            None => MPoly::var(nvars, v),
        })
        .collect();
    p.compose(&images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Int;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    fn circle(nvars: usize, i: usize, j: usize) -> MPoly<Rat> {
        // x_i^2 + x_j^2
        let mut p = MPoly::zero(nvars);
        let mut e = vec![0u32; nvars];
        e[i] = 2;
        p.add_term(Expo(e.clone()), Rat::one());
        e[i] = 0;
        e[j] = 2;
        p.add_term(Expo(e), Rat::one());
        p
    }

    #[test]
    fn pd_check() {
        let s = RatMatrix::from_rows(vec![
            vec![rat(10, 7), rat(-15, 14)],
            vec![rat(-15, 14), rat(1, 1)],
        ]);
        assert!(is_positive_definite(&s));
        let indef = RatMatrix::from_rows(vec![vec![rat(0, 1), rat(1, 2)], vec![rat(1, 2), rat(0, 1)]]);
        assert!(!is_positive_definite(&indef));
    }

    #[test]
    fn circle_box_is_sqrt_k() {
        let p = circle(2, 0, 1);
        let sb = sublevel_box(&p, &rat(2, 1), &[0, 1]).unwrap();
        for (_, iv) in &sb.bounds {
            // sqrt(2) = 1.4142...; certified upper bound is slightly above.
            assert!(iv.hi >= rat(14142, 10000));
            assert!(iv.hi <= rat(14143, 10000));
            assert_eq!(iv.lo, -iv.hi.clone());
        }
        assert_eq!(sb.projected, p);
    }

    #[test]
    fn projection_of_circle_is_single_square() {
        // min over y of x^2 + y^2 = x^2.
        let p = circle(2, 0, 1);
        let sb = sublevel_box(&p, &rat(1, 1), &[0]).unwrap();
        let mut want = MPoly::zero(2);
        want.add_term(Expo(vec![2, 0]), Rat::one());
        assert_eq!(sb.projected, want);
    }

    #[test]
    fn filter_ellipse_support_bound() {
        // P = (10/7) s0^2 - (15/7) s0 s1 + s1^2; max of c^T x over P <= k is
        // sqrt(k c^T S^{-1} c): with c = e_{s0}, (S^{-1})_00 = 196/55.
        let mut p = MPoly::zero(2);
        p.add_term(Expo(vec![2, 0]), rat(10, 7));
        p.add_term(Expo(vec![1, 1]), rat(-15, 7));
        p.add_term(Expo(vec![0, 2]), rat(1, 1));
        let k = rat(17, 7);
        let sb = sublevel_box(&p, &k, &[0, 1]).unwrap();
        let exact0 = &k * rat(196, 55); // squared half-width for s0
        let hi = &sb.bounds[0].1.hi;
        assert!(hi * hi >= exact0);
        assert!((hi - rat(1, 1000000)) * (hi - rat(1, 1000000)) < exact0);
    }

    #[test]
    fn indefinite_rejected() {
        // P = x*y has an unbounded sublevel set.
        let mut p = MPoly::zero(2);
        p.add_term(Expo(vec![1, 1]), Rat::one());
        assert!(matches!(
            sublevel_box(&p, &rat(1, 1), &[0]),
            Err(OptError::UnboundedSublevel { .. })
        ));
    }

    #[test]
    fn shifted_center_and_empty_detection() {
        // P = (x - 3)^2 + y^2 = x^2 - 6x + 9 + y^2.
        let mut p = circle(2, 0, 1);
        p.add_term(Expo(vec![1, 0]), rat(-6, 1));
        p.add_term(Expo(vec![0, 0]), rat(9, 1));
        let sb = sublevel_box(&p, &rat(4, 1), &[0]).unwrap();
        let iv = &sb.bounds[0].1;
        assert!(iv.contains(&rat(3, 1)));
        assert!(iv.lo >= rat(99, 100) && iv.hi <= rat(501, 100));
        assert!(matches!(
            sublevel_box(&p, &rat(-1, 1), &[0]),
            Err(OptError::EmptySublevel)
        ));
    }
}
