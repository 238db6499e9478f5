//! Floating-point fallback: approximate real left eigenpairs for matrices
//! whose exact divisor enumeration blew the budget. Results are tagged
//! `unverified` upstream and never feed the exact-invariant path.

use super::{char_poly, Matrix};

/// An approximate real eigenvalue with one left eigenvector.
#[derive(Debug, Clone)]
pub struct ApproxEigenpair {
    pub value: f64,
    pub left_vector: Vec<f64>,
}

/// Real eigenvalues by sign-change bisection on the f64 characteristic
/// polynomial, each paired with a least-norm kernel vector of `A^t - v*I`.
pub fn real_left_eigenpairs(a: &Matrix<f64>, tol: f64) -> Vec<ApproxEigenpair> {
    let p = char_poly(a);
    let coeffs = p.coeffs().to_vec();
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    // Cauchy bound on root magnitude.
    let lead = coeffs[n].abs().max(1e-300);
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.abs()).fold(0.0, f64::max) / lead;
    let eval = |x: f64| -> f64 { coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c) };

    let samples = 8192;
    let mut roots: Vec<f64> = Vec::new();
    let mut prev_x = -radius;
    let mut prev_v = eval(prev_x);
    for i in 1..=samples {
        let x = -radius + 2.0 * radius * (i as f64) / (samples as f64);
        let v = eval(x);
        if prev_v == 0.0 {
            roots.push(prev_x);
        } else if prev_v * v < 0.0 {
            let (mut lo, mut hi) = (prev_x, x);
            let (mut flo, _) = (prev_v, v);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = eval(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_v = v;
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < tol);

    let at = a.transpose();
    roots
        .into_iter()
        .filter_map(|value| {
            let shifted = at.sub_scaled_identity(&value);
            kernel_vector_f64(&shifted, tol).map(|left_vector| ApproxEigenpair { value, left_vector })
        })
        .collect()
}

/// One kernel vector of a nearly singular matrix via pivoted elimination.
fn kernel_vector_f64(a: &Matrix<f64>, tol: f64) -> Option<Vec<f64>> {
    let n = a.ncols();
    let mut m = a.clone();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    for c in 0..n {
        let mut best = r;
        for i in r..m.nrows() {
            if m[(i, c)].abs() > m[(best, c)].abs() {
                best = i;
            }
        }
        if m[(best, c)].abs() <= tol {
            continue;
        }
        for j in 0..n {
            let tmp = m[(best, j)];
            m[(best, j)] = m[(r, j)];
            m[(r, j)] = tmp;
        }
        let inv = m[(r, c)];
        for j in 0..n {
            m[(r, j)] /= inv;
        }
        for i in 0..m.nrows() {
            if i != r {
                let f = m[(i, c)];
                if f != 0.0 {
                    for j in 0..n {
                        m[(i, j)] -= f * m[(r, j)];
                    }
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free = (0..n).find(|c| !pivot_cols.contains(c))?;
    let mut v = vec![0.0; n];
    v[free] = 1.0;
    for &(pr, pc) in &pivots {
        v[pc] = -m[(pr, free)];
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_real_spectrum() {
        // Diagonalizable with eigenvalues 2 and -1.
        let a = Matrix::from_rows(vec![vec![1.0, 2.0], vec![1.0, 0.0]]);
        let pairs = real_left_eigenpairs(&a, 1e-9);
        let mut vals: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        vals.sort_by(f64::total_cmp);
        assert_eq!(vals.len(), 2);
        assert!((vals[0] + 1.0).abs() < 1e-6);
        assert!((vals[1] - 2.0).abs() < 1e-6);
        for p in &pairs {
            let img = a.vec_mat(&p.left_vector);
            for (got, want) in img.iter().zip(p.left_vector.iter().map(|x| x * p.value)) {
                assert!((got - want).abs() < 1e-6);
            }
        }
    }
}
