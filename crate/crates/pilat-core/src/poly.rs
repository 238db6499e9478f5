//! Dense-exponent multivariate and univariate polynomials, generic over the
//! scalar type.
//!
//! Terms are kept in a `BTreeMap` keyed by graded-lexicographic exponent
//! vectors, so iteration order doubles as the canonical term order used for
//! printing, hashing and serialization.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::Zero;

use crate::num::interval::Interval;
use crate::num::scalar::Scalar;

/// Graded order: lower total degree first, then lexicographically by
/// exponent vector with earlier variables dominating (`x^2 < x*y < y^2`).
pub fn cmp_graded_lex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    match da.cmp(&db) {
        Ordering::Equal => b.cmp(a),
        other => other,
    }
}

/// Exponent vector ordered graded-lex; the all-zero vector is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Expo(pub Vec<u32>);

impl Expo {
    pub fn unit(nvars: usize) -> Self {
        Expo(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Expo(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&i| self.0[i]).sum()
    }

    pub fn mul(&self, other: &Expo) -> Expo {
        Expo(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl PartialOrd for Expo {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expo {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_graded_lex(&self.0, &other.0)
    }
}

/// Multivariate polynomial over `nvars` indeterminates.
#[derive(Debug, Clone, PartialEq)]
pub struct MPoly<T> {
    nvars: usize,
    terms: BTreeMap<Expo, T>,
}

impl<T: Scalar> MPoly<T> {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = MPoly::zero(nvars);
        p.add_term(Expo::unit(nvars), c);
        p
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        assert!(idx < nvars);
        let mut p = MPoly::zero(nvars);
        p.add_term(Expo::var(nvars, idx), T::one());
        p
    }

    pub fn monomial(nvars: usize, expo: Expo, c: T) -> Self {
        let mut p = MPoly::zero(nvars);
        p.add_term(expo, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &T)> {
        self.terms.iter()
    }

    pub fn coeff(&self, expo: &Expo) -> T {
        self.terms.get(expo).cloned().unwrap_or_else(T::zero)
    }

    pub fn constant_term(&self) -> T {
        self.coeff(&Expo::unit(self.nvars))
    }

    pub fn add_term(&mut self, expo: Expo, c: T) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(expo.0.len(), self.nvars);
        match self.terms.entry(expo) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        let mut out = MPoly::zero(self.nvars);
        for (e, k) in &self.terms {
            out.terms.insert(e.clone(), k.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.mul(eb), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = MPoly::constant(self.nvars, T::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    pub fn eval(&self, point: &[T]) -> T {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &exp) in e.0.iter().enumerate() {
                for _ in 0..exp {
                    term = term * point[i].clone();
                }
            }
            acc += term;
        }
        acc
    }

    /// Natural interval extension over a box.
    pub fn eval_interval(&self, box_: &[Interval<T>]) -> Interval<T> {
        let mut acc = Interval::zero();
        for (e, c) in &self.terms {
            let mut term = Interval::point(c.clone());
            for (i, &exp) in e.0.iter().enumerate() {
                if exp > 0 {
                    term = term.mul(&box_[i].pow(exp));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Substitutes each variable by the given polynomial (all over the same
    /// target variable set).
    pub fn compose(&self, images: &[MPoly<T>]) -> MPoly<T> {
        debug_assert_eq!(images.len(), self.nvars);
        let out_nvars = images.first().map_or(0, |p| p.nvars);
        let mut acc = MPoly::zero(out_nvars);
        for (e, c) in &self.terms {
            let mut term = MPoly::constant(out_nvars, c.clone());
            for (i, &exp) in e.0.iter().enumerate() {
                if exp > 0 {
                    term = term.mul(&images[i].pow(exp));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Maximum total degree; zero polynomial reports 0.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Expo::total_degree).max().unwrap_or(0)
    }

    /// Maximum degree counting only the listed variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        self.terms.keys().map(|e| e.degree_in(vars)).max().unwrap_or(0)
    }

    /// Variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        let mut used = vec![false; self.nvars];
        for e in self.terms.keys() {
            for (i, &exp) in e.0.iter().enumerate() {
                if exp > 0 {
                    used[i] = true;
                }
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(i, _)| i).collect()
    }

    /// Terms whose degree in `vars` is exactly `deg`.
    pub fn leading_form_in(&self, vars: &[usize], deg: u32) -> MPoly<T> {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e.degree_in(vars) == deg {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    pub fn partial_derivative(&self, var: usize) -> MPoly<T> {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let exp = e.0[var];
            if exp > 0 {
                let mut d = e.clone();
                d.0[var] = exp - 1;
                out.add_term(d, c.clone() * T::from_int(exp as i64));
            }
        }
        out
    }

    /// Splits combined-ring terms by the exponents of the first `n`
    /// variables: the result maps each leading exponent block to the
    /// coefficient polynomial in the remaining variables.
    pub fn collect_by_prefix(&self, n: usize) -> BTreeMap<Expo, MPoly<T>> {
        let rest = self.nvars - n;
        let mut out: BTreeMap<Expo, MPoly<T>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let head = Expo(e.0[..n].to_vec());
            let tail = Expo(e.0[n..].to_vec());
            out.entry(head)
                .or_insert_with(|| MPoly::zero(rest))
                .add_term(tail, c.clone());
        }
        out
    }

    /// Applies `f` to every coefficient (e.g. rational to `f64`).
    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MPoly<U> {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Widens the variable set: existing variables keep their indices.
    pub fn extend_vars(&self, new_nvars: usize) -> MPoly<T> {
        assert!(new_nvars >= self.nvars);
        let mut out = MPoly::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut exps = e.0.clone();
            exps.resize(new_nvars, 0);
            out.terms.insert(Expo(exps), c.clone());
        }
        out
    }

    /// Canonical rendering with the given variable names; coefficients are
    /// formatted by `fmt_coeff`.
    pub fn to_string_with(&self, names: &[&str], fmt_coeff: impl Fn(&T) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let coeff_str = fmt_coeff(c);
            let (neg, mag) = match coeff_str.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, coeff_str),
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &exp) in e.0.iter().enumerate() {
                if exp == 1 {
                    factors.push(names[i].to_string());
                } else if exp > 1 {
                    factors.push(format!("{}^{}", names[i], exp));
                }
            }
            let is_one = mag == "1" || mag == "1/1";
            if factors.is_empty() {
                out.push_str(&mag);
            } else if is_one {
                out.push_str(&factors.join("*"));
            } else {
                out.push_str(&mag);
                out.push('*');
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

/// Univariate polynomial, coefficients stored low to high.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> UniPoly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        UniPoly::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        UniPoly::new(self.coeffs.iter().map(|k| k.clone() * c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a.clone() * b.clone();
            }
        }
        UniPoly::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_int(i as i64))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn rp(pairs: &[(&[u32], i64)]) -> MPoly<Rat> {
        let nvars = pairs[0].0.len();
        let mut p = MPoly::zero(nvars);
        for (e, c) in pairs {
            p.add_term(Expo(e.to_vec()), Rat::from_int(*c));
        }
        p
    }

    #[test]
    fn graded_lex_order() {
        // 1 < x < y < x^2 < xy < y^2 for two variables.
        let order = [
            vec![0u32, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![1, 1],
            vec![0, 2],
        ];
        for w in order.windows(2) {
            assert_eq!(cmp_graded_lex(&w[0], &w[1]), Ordering::Less);
        }
    }

    #[test]
    fn mul_and_eval_agree() {
        // (x + y)^2 = x^2 + 2xy + y^2
        let s = rp(&[(&[1, 0], 1), (&[0, 1], 1)]);
        let sq = s.mul(&s);
        assert_eq!(sq.coeff(&Expo(vec![1, 1])), Rat::from_int(2));
        let pt = [Rat::from_int(3), Rat::from_int(4)];
        assert_eq!(sq.eval(&pt), Rat::from_int(49));
    }

    #[test]
    fn compose_matches_eval() {
        // p(x, y) = x^2 - y, images x -> x + y, y -> x*y.
        let p = rp(&[(&[2, 0], 1), (&[0, 1], -1)]);
        let fx = rp(&[(&[1, 0], 1), (&[0, 1], 1)]);
        let fy = rp(&[(&[1, 1], 1)]);
        let c = p.compose(&[fx.clone(), fy.clone()]);
        let pt = [Rat::from_int(2), Rat::from_int(5)];
        let direct = p.eval(&[fx.eval(&pt), fy.eval(&pt)]);
        assert_eq!(c.eval(&pt), direct);
    }

    #[test]
    fn interval_extension_contains_point_values() {
        let p = rp(&[(&[2, 0], 1), (&[1, 1], -3), (&[0, 0], 2)]);
        let box_ = [
            Interval::new(Rat::from_int(-1), Rat::from_int(2)),
            Interval::new(Rat::from_int(0), Rat::from_int(1)),
        ];
        let iv = p.eval_interval(&box_);
        for (x, y) in [(-1i64, 0i64), (2, 1), (0, 1), (1, 1)] {
            let v = p.eval(&[Rat::from_int(x), Rat::from_int(y)]);
            assert!(iv.contains(&v));
        }
    }

    #[test]
    fn display_canonical() {
        let p = rp(&[(&[2, 0], 1), (&[1, 1], -3), (&[0, 0], 2)]);
        let s = p.to_string_with(&["x", "y"], |c| crate::num::ratio::rat_display(c));
        assert_eq!(s, "2 + x^2 - 3*x*y");
    }

    #[test]
    fn unipoly_mul_eval() {
        // (1 + x)(2 + x) = 2 + 3x + x^2
        let a = UniPoly::new(vec![Rat::from_int(1), Rat::from_int(1)]);
        let b = UniPoly::new(vec![Rat::from_int(2), Rat::from_int(1)]);
        let p = a.mul(&b);
        assert_eq!(p.coeffs(), &[Rat::from_int(2), Rat::from_int(3), Rat::from_int(1)]);
        assert_eq!(p.eval(&Rat::from_int(2)), Rat::from_int(12));
    }
}
