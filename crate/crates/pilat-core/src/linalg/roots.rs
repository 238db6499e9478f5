//! Rational roots of rational univariate polynomials via the rational root
//! theorem: clear denominators, factor the extreme coefficients, enumerate
//! candidate p/q pairs and confirm each by exact evaluation.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::LinalgError;
use crate::poly::UniPoly;
use crate::{Int, Rat};

/// Hard ceiling on enumerated divisor pairs before giving up.
const DIVISOR_BUDGET: usize = 200_000;
/// Trial division bound; leftovers are handled by Miller-Rabin / Pollard rho.
const TRIAL_BOUND: u64 = 100_000;

/// All rational roots of `p`, without multiplicity. Errors with
/// `DivisorExplosion` when the extreme coefficients cannot be factored within
/// budget (callers may fall back to the numeric path).
pub fn rational_roots(p: &UniPoly<Rat>) -> Result<Vec<Rat>, LinalgError> {
    if p.is_zero() || p.degree() == 0 {
        return Ok(Vec::new());
    }
    // Clear denominators to an integer polynomial.
    let mut lcm = Int::one();
    for c in p.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    let mut ints: Vec<Int> = p.coeffs().iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect();

    let mut roots: Vec<Rat> = Vec::new();
    // Strip powers of lambda; zero is a root whenever the constant term vanishes.
    let mut start = 0usize;
    while start < ints.len() && ints[start].is_zero() {
        start += 1;
    }
    if start > 0 {
        roots.push(Rat::zero());
        ints.drain(..start);
    }
    if ints.len() <= 1 {
        return Ok(roots);
    }
    // Remove content for smaller factorizations.
    let mut content = Int::zero();
    for c in &ints {
        content = content.gcd(c);
    }
    if !content.is_one() && !content.is_zero() {
        for c in &mut ints {
            *c /= &content;
        }
    }

    let a0 = ints.first().unwrap().abs();
    let an = ints.last().unwrap().abs();
    let p_divs = divisors(&a0)?;
    let q_divs = divisors(&an)?;
    if p_divs.len().saturating_mul(q_divs.len()) > DIVISOR_BUDGET {
        return Err(LinalgError::DivisorExplosion {
            value: format!("{} divisor pairs", p_divs.len() * q_divs.len()),
            budget: DIVISOR_BUDGET,
        });
    }

    // Cauchy bound: every root satisfies |r| <= 1 + max|a_i| / |a_n|.
    let max_coeff = ints.iter().map(Signed::abs).max().unwrap();
    let bound = Rat::one() + Rat::new(max_coeff, an.clone());

    let eval = |x: &Rat| -> bool {
        let mut acc = Rat::zero();
        for c in ints.iter().rev() {
            acc = acc * x + Rat::from_integer(c.clone());
        }
        acc.is_zero()
    };

    for num in &p_divs {
        for den in &q_divs {
            if !num.gcd(den).is_one() {
                continue;
            }
            let cand = Rat::new(num.clone(), den.clone());
            if cand > bound {
                continue;
            }
            for signed in [cand.clone(), -cand] {
                if !roots.contains(&signed) && eval(&signed) {
                    roots.push(signed);
                }
            }
        }
    }
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(roots)
}

/// All positive divisors of |n|, or `DivisorExplosion` when factoring fails.
pub fn divisors(n: &Int) -> Result<Vec<Int>, LinalgError> {
    let n = n.abs();
    if n.is_zero() {
        // Divisor candidates of a zero coefficient are unconstrained; callers
        // strip zero roots first, so this means the polynomial was constant.
        return Ok(vec![Int::one()]);
    }
    let factors = factorize(&n)?;
    let mut divs: Vec<Int> = vec![Int::one()];
    for (prime, mult) in factors {
        let mut extended = Vec::with_capacity(divs.len() * (mult as usize + 1));
        for d in &divs {
            let mut power = Int::one();
            for _ in 0..=mult {
                extended.push(d * &power);
                power *= &prime;
            }
        }
        divs = extended;
        if divs.len() > DIVISOR_BUDGET {
            return Err(LinalgError::DivisorExplosion {
                value: n.to_string(),
                budget: DIVISOR_BUDGET,
            });
        }
    }
    divs.sort();
    Ok(divs)
}

/// Prime factorization with a work budget: trial division, then
/// deterministic Miller-Rabin plus Pollard rho for 64-bit leftovers.
fn factorize(n: &Int) -> Result<BTreeMap<Int, u32>, LinalgError> {
    let mut out: BTreeMap<Int, u32> = BTreeMap::new();
    let mut rem = n.clone();
    let explosion = |v: &Int| LinalgError::DivisorExplosion {
        value: v.to_string(),
        budget: DIVISOR_BUDGET,
    };

    let push = |map: &mut BTreeMap<Int, u32>, p: Int| {
        *map.entry(p).or_insert(0) += 1;
    };

    for small in std::iter::once(2u64).chain((3..=TRIAL_BOUND).step_by(2)) {
        let p = Int::from(small);
        if &p * &p > rem {
            break;
        }
        while (&rem % &p).is_zero() {
            rem /= &p;
            push(&mut out, p.clone());
        }
        if rem.is_one() {
            break;
        }
    }
    if rem.is_one() {
        return Ok(out);
    }
    // Leftover cofactor: must fit in u64 to finish deterministically.
    let Some(r64) = rem.to_u64() else {
        return Err(explosion(&rem));
    };
    let mut pending = vec![r64];
    let mut rounds = 0usize;
    while let Some(m) = pending.pop() {
        rounds += 1;
        if rounds > 64 {
            return Err(explosion(&Int::from(m)));
        }
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            push(&mut out, Int::from(m));
            continue;
        }
        match pollard_rho(m) {
            Some(d) => {
                pending.push(d);
                pending.push(m / d);
            }
            None => return Err(explosion(&Int::from(m))),
        }
    }
    Ok(out)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (the 12-base certificate set).
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho; returns a nontrivial factor.
fn pollard_rho(n: u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    let mut c = 1u64;
    for _ in 0..20 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut steps = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
            steps += 1;
            if steps > 1 << 22 {
                break;
            }
        }
        if d != n && d != 1 {
            return Some(d);
        }
        c += 1;
    }
    None
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    #[test]
    fn finds_planted_roots() {
        // (lambda - 578/625)(lambda - 1)(lambda + 2/3)
        let p = UniPoly::new(vec![rat(1, 1)])
            .mul(&UniPoly::new(vec![rat(-578, 625), rat(1, 1)]))
            .mul(&UniPoly::new(vec![rat(-1, 1), rat(1, 1)]))
            .mul(&UniPoly::new(vec![rat(2, 3), rat(1, 1)]));
        let roots = rational_roots(&p).unwrap();
        assert_eq!(roots, vec![rat(1, 1), rat(578, 625), rat(-2, 3)]);
    }

    #[test]
    fn zero_root_stripped() {
        // lambda^2 (lambda - 3)
        let p = UniPoly::new(vec![rat(0, 1), rat(0, 1), rat(-3, 1), rat(1, 1)]);
        let roots = rational_roots(&p).unwrap();
        assert!(roots.contains(&Rat::zero()));
        assert!(roots.contains(&rat(3, 1)));
    }

    #[test]
    fn irrational_only_yields_empty() {
        // lambda^2 - 2
        let p = UniPoly::new(vec![rat(-2, 1), rat(0, 1), rat(1, 1)]);
        assert!(rational_roots(&p).unwrap().is_empty());
    }

    #[test]
    fn smooth_huge_constant_is_fine() {
        // lambda - 2^40/5^20: coefficients huge but smooth.
        let big = rat(1, 1) * Rat::new(Int::from(2).pow(40), Int::from(5).pow(20));
        let p = UniPoly::new(vec![-big.clone(), rat(1, 1)]);
        assert_eq!(rational_roots(&p).unwrap(), vec![big]);
    }

    #[test]
    fn miller_rabin_known_values() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007u64 * 3));
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
    }
}
