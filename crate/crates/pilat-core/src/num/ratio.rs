//! Exact rational helpers: decimal literals, canonical printing, certified
//! square-root enclosures and dyadic sampling.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::{Int, Rat};

/// Parses a decimal literal (`17`, `0.68`, `-0.1`) into an exact rational.
/// `0.68` becomes `17/25`.
pub fn rat_from_decimal(text: &str) -> Option<Rat> {
    let text = text.trim();
    let (sign, digits) = match text.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, text),
    };
    let digits = digits.strip_prefix('+').unwrap_or(digits);
    if digits.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let num: Int = joined.parse().ok()?;
    let den = Int::from(10u32).pow(frac_part.len() as u32);
    Some(Rat::new(num * Int::from(sign), den))
}

/// Canonical `p/q` form (always includes the denominator).
pub fn rat_to_fraction_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses the canonical `p/q` form; falls back to a decimal literal.
pub fn rat_from_fraction_string(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: Int = num.trim().parse().ok()?;
        let d: Int = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        rat_from_decimal(s)
    }
}

/// True when the rational has a finite decimal expansion (denominator 2^a·5^b).
pub fn has_finite_decimal(r: &Rat) -> bool {
    let mut d = r.denom().clone();
    for p in [2u32, 5u32] {
        let p = Int::from(p);
        while (&d % &p).is_zero() {
            d /= &p;
        }
    }
    d.is_one()
}

/// Exact decimal expansion; only valid when [`has_finite_decimal`] holds.
pub fn rat_to_exact_decimal(r: &Rat) -> String {
    debug_assert!(has_finite_decimal(r));
    let mut twos = 0u32;
    let mut fives = 0u32;
    let mut d = r.denom().clone();
    let two = Int::from(2);
    let five = Int::from(5);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    let shift = twos.max(fives);
    // p/(2^a 5^b) = p·2^(s-a)·5^(s-b) / 10^s
    let scaled = r.numer() * two.pow(shift - twos) * five.pow(shift - fives);
    let (sign, mag) = if scaled.is_negative() {
        ("-", -scaled)
    } else {
        ("", scaled)
    };
    let digits = mag.to_string();
    if shift == 0 {
        return format!("{sign}{digits}");
    }
    let s = shift as usize;
    let padded = if digits.len() <= s {
        format!("{}{}", "0".repeat(s + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int_part, frac_part) = padded.split_at(padded.len() - s);
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Prints a rational for human output: exact decimal when finite, else `p/q`.
pub fn rat_display(r: &Rat) -> String {
    if has_finite_decimal(r) {
        rat_to_exact_decimal(r)
    } else {
        rat_to_fraction_string(r)
    }
}

/// Decimal rendering truncated toward zero at `sig` significant digits
/// (`10/7`, 6 → `1.42857`). Exact values shorter than `sig` print in full.
pub fn rat_to_decimal_truncated(r: &Rat, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let mag = r.abs();
    let mut int_part = mag.numer() / mag.denom();
    let mut rem = mag.numer() - &int_part * mag.denom();
    let ten = Int::from(10);
    let mut frac_digits = String::new();
    let mut sig_seen = int_part.to_string().trim_start_matches('0').len();
    let int_str = int_part.to_string();
    if sig_seen >= sig {
        // Truncate within the integer part.
        let keep = &int_str[..sig];
        let zeros = "0".repeat(int_str.len() - sig);
        int_part = format!("{keep}{zeros}").parse().unwrap();
        rem = Int::zero();
        sig_seen = sig;
    }
    while !rem.is_zero() && (sig_seen < sig) {
        rem *= &ten;
        let digit = &rem / mag.denom();
        rem -= &digit * mag.denom();
        if sig_seen > 0 || !digit.is_zero() {
            sig_seen += 1;
        }
        frac_digits.push_str(&digit.to_string());
    }
    let frac_digits = frac_digits.trim_end_matches('0');
    let body = if frac_digits.is_empty() {
        int_part.to_string()
    } else {
        format!("{int_part}.{frac_digits}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Floor of the integer square root.
pub fn int_sqrt_floor(n: &Int) -> Int {
    assert!(!n.is_negative(), "sqrt of negative integer");
    n.sqrt()
}

/// Rational enclosure `[lo, hi]` of `sqrt(q)` with `hi - lo <= 2^-precision`-ish
/// resolution (the error is `1/(2^precision · denom)` before reduction).
pub fn rat_sqrt_bounds(q: &Rat, precision: u32) -> Option<(Rat, Rat)> {
    if q.is_negative() {
        return None;
    }
    if q.is_zero() {
        return Some((Rat::zero(), Rat::zero()));
    }
    // sqrt(p/d) = sqrt(p·d)/d; scale by 4^precision for extra bits.
    let z = q.numer() * q.denom();
    let scaled = &z << (2 * precision as usize);
    let root = int_sqrt_floor(&scaled);
    let den = q.denom() * (Int::one() << (precision as usize));
    let lo = Rat::new(root.clone(), den.clone());
    let hi = Rat::new(root + Int::one(), den);
    Some((lo, hi))
}

/// Certified `x >= sqrt(q)`.
pub fn rat_sqrt_upper(q: &Rat, precision: u32) -> Option<Rat> {
    rat_sqrt_bounds(q, precision).map(|(_, hi)| hi)
}

/// Certified `x <= sqrt(q)`.
pub fn rat_sqrt_lower(q: &Rat, precision: u32) -> Option<Rat> {
    rat_sqrt_bounds(q, precision).map(|(lo, _)| lo)
}

/// Uniform dyadic rational in `[lo, hi]` (numerator resolution 2^16).
pub fn sample_in_interval<R: Rng>(rng: &mut R, lo: &Rat, hi: &Rat) -> Rat {
    if lo == hi {
        return lo.clone();
    }
    let steps: u32 = 1 << 16;
    let j = rng.gen_range(0..=steps);
    lo + (hi - lo) * Rat::new(Int::from(j), Int::from(steps))
}

/// Random rational with small denominator in `[-scale, scale]`.
pub fn sample_small<R: Rng>(rng: &mut R, scale: i64) -> Rat {
    let den = 16i64;
    let n = rng.gen_range(-scale * den..=scale * den);
    Rat::new(Int::from(n), Int::from(den))
}

/// Nearest rational below an `f64` (exact binary expansion of the float).
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Lossy conversion for diagnostics and the numeric fallback path.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    #[test]
    fn decimal_parse_exact() {
        assert_eq!(rat_from_decimal("0.68").unwrap(), rat(17, 25));
        assert_eq!(rat_from_decimal("-0.1").unwrap(), rat(-1, 10));
        assert_eq!(rat_from_decimal("14.9").unwrap(), rat(149, 10));
        assert_eq!(rat_from_decimal("3").unwrap(), rat(3, 1));
        assert!(rat_from_decimal("1.2.3").is_none());
        assert!(rat_from_decimal("").is_none());
    }

    #[test]
    fn decimal_print_round_trip() {
        for (n, d) in [(17, 25), (-1, 10), (149, 10), (0, 1), (5, 1), (1, 4096)] {
            let r = rat(n, d);
            assert_eq!(rat_from_decimal(&rat_to_exact_decimal(&r)).unwrap(), r);
        }
        assert_eq!(rat_display(&rat(1, 3)), "1/3");
    }

    #[test]
    fn truncated_significant_digits() {
        assert_eq!(rat_to_decimal_truncated(&rat(10, 7), 6), "1.42857");
        assert_eq!(rat_to_decimal_truncated(&rat(15, 7), 6), "2.14285");
        assert_eq!(rat_to_decimal_truncated(&rat(149, 10), 6), "14.9");
        assert_eq!(rat_to_decimal_truncated(&rat(-15, 7), 6), "-2.14285");
        assert_eq!(rat_to_decimal_truncated(&rat(75, 128), 6), "0.585937");
        assert_eq!(rat_to_decimal_truncated(&rat(1234567, 1), 3), "1230000");
    }

    #[test]
    fn sqrt_bounds_enclose() {
        for (n, d) in [(2, 1), (149, 10), (17, 7), (1, 3)] {
            let q = rat(n, d);
            let (lo, hi) = rat_sqrt_bounds(&q, 32).unwrap();
            assert!(&lo * &lo <= q, "lo^2 > q");
            assert!(&hi * &hi >= q, "hi^2 < q");
            assert!(&hi - &lo <= rat(1, 1 << 30));
        }
    }

    #[test]
    fn fraction_string_round_trip() {
        let r = rat(-578, 625);
        assert_eq!(rat_to_fraction_string(&r), "-578/625");
        assert_eq!(rat_from_fraction_string("-578/625").unwrap(), r);
        assert_eq!(rat_from_fraction_string("0.68").unwrap(), rat(17, 25));
    }
}
