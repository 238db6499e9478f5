//! Closed interval arithmetic, exact when instantiated with rationals.

use num_traits::Zero;

use super::scalar::Scalar;

/// Closed interval `[lo, hi]`. With a rational scalar every operation is
/// exact, so enclosures computed here are certificates rather than estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(v: T) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Interval::point(T::zero())
    }

    pub fn contains(&self, v: &T) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn width(&self) -> T {
        self.hi.clone() - self.lo.clone()
    }

    pub fn midpoint(&self) -> T {
        (self.lo.clone() + self.hi.clone()) / T::from_int(2)
    }

    /// Largest magnitude of any point of the interval.
    pub fn abs_sup(&self) -> T {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Interval::new(self.lo.clone() + other.lo.clone(), self.hi.clone() + other.hi.clone())
    }

    pub fn neg(&self) -> Self {
        Interval::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cands = [
            self.lo.clone() * other.lo.clone(),
            self.lo.clone() * other.hi.clone(),
            self.hi.clone() * other.lo.clone(),
            self.hi.clone() * other.hi.clone(),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        Interval::new(lo, hi)
    }

    pub fn scale(&self, c: &T) -> Self {
        if *c >= T::zero() {
            Interval::new(self.lo.clone() * c.clone(), self.hi.clone() * c.clone())
        } else {
            Interval::new(self.hi.clone() * c.clone(), self.lo.clone() * c.clone())
        }
    }

    /// Tight power: even exponents of straddling intervals clamp at zero.
    pub fn pow(&self, e: u32) -> Self {
        match e {
            0 => Interval::point(T::one()),
            1 => self.clone(),
            _ => {
                let lp = num_traits::pow::pow(self.lo.clone(), e as usize);
                let hp = num_traits::pow::pow(self.hi.clone(), e as usize);
                if e % 2 == 1 {
                    Interval::new(lp, hp)
                } else if self.lo >= T::zero() {
                    Interval::new(lp, hp)
                } else if self.hi <= T::zero() {
                    Interval::new(hp, lp)
                } else {
                    let hi = if lp > hp { lp } else { hp };
                    Interval::new(T::zero(), hi)
                }
            }
        }
    }

    /// Splits at the midpoint along this interval.
    pub fn bisect(&self) -> (Self, Self) {
        let mid = self.midpoint();
        (
            Interval::new(self.lo.clone(), mid.clone()),
            Interval::new(mid, self.hi.clone()),
        )
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

impl<T: Scalar> Interval<T> {
    /// Interval hull of two intervals.
    pub fn hull(&self, other: &Self) -> Self {
        let lo = if self.lo <= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi >= other.hi { self.hi.clone() } else { other.hi.clone() };
        Interval::new(lo, hi)
    }

    /// Intersection; `None` when disjoint.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = if self.lo >= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi <= other.hi { self.hi.clone() } else { other.hi.clone() };
        if lo <= hi {
            Some(Interval::new(lo, hi))
        } else {
            None
        }
    }

    pub fn straddles_zero(&self) -> bool {
        self.lo < T::zero() && self.hi > T::zero()
    }
}

impl<T: Scalar> Zero for Interval<T> {
    fn zero() -> Self {
        Interval::zero()
    }
    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
    fn set_zero(&mut self) {
        *self = Interval::zero();
    }
}

impl<T: Scalar> std::ops::Add for Interval<T> {
    type Output = Interval<T>;
    fn add(self, rhs: Self) -> Self {
        Interval::add(&self, &rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn iv(a: i64, b: i64) -> Interval<Rat> {
        Interval::new(Rat::from_int(a), Rat::from_int(b))
    }

    #[test]
    fn mul_signs() {
        let a = iv(-2, 3);
        let b = iv(-1, 4);
        let p = a.mul(&b);
        assert_eq!(p, iv(-8, 12));
    }

    #[test]
    fn even_pow_clamps_at_zero() {
        let a = iv(-2, 3);
        assert_eq!(a.pow(2), iv(0, 9));
        assert_eq!(iv(-3, -1).pow(2), iv(1, 9));
        assert_eq!(a.pow(3), iv(-8, 27));
    }

    #[test]
    fn hull_and_intersect() {
        assert_eq!(iv(0, 2).hull(&iv(1, 5)), iv(0, 5));
        assert_eq!(iv(0, 2).intersect(&iv(1, 5)), Some(iv(1, 2)));
        assert_eq!(iv(0, 1).intersect(&iv(2, 3)), None);
    }
}
