use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::rational::Rational;

/// `real + coeff·δ` for a symbolic infinitesimal `δ > 0`.
///
/// Ordering is lexicographic on `(real, delta)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DeltaRational {
    pub real: Rational,
    pub delta: Rational,
}

impl DeltaRational {
    pub fn new(real: Rational, delta: Rational) -> Self {
        Self { real, delta }
    }

    pub fn real(real: Rational) -> Self {
        Self {
            real,
            delta: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `value + δ`
    pub fn above(value: Rational) -> Self {
        Self::new(value, Rational::one())
    }

    /// `value - δ`
    pub fn below(value: Rational) -> Self {
        Self::new(value, -Rational::one())
    }

    /// Substitutes a concrete positive value for `δ`.
    pub fn at(&self, delta: &Rational) -> Rational {
        &self.real + &self.delta * delta
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        // most values carry no δ part; skip the bignum work for it
        let delta = if self.delta.is_zero() {
            Rational::zero()
        } else {
            &self.delta * factor
        };
        Self {
            real: &self.real * factor,
            delta,
        }
    }
}

impl Ord for DeltaRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.real.cmp(&other.real).then_with(|| self.delta.cmp(&other.delta))
    }
}

impl PartialOrd for DeltaRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &DeltaRational {
    type Output = DeltaRational;

    fn add(self, rhs: &DeltaRational) -> DeltaRational {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for DeltaRational {
    type Output = DeltaRational;

    fn add(self, rhs: DeltaRational) -> DeltaRational {
        &self + &rhs
    }
}

impl AddAssign<&DeltaRational> for DeltaRational {
    fn add_assign(&mut self, rhs: &DeltaRational) {
        if !rhs.real.is_zero() {
            self.real += &rhs.real;
        }
        if !rhs.delta.is_zero() {
            self.delta += &rhs.delta;
        }
    }
}

impl Sub for &DeltaRational {
    type Output = DeltaRational;

    fn sub(self, rhs: &DeltaRational) -> DeltaRational {
        let delta = if rhs.delta.is_zero() {
            self.delta.clone()
        } else {
            &self.delta - &rhs.delta
        };
        DeltaRational {
            real: &self.real - &rhs.real,
            delta,
        }
    }
}

impl Sub for DeltaRational {
    type Output = DeltaRational;

    fn sub(self, rhs: DeltaRational) -> DeltaRational {
        &self - &rhs
    }
}

impl Neg for DeltaRational {
    type Output = DeltaRational;

    fn neg(self) -> DeltaRational {
        DeltaRational {
            real: -self.real,
            delta: -self.delta,
        }
    }
}

impl Mul<&Rational> for &DeltaRational {
    type Output = DeltaRational;

    fn mul(self, rhs: &Rational) -> DeltaRational {
        self.scale(rhs)
    }
}

impl fmt::Debug for DeltaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for DeltaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.delta.is_zero() {
            write!(f, "{}", self.real)
        } else {
            write!(f, "({}, {}δ)", self.real, self.delta)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn dr(r: i64, d: i64) -> DeltaRational {
        DeltaRational::new(int(r), int(d))
    }

    #[test]
    fn lexicographic_order() {
        assert!(dr(0, 5) < dr(1, -5));
        assert!(dr(1, -1) < dr(1, 0));
        assert!(DeltaRational::below(int(1)) < DeltaRational::real(int(1)));
        assert!(DeltaRational::above(int(1)) > DeltaRational::real(int(1)));
    }

    #[test]
    fn substitution() {
        assert_eq!(dr(1, -1).at(&ratio(1, 4)), ratio(3, 4));
    }

    fn arb() -> impl Strategy<Value = DeltaRational> {
        (-20i64..20, 1i64..5, -20i64..20, 1i64..5).prop_map(|(a, b, c, d)| DeltaRational::new(ratio(a, b), ratio(c, d)))
    }

    proptest! {
        #[test]
        fn arithmetic_is_componentwise(a in arb(), b in arb(), c in arb(), k in -6i64..6) {
            let k = int(k);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a + &b) * &k, &(&a * &k) + &(&b * &k));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
        }

        #[test]
        fn order_matches_small_delta(a in arb(), b in arb()) {
            // For a small enough concrete δ the lexicographic order is the real order.
            let eps = ratio(1, 1_000_000);
            if a < b {
                prop_assert!(a.at(&eps) < b.at(&eps));
            }
        }
    }
}
