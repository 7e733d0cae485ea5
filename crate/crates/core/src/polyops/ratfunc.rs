use std::fmt;

use num_traits::Zero;

use super::{Poly, PolyError};
use crate::exactnum::Rational;

/// Reduced quotient `num / den` with a monic denominator coprime to the
/// numerator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::from_poly(Poly::zero()));
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g)?;
        let (den, _) = den.div_rem(&g)?;
        let lead = den.leading_coeff();
        let inv = Rational::from_integer(1.into()) / lead;
        Ok(RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `f(x + c)`.
    pub fn shift(&self, c: &Rational) -> Self {
        // shifting preserves coprimality and the monic leading coefficient
        RatFunc {
            num: self.num.shift(c),
            den: self.den.shift(c),
        }
    }

    pub fn scale_poly(&self, p: &Poly) -> Self {
        Self::new(p * &self.num, self.den.clone()).expect("nonzero denominator")
    }

    pub fn add(&self, other: &RatFunc) -> Self {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        Self::new(num, &self.den * &other.den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &RatFunc) -> Self {
        let num = &(&self.num * &other.den) - &(&other.num * &self.den);
        Self::new(num, &self.den * &other.den).expect("nonzero denominator")
    }

    /// Value at `x`, or `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::polyops::tests::small_poly;
    use proptest::prelude::*;

    #[test]
    fn reduces_common_factors() {
        // (x^2 - 1) / (2x + 2) = (x - 1)/2 -> den monic: (1/2 x - 1/2) / 1
        let f = RatFunc::new(Poly::from_ints(&[-1, 0, 1]), Poly::from_ints(&[2, 2])).unwrap();
        assert_eq!(f.den(), &Poly::one());
        assert_eq!(f.num(), &Poly::new(vec![rat(-1, 2), rat(1, 2)]));
        assert!(RatFunc::new(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn shift_of_simple_pole() {
        let alpha = rat(1, 2);
        // 1/(alpha - x) shifted by -1 is 1/(alpha - x + 1)
        let f = RatFunc::new(Poly::one(), Poly::linear(int(-1), alpha.clone())).unwrap();
        let g = RatFunc::new(Poly::one(), Poly::linear(int(-1), &alpha + int(1))).unwrap();
        assert_eq!(f.shift(&int(-1)), g);
        assert_eq!(f.eval(&alpha), None);
    }

    proptest! {
        #[test]
        fn normalization_preserves_value(n in small_poly(4), d in small_poly(3)) {
            prop_assume!(!d.is_zero());
            let f = RatFunc::new(n.clone(), d.clone()).unwrap();
            prop_assert!(f.den().is_monic());
            prop_assert_eq!(&n * f.den(), f.num() * &d);
            prop_assert_eq!(f.num().gcd(f.den()).degree().unwrap_or(0), 0);
        }

        #[test]
        fn add_sub_inverse(a in small_poly(3), b in small_poly(2), c in small_poly(3), d in small_poly(2)) {
            prop_assume!(!b.is_zero() && !d.is_zero());
            let f = RatFunc::new(a, b).unwrap();
            let g = RatFunc::new(c, d).unwrap();
            prop_assert_eq!(f.add(&g).sub(&g), f);
        }
    }
}
