//! Univariate polynomials over [`Rational`], rational functions, and
//! differential operators with polynomial coefficients.

mod diffop;
mod ratfunc;

pub use diffop::{ordinary_heun_degree_check, DegreeCheck, DiffOp};
pub use ratfunc::RatFunc;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactnum::{
    as_nonpositive_integer, format_rational, int, parse_rational, ExactError, ParseRationalError, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("basis element {index} is not monic of degree {index}")]
    BadBasis { index: usize },
    #[error("polynomial of degree {degree} does not fit a basis of {len} elements")]
    DegreeTooLarge { degree: usize, len: usize },
    #[error(transparent)]
    Parse(#[from] ParseRationalError),
}

/// Dense polynomial; `coeffs[k]` multiplies `x^k`. No trailing zeros, so the
/// zero polynomial has no coefficients at all.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `x - r`
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r.clone(), Rational::one()])
    }

    /// `a x + b`
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::new(vec![b, a])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_coeff(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// `p(x + c)`, by Horner's scheme in the shifted variable.
    pub fn shift(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        let step = Poly::linear(Rational::one(), c.clone());
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, a| &(&acc * &step) + &Poly::constant(a.clone()))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * int(k as i64))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Euclidean division `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly), PolyError> {
        let dd = d.degree().ok_or(PolyError::DivisionByZero)?;
        let lead = d.leading_coeff();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let factor = r.last().unwrap() / &lead;
            for (i, c) in d.coeffs.iter().enumerate() {
                r[k + i] -= &factor * c;
            }
            q[k] = factor;
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Ok((Poly::new(q), Poly::new(r)))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&(Rational::one() / self.leading_coeff()))
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self (self+1) ... (self+n-1)`.
    pub fn rising(&self, n: usize) -> Poly {
        (0..n).fold(Poly::one(), |acc, k| {
            &acc * &(self + &Poly::constant(int(k as i64)))
        })
    }

    pub fn pow(&self, n: usize) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Coefficient strings, lowest degree first.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }

    pub fn from_strings<S: AsRef<str>>(coeffs: &[S]) -> Result<Self, PolyError> {
        let parsed = coeffs
            .iter()
            .map(|s| parse_rational(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(parsed))
    }
}

/// Terminating `3F2(a, b, -x; d, e; 1)` as a polynomial in `x`.
///
/// Termination follows [`hyp3f2_terminating`]: through whichever of `a`, `b`
/// is a nonpositive integer `-n` with `n <= upper`. The `k`-th term carries
/// the factor `(-x)_k`.
///
/// [`hyp3f2_terminating`]: crate::exactnum::hyp3f2_terminating
pub fn hyp3f2_in_x(num: &[Rational; 2], den: &[Rational; 2], upper: usize) -> Result<Poly, ExactError> {
    let last = num
        .iter()
        .filter_map(as_nonpositive_integer)
        .filter(|&n| n <= upper)
        .min()
        .ok_or(ExactError::NotTerminating { upper })?;
    let minus_x = -&Poly::x();
    let mut scalar = Rational::one();
    let mut falling = Poly::one();
    let mut sum = Poly::one();
    for k in 0..last {
        let kq = int(k as i64);
        let mut denom = int(k as i64 + 1);
        for d in den {
            let dk = d + &kq;
            if dk.is_zero() {
                return Err(ExactError::VanishingDenominator {
                    param: format_rational(d),
                    k: k + 1,
                });
            }
            denom *= dk;
        }
        scalar = scalar * (&num[0] + &kq) * (&num[1] + &kq) / denom;
        falling = &falling * &(&minus_x + &Poly::constant(kq));
        sum = &sum + &falling.scale(&scalar);
    }
    Ok(sum)
}

/// Coordinates of `p` in a basis whose `k`-th element is monic of degree `k`.
///
/// The change of basis is unitriangular, so this is plain back substitution
/// from the top degree down.
pub fn expand_in_basis(p: &Poly, basis: &[Poly]) -> Result<Vec<Rational>, PolyError> {
    for (k, b) in basis.iter().enumerate() {
        if b.degree() != Some(k) || !b.is_monic() {
            return Err(PolyError::BadBasis { index: k });
        }
    }
    let Some(d) = p.degree() else {
        return Ok(vec![Rational::zero(); basis.len()]);
    };
    if d >= basis.len() {
        return Err(PolyError::DegreeTooLarge {
            degree: d,
            len: basis.len(),
        });
    }
    let mut rest = p.clone();
    let mut out = vec![Rational::zero(); basis.len()];
    for k in (0..=d).rev() {
        let c = rest.coeff(k);
        if !c.is_zero() {
            rest = &rest - &basis[k].scale(&c);
            out[k] = c;
        }
    }
    debug_assert!(rest.is_zero());
    Ok(out)
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
                if k > 0 {
                    write!(f, "*")?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
