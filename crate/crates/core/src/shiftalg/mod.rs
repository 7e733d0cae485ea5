//! Difference operators `sum_k c_k(x) T^k` with polynomial coefficients,
//! where `(T^k f)(x) = f(x + k)`.
//!
//! Operators stay symbolic for every identity check; [`GridMatrix`] is only
//! the finite realization on `{0, ..., N}`.

mod fit;
mod grid;

pub use fit::{fit_relations, FitError, FittedConstants, Relation};
pub use grid::GridMatrix;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::exactnum::{int, Rational};
use crate::polyops::{Poly, PolyError, RatFunc};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShiftError {
    #[error("coefficient of T^{shift} does not vanish at grid point x = {point}; the operator leaves the grid 0..={n}")]
    BoundaryViolation { shift: i64, point: i64, n: usize },
    #[error("malformed operator JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Difference operator; only nonzero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ShiftOp {
    terms: BTreeMap<i64, Poly>,
}

impl ShiftOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::multiplication(Poly::one())
    }

    /// `p(x) I`
    pub fn multiplication(p: Poly) -> Self {
        Self::from_terms([(0, p)])
    }

    /// Multiplication by `x`.
    pub fn x() -> Self {
        Self::multiplication(Poly::x())
    }

    /// `T^k`
    pub fn shift(k: i64) -> Self {
        Self::from_terms([(k, Poly::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Poly)>) -> Self {
        let mut out = Self::zero();
        for (k, p) in terms {
            out.add_term(k, &p);
        }
        out
    }

    fn add_term(&mut self, k: i64, p: &Poly) {
        if p.is_zero() {
            return;
        }
        let sum = match self.terms.get(&k) {
            Some(q) => q + p,
            None => p.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, sum);
        }
    }

    pub fn terms(&self) -> &BTreeMap<i64, Poly> {
        &self.terms
    }

    /// Coefficient of `T^k` (zero when absent).
    pub fn coeff(&self, k: i64) -> Poly {
        self.terms.get(&k).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient degree, `None` for the zero operator.
    pub fn max_coeff_degree(&self) -> Option<usize> {
        self.terms.values().filter_map(Poly::degree).max()
    }

    pub fn scale(&self, c: &Rational) -> ShiftOp {
        ShiftOp::from_terms(self.terms.iter().map(|(&k, p)| (k, p.scale(c))))
    }

    /// `sum_k c_k(x) p(x + k)`
    pub fn apply_poly(&self, p: &Poly) -> Poly {
        self.terms
            .iter()
            .fold(Poly::zero(), |acc, (&k, c)| &acc + &(c * &p.shift(&int(k))))
    }

    /// `sum_k c_k(x) f(x + k)`, over a common denominator and reduced.
    pub fn apply_ratfunc(&self, f: &RatFunc) -> RatFunc {
        self.terms.iter().fold(RatFunc::from_poly(Poly::zero()), |acc, (&k, c)| {
            acc.add(&f.shift(&int(k)).scale_poly(c))
        })
    }

    /// Operator product `self ∘ other`:
    /// `(a(x) T^j)(b(x) T^k) = a(x) b(x + j) T^{j+k}`.
    pub fn compose(&self, other: &ShiftOp) -> ShiftOp {
        let mut out = ShiftOp::zero();
        for (&j, a) in &self.terms {
            let jq = int(j);
            for (&k, b) in &other.terms {
                out.add_term(j + k, &(a * &b.shift(&jq)));
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> ShiftOp {
        (0..n).fold(ShiftOp::identity(), |acc, _| acc.compose(self))
    }

    pub fn commutator(&self, other: &ShiftOp) -> ShiftOp {
        &self.compose(other) - &other.compose(self)
    }

    pub fn anticommutator(&self, other: &ShiftOp) -> ShiftOp {
        &self.compose(other) + &other.compose(self)
    }

    /// Checks that the operator maps functions on `{0..=n}` to functions on
    /// `{0..=n}`: the coefficient of `T^k` must vanish wherever `x + k`
    /// leaves the grid.
    pub fn check_boundary(&self, n: usize) -> Result<(), ShiftError> {
        let top = n as i64;
        for (&k, c) in &self.terms {
            let outside: Box<dyn Iterator<Item = i64>> = if k < 0 {
                Box::new(0..(-k).min(top + 1))
            } else if k > 0 {
                Box::new((top - k + 1).max(0)..=top)
            } else {
                Box::new(std::iter::empty())
            };
            for point in outside {
                if !c.eval(&int(point)).is_zero() {
                    return Err(ShiftError::BoundaryViolation { shift: k, point, n });
                }
            }
        }
        Ok(())
    }

    /// Matrix realization on the grid; entry `(i, j)` is the coefficient of
    /// `f(j)` in `(W f)(i)`.
    pub fn to_grid_matrix(&self, n: usize) -> Result<GridMatrix, ShiftError> {
        self.check_boundary(n)?;
        let mut entries = vec![vec![Rational::zero(); n + 1]; n + 1];
        for (&k, c) in &self.terms {
            for (i, row) in entries.iter_mut().enumerate() {
                let j = i as i64 + k;
                if (0..=n as i64).contains(&j) {
                    row[j as usize] += c.eval(&int(i as i64));
                }
            }
        }
        Ok(GridMatrix::new(n, entries))
    }

    /// `{"k": ["c0", "c1", ...], ...}` with signed integer keys.
    pub fn to_json(&self) -> Value {
        let map: Map<String, Value> = self
            .terms
            .iter()
            .map(|(k, p)| {
                let coeffs = p.to_strings().into_iter().map(Value::String).collect();
                (k.to_string(), Value::Array(coeffs))
            })
            .collect();
        Value::Object(map)
    }

    pub fn from_json(v: &Value) -> Result<ShiftOp, ShiftError> {
        let obj = v
            .as_object()
            .ok_or_else(|| ShiftError::Json("expected an object".into()))?;
        let mut out = ShiftOp::zero();
        for (key, coeffs) in obj {
            let k: i64 = key
                .parse()
                .map_err(|_| ShiftError::Json(format!("shift key {key:?} is not an integer")))?;
            let arr = coeffs
                .as_array()
                .ok_or_else(|| ShiftError::Json(format!("coefficients of {key} must be an array")))?;
            let strs = arr
                .iter()
                .map(|c| {
                    c.as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| ShiftError::Json("coefficients must be rational strings".into()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.add_term(k, &Poly::from_strings(&strs)?);
        }
        Ok(out)
    }
}

impl fmt::Debug for ShiftOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShiftOp({self})")
    }
}

impl fmt::Display for ShiftOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(&k, p)| match k {
                0 => format!("({p})"),
                1 => format!("({p}) T+"),
                -1 => format!("({p}) T-"),
                _ => format!("({p}) T^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &ShiftOp {
    type Output = ShiftOp;
    fn add(self, rhs: &ShiftOp) -> ShiftOp {
        let mut out = self.clone();
        for (&k, p) in &rhs.terms {
            out.add_term(k, p);
        }
        out
    }
}

impl Sub for &ShiftOp {
    type Output = ShiftOp;
    fn sub(self, rhs: &ShiftOp) -> ShiftOp {
        let mut out = self.clone();
        for (&k, p) in &rhs.terms {
            out.add_term(k, &-p);
        }
        out
    }
}

impl Mul for &ShiftOp {
    type Output = ShiftOp;
    fn mul(self, rhs: &ShiftOp) -> ShiftOp {
        self.compose(rhs)
    }
}

impl Neg for &ShiftOp {
    type Output = ShiftOp;
    fn neg(self) -> ShiftOp {
        self.scale(&-Rational::one())
    }
}
