use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::Serialize;

use super::Poly;
use crate::exactnum::{int, Rational};

/// `sum_k p_k(x) d^k/dx^k` with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DiffOp {
    terms: BTreeMap<usize, Poly>,
}

impl DiffOp {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::multiplication(Poly::one())
    }

    pub fn multiplication(p: Poly) -> Self {
        Self::from_terms([(0, p)])
    }

    /// `d/dx`
    pub fn derivative() -> Self {
        Self::from_terms([(1, Poly::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Poly)>) -> Self {
        let mut out = Self::zero();
        for (k, p) in terms {
            out.add_term(k, &p);
        }
        out
    }

    fn add_term(&mut self, k: usize, p: &Poly) {
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

    pub fn terms(&self) -> &BTreeMap<usize, Poly> {
        &self.terms
    }

    pub fn coeff(&self, k: usize) -> Poly {
        self.terms.get(&k).cloned().unwrap_or_else(Poly::zero)
    }

    /// Highest derivative order present; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        let mut acc = Poly::zero();
        let mut deriv = p.clone();
        let mut current = 0;
        for (&k, c) in &self.terms {
            while current < k {
                deriv = deriv.derivative();
                current += 1;
            }
            acc = &acc + &(c * &deriv);
        }
        acc
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (&k, p) in &other.terms {
            out.add_term(k, p);
        }
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> DiffOp {
        DiffOp::from_terms(self.terms.iter().map(|(&k, p)| (k, p.scale(c))))
    }

    /// Operator product `self ∘ other`.
    ///
    /// The product is recovered from its action on `1, x, ..., x^m` where
    /// `m = order(self) + order(other)`: writing `E = sum_k c_k d^k`,
    /// `E x^j = sum_{k<=j} c_k j!/(j-k)! x^{j-k}`, which is triangular in the
    /// `c_k`. The result is then checked on three further monomials.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let (Some(a), Some(b)) = (self.order(), other.order()) else {
            return DiffOp::zero();
        };
        let m = a + b;
        let image = |j: usize| self.apply(&other.apply(&Poly::monomial(Rational::one(), j)));
        let mut coeffs: Vec<Poly> = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let mut rest = image(j);
            // falling factorial j!/(j-k)!
            let mut falling = Rational::one();
            for (k, c) in coeffs.iter().enumerate() {
                let mono = Poly::monomial(falling.clone(), j - k);
                rest = &rest - &(c * &mono);
                falling *= int((j - k) as i64);
            }
            // falling is now j!
            coeffs.push(rest.scale(&(Rational::one() / falling)));
        }
        let out = DiffOp::from_terms(coeffs.into_iter().enumerate());
        for j in m + 1..=m + 3 {
            let x_j = Poly::monomial(Rational::one(), j);
            assert_eq!(out.apply(&x_j), image(j), "composition must reproduce the action on x^{j}");
        }
        out
    }

    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        self.compose(other).sub(&other.compose(self))
    }
}

impl fmt::Display for DiffOp {
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
                1 => format!("({p}) D"),
                _ => format!("({p}) D^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Outcome of checking `deg(D x^n) <= n + 1` for `n = 0..=n_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeCheck {
    pub passed: bool,
    /// The bound holds but `n + 1` is never reached.
    pub degenerate: bool,
    /// `(n, observed degree)` for every violation.
    pub failures: Vec<(usize, usize)>,
    /// Observed degree of `D x^n`; `None` when the image is zero.
    pub degrees: Vec<Option<usize>>,
}

/// Checks that `D` sends degree-`n` polynomials to degree at most `n + 1`.
pub fn ordinary_heun_degree_check(d: &DiffOp, n_max: usize) -> DegreeCheck {
    let degrees: Vec<Option<usize>> = (0..=n_max)
        .map(|n| d.apply(&Poly::monomial(Rational::one(), n)).degree())
        .collect();
    let failures: Vec<(usize, usize)> = degrees
        .iter()
        .enumerate()
        .filter_map(|(n, deg)| deg.filter(|&g| g > n + 1).map(|g| (n, g)))
        .collect();
    let attains = degrees
        .iter()
        .enumerate()
        .any(|(n, deg)| *deg == Some(n + 1));
    DegreeCheck {
        passed: failures.is_empty(),
        degenerate: failures.is_empty() && !attains,
        failures,
        degrees,
    }
}
