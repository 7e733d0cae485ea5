//! A generalized eigenvalue problem `L1 U = lambda L2 U` for two Heun–Hahn
//! operators, solved by rational functions built from R-II polynomials:
//!
//! ```text
//! P_n(x) = (alpha)_n (-N)_n / (beta+1)_n 3F2(-n, -x, -beta-n; -N, 1-alpha-n; 1)
//! U_n(x) = (-1)^n P_n(x) / (alpha - x)_n
//! lambda_n = n (N - beta - n)
//! ```
//!
//! The parameters `alpha`, `beta` here are unrelated to those of the Hahn
//! polynomials.

use num_traits::Zero;
use thiserror::Error;

use crate::exactnum::{format_rational, int, pochhammer, ExactError, Rational};
use crate::heunhahn::{heun_params_from_op, HeunError, HeunParams};
use crate::polyops::{hyp3f2_in_x, Poly, PolyError, RatFunc};
use crate::shiftalg::{ShiftError, ShiftOp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GevpError {
    #[error("grid size N must be at least 1")]
    EmptyGrid,
    #[error("(beta+1)_{k} vanishes")]
    VanishingBeta { k: usize },
    #[error("alpha = {alpha} puts a pole of some U_n on the grid point x = {point}")]
    PoleOnGrid { alpha: String, point: usize },
    #[error("index {n} is outside 0..={max}")]
    IndexOutOfRange { n: usize, max: usize },
    #[error("U_{n} is not normalized to 1 at infinity: {detail}")]
    NotMonic { n: usize, detail: String },
    #[error("denominator of U_{n} is {den}, not (x - alpha)...(x - alpha - {last})", last = n.saturating_sub(1))]
    PoleMismatch { n: usize, den: Poly },
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Template(#[from] HeunError),
}

/// Validated `(alpha, beta, N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RIIParams {
    alpha: Rational,
    beta: Rational,
    n: usize,
}

impl RIIParams {
    /// Requires `(beta+1)_n != 0` and `(alpha - x)_n != 0` for every grid
    /// point `x` and every `n <= N`, i.e. `alpha` is not an integer in
    /// `-(N-1)..=N`.
    pub fn new(alpha: Rational, beta: Rational, n: usize) -> Result<Self, GevpError> {
        if n == 0 {
            return Err(GevpError::EmptyGrid);
        }
        if let Some(k) = (0..n).find(|&j| (&beta + int(j as i64 + 1)).is_zero()) {
            return Err(GevpError::VanishingBeta { k: k + 1 });
        }
        if alpha.is_integer() {
            let a = alpha.to_integer();
            let lo = num_bigint::BigInt::from(-(n as i64 - 1));
            let hi = num_bigint::BigInt::from(n as i64);
            if a >= lo && a <= hi {
                // alpha - x + j = 0 at x = max(alpha, 0), j = x - alpha
                let point = if a < num_bigint::BigInt::zero() {
                    0
                } else {
                    usize::try_from(&a).unwrap_or(n)
                };
                return Err(GevpError::PoleOnGrid {
                    alpha: format_rational(&alpha),
                    point,
                });
            }
        }
        Ok(RIIParams { alpha, beta, n })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    fn big_n(&self) -> Rational {
        int(self.n as i64)
    }

    fn check_index(&self, n: usize) -> Result<(), GevpError> {
        if n > self.n {
            return Err(GevpError::IndexOutOfRange { n, max: self.n });
        }
        Ok(())
    }
}

pub fn rii_poly(p: &RIIParams, n: usize) -> Result<Poly, GevpError> {
    p.check_index(n)?;
    let nq = int(n as i64);
    let prefactor = pochhammer(&p.alpha, n) * pochhammer(&-p.big_n(), n) / pochhammer(&(&p.beta + int(1)), n);
    let series = hyp3f2_in_x(
        &[-nq.clone(), -(&p.beta + &nq)],
        &[-p.big_n(), int(1) - &p.alpha - &nq],
        n,
    )?;
    Ok(series.scale(&prefactor))
}

/// `(alpha - x)_n` as a polynomial in `x`.
fn pole_factor(p: &RIIParams, n: usize) -> Poly {
    Poly::linear(int(-1), p.alpha.clone()).rising(n)
}

/// `lambda_n = n (N - beta - n)`.
pub fn lambda(p: &RIIParams, n: usize) -> Rational {
    let nq = int(n as i64);
    &nq * (p.big_n() - &p.beta - &nq)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PencilSolution {
    pub n: usize,
    pub p: Poly,
    pub u: RatFunc,
    pub lambda: Rational,
    /// Poles of the reduced `U_n`, a subset of `alpha, ..., alpha + n - 1`.
    pub poles: Vec<Rational>,
}

impl PencilSolution {
    /// No zero of `P_n` cancels a factor of `(alpha - x)_n`.
    pub fn poles_exact(&self) -> bool {
        self.poles.len() == self.n
    }
}

/// `U_n = (-1)^n P_n / (alpha - x)_n`, checked to be of type `[n/n]` and
/// equal to `1 + O(1/x)`. The poles are read from the reduced denominator;
/// for special `beta` a zero of `P_n` can cancel some of them.
pub fn build_u(p: &RIIParams, n: usize) -> Result<PencilSolution, GevpError> {
    let poly = rii_poly(p, n)?;
    let den = pole_factor(p, n);
    if poly.degree() != Some(n) {
        return Err(GevpError::NotMonic {
            n,
            detail: format!("numerator has degree {:?}", poly.degree()),
        });
    }
    let sign = if n.is_multiple_of(2) { int(1) } else { int(-1) };
    let numer = poly.scale(&sign);
    if numer.leading_coeff() != den.leading_coeff() {
        return Err(GevpError::NotMonic {
            n,
            detail: format!("leading coefficients {} and {}", numer.leading_coeff(), den.leading_coeff()),
        });
    }
    let u = RatFunc::new(numer, den)?;
    let poles: Vec<Rational> = (0..n)
        .map(|j| &p.alpha + int(j as i64))
        .filter(|r| u.den().eval(r).is_zero())
        .collect();
    let from_poles = poles.iter().fold(Poly::one(), |acc, r| &acc * &Poly::linear_root(r));
    if *u.den() != from_poles {
        return Err(GevpError::PoleMismatch {
            n,
            den: u.den().clone(),
        });
    }
    Ok(PencilSolution {
        n,
        p: poly,
        u,
        lambda: lambda(p, n),
        poles,
    })
}

/// ```text
/// L1 = (x - alpha + 1)(x - alpha)(x - N) T+ + x (x - alpha)(x + beta - alpha - N) T-
///      + (x - alpha)(-2x^2 + (2 alpha - 1 + 2N - beta) x - N (alpha - 1))
/// ```
pub fn build_l1(p: &RIIParams) -> ShiftOp {
    let (al, be, n) = (&p.alpha, &p.beta, p.big_n());
    let xa = Poly::linear_root(al);
    let up = &(&Poly::linear_root(&(al - int(1))) * &xa) * &Poly::linear_root(&n);
    let down = &(&Poly::x() * &xa) * &Poly::linear_root(&(al + &n - be));
    let diag = &xa
        * &Poly::new(vec![
            -(&n * (al - int(1))),
            int(2) * al - int(1) + int(2) * &n - be,
            int(-2),
        ]);
    ShiftOp::from_terms([(1, up), (-1, down), (0, diag)])
}

/// `L2 = (x - alpha) - x T-`.
pub fn build_l2(p: &RIIParams) -> ShiftOp {
    ShiftOp::from_terms([(0, Poly::linear_root(&p.alpha)), (-1, -&Poly::x())])
}

/// Seven-parameter forms of `L1` and `L2`, read from the operators.
pub fn template_params(p: &RIIParams) -> Result<(HeunParams, HeunParams), GevpError> {
    Ok((
        heun_params_from_op(&build_l1(p), p.n)?,
        heun_params_from_op(&build_l2(p), p.n)?,
    ))
}

/// `L1 - lambda L2`.
pub fn pencil(p: &RIIParams, lambda: &Rational) -> ShiftOp {
    &build_l1(p) - &build_l2(p).scale(lambda)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GevpCheck {
    pub n: usize,
    pub lambda: Rational,
    pub poles: Vec<Rational>,
    /// `(L1 - lambda_n L2) U_n` as a reduced rational function.
    pub residual: RatFunc,
    /// The same operator on the grid applied to the samples of `U_n`.
    pub grid_residual: Vec<Rational>,
}

impl GevpCheck {
    pub fn passed(&self) -> bool {
        self.residual.is_zero() && self.grid_residual.iter().all(Zero::is_zero)
    }
}

pub fn verify_gevp(p: &RIIParams, n: usize) -> Result<GevpCheck, GevpError> {
    let sol = build_u(p, n)?;
    verify_solution(p, &sol, &sol.lambda)
}

/// Applies the pencil at `lambda` to a candidate solution, symbolically and
/// on the grid.
pub fn verify_solution(p: &RIIParams, sol: &PencilSolution, lambda: &Rational) -> Result<GevpCheck, GevpError> {
    let op = pencil(p, lambda);
    let residual = op.apply_ratfunc(&sol.u);
    let samples = (0..=p.n)
        .map(|x| {
            sol.u
                .eval(&int(x as i64))
                .ok_or(GevpError::PoleOnGrid {
                    alpha: format_rational(&p.alpha),
                    point: x,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let grid_residual = op.to_grid_matrix(p.n)?.apply(&samples);
    Ok(GevpCheck {
        n: sol.n,
        lambda: lambda.clone(),
        poles: sol.poles.clone(),
        residual,
        grid_residual,
    })
}
