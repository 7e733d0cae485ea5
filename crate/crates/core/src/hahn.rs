//! Monic Hahn polynomials on `{0..=N}` and the bispectral pair
//!
//! ```text
//! X = x,   Y = B(x) T+ + D(x) T- - (B(x) + D(x))
//! B(x) = (x - N)(x + alpha + 1),   D(x) = x (x - beta - N - 1)
//! ```
//!
//! with `Y P_n = n (n + alpha + beta + 1) P_n` and `X` acting by the monic
//! three-term recurrence. The bilinear combination
//! `tau1 XY + tau2 YX + tau3 X + tau4 Y + tau0` is a Heun–Hahn operator and
//! acts tridiagonally on `P_n`.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{int, pochhammer, serialize_rationals, ExactError, Rational};
use crate::heunhahn::{build_heun_hahn, HeunParams};
use crate::polyops::{expand_in_basis, hyp3f2_in_x, Poly, PolyError};
use crate::shiftalg::{fit_relations, FitError, FittedConstants, Relation, ShiftOp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HahnError {
    #[error("grid size N must be at least 1")]
    EmptyGrid,
    #[error("{symbol} vanishes, so the monic Hahn polynomials are undefined")]
    VanishingPochhammer { symbol: String },
    #[error("index {n} is outside 0..={max}")]
    IndexOutOfRange { n: usize, max: usize },
    #[error("three-term recurrence at n = {n} leaves residual {residual}")]
    RecurrenceResidual { n: usize, residual: Poly },
    #[error("W P_{n} has a nonzero component along P_{k}, outside the three central bands")]
    BandViolation { n: usize, k: usize },
    #[error("{which} at n = {n}: observed {observed}, closed form {predicted}")]
    ClosedFormMismatch {
        which: &'static str,
        n: usize,
        observed: Rational,
        predicted: Rational,
    },
    #[error("{part} of the composed operator is {composed}, explicit form is {explicit}")]
    BilinearMismatch {
        part: &'static str,
        composed: Poly,
        explicit: Poly,
    },
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Validated `(alpha, beta, N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HahnParams {
    alpha: Rational,
    beta: Rational,
    n: usize,
}

impl HahnParams {
    /// Rejects parameters for which `(alpha+1)_k` or `(n+alpha+beta+1)_n`
    /// vanishes for some index up to `N`.
    pub fn new(alpha: Rational, beta: Rational, n: usize) -> Result<Self, HahnError> {
        if n == 0 {
            return Err(HahnError::EmptyGrid);
        }
        for j in 0..n as i64 {
            if (&alpha + int(1 + j)).is_zero() {
                return Err(HahnError::VanishingPochhammer {
                    symbol: format!("(alpha+1)_{}", j + 1),
                });
            }
        }
        // (n+alpha+beta+1)_n has factors alpha+beta+1+m, m = n..2n-1
        for m in 1..2 * n as i64 {
            if (&alpha + &beta + int(1 + m)).is_zero() {
                let idx = (m + 2) / 2;
                return Err(HahnError::VanishingPochhammer {
                    symbol: format!("({idx}+alpha+beta+1)_{idx}"),
                });
            }
        }
        Ok(HahnParams { alpha, beta, n })
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

    fn check_index(&self, n: usize) -> Result<(), HahnError> {
        if n > self.n {
            return Err(HahnError::IndexOutOfRange { n, max: self.n });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Taus {
    pub tau0: Rational,
    pub tau1: Rational,
    pub tau2: Rational,
    pub tau3: Rational,
    pub tau4: Rational,
}

impl Taus {
    pub fn new(tau0: Rational, tau1: Rational, tau2: Rational, tau3: Rational, tau4: Rational) -> Self {
        Taus {
            tau0,
            tau1,
            tau2,
            tau3,
            tau4,
        }
    }

    /// `tau1 + tau2`, the coefficient of the cubic terms.
    pub fn kappa(&self) -> Rational {
        &self.tau1 + &self.tau2
    }
}

/// `P_n = k_n 3F2(-n, n+alpha+beta+1, -x; alpha+1, -N; 1)` with
/// `k_n = (alpha+1)_n (-N)_n / (n+alpha+beta+1)_n`, monic of degree `n`.
pub fn hahn_poly(h: &HahnParams, n: usize) -> Result<Poly, HahnError> {
    h.check_index(n)?;
    let shift = int(n as i64) + &h.alpha + &h.beta + int(1);
    let norm = pochhammer(&(&h.alpha + int(1)), n) * pochhammer(&(-h.big_n()), n)
        / pochhammer(&shift, n);
    let series = hyp3f2_in_x(&[int(-(n as i64)), shift], &[&h.alpha + int(1), -h.big_n()], n)?;
    let p = series.scale(&norm);
    debug_assert!(p.degree() == Some(n) && p.is_monic());
    Ok(p)
}

/// `P_0, ..., P_N`.
#[derive(Debug, Clone)]
pub struct HahnBasis {
    polys: Vec<Poly>,
}

impl HahnBasis {
    pub fn new(h: &HahnParams) -> Result<Self, HahnError> {
        let polys = (0..=h.n).map(|n| hahn_poly(h, n)).collect::<Result<_, _>>()?;
        Ok(HahnBasis { polys })
    }

    pub fn poly(&self, n: usize) -> &Poly {
        &self.polys[n]
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn expand(&self, p: &Poly) -> Result<Vec<Rational>, PolyError> {
        expand_in_basis(p, &self.polys)
    }

    /// `(b_n, u_n)` with `x P_n = P_{n+1} + b_n P_n + u_n P_{n-1}`, by
    /// coefficient matching; `u_0 = 0`.
    pub fn recurrence(&self, n: usize) -> Result<(Rational, Rational), HahnError> {
        let max = self.polys.len() - 2;
        if n > max {
            return Err(HahnError::IndexOutOfRange { n, max });
        }
        let mut rest = &(&Poly::x() * &self.polys[n]) - &self.polys[n + 1];
        let b = rest.coeff(n);
        rest = &rest - &self.polys[n].scale(&b);
        let u = if n == 0 { Rational::zero() } else { rest.coeff(n - 1) };
        if n > 0 {
            rest = &rest - &self.polys[n - 1].scale(&u);
        }
        if !rest.is_zero() {
            return Err(HahnError::RecurrenceResidual { n, residual: rest });
        }
        Ok((b, u))
    }
}

pub fn hahn_recurrence(h: &HahnParams, n: usize) -> Result<(Rational, Rational), HahnError> {
    HahnBasis::new(h)?.recurrence(n)
}

pub fn build_x() -> ShiftOp {
    ShiftOp::x()
}

pub fn build_y(h: &HahnParams) -> ShiftOp {
    let b = &Poly::linear_root(&h.big_n()) * &Poly::linear_root(&-(&h.alpha + int(1)));
    let d = &Poly::x() * &Poly::linear_root(&(&h.beta + h.big_n() + int(1)));
    let c = -&(&b + &d);
    ShiftOp::from_terms([(1, b), (-1, d), (0, c)])
}

/// `lambda_n = n (n + alpha + beta + 1)`.
pub fn hahn_eigenvalue(h: &HahnParams, n: i64) -> Rational {
    int(n) * (int(n + 1) + &h.alpha + &h.beta)
}

/// `Y P_n - lambda_n P_n`.
pub fn eigen_residual(h: &HahnParams, basis: &HahnBasis, n: usize) -> Poly {
    let p = basis.poly(n);
    &build_y(h).apply_poly(p) - &p.scale(&hahn_eigenvalue(h, n as i64))
}

/// Constants of
/// `[K2,K3] = a{K1,K2} + b K2 + c1 K1 + d1`,
/// `[K3,K1] = a K1^2 + b K1 + c2 K2 + d2`
/// for `K1 = X`, `K2 = Y`, `K3 = [X,Y]`.
pub const HAHN_ALGEBRA_NAMES: [&str; 6] = ["a", "b", "c1", "c2", "d1", "d2"];

pub fn hahn_algebra_constants(h: &HahnParams) -> FittedConstants {
    let (al, be, n) = (&h.alpha, &h.beta, h.big_n());
    let s = al + be;
    FittedConstants::new(
        &HAHN_ALGEBRA_NAMES,
        vec![
            int(-2),
            int(2) * &n + be - al,
            -(&s * (&s + int(2))),
            int(-1),
            &n * (al + int(1)) * &s,
            &n * (al + int(1)),
        ],
    )
}

pub fn hahn_algebra_relations(h: &HahnParams) -> Vec<Relation> {
    let x = build_x();
    let y = build_y(h);
    let z = x.commutator(&y);
    let one = ShiftOp::identity();
    vec![
        Relation::new("[K2,K3]", y.commutator(&z))
            .term(0, x.anticommutator(&y))
            .term(1, y.clone())
            .term(2, x.clone())
            .term(4, one.clone()),
        Relation::new("[K3,K1]", z.commutator(&x))
            .term(0, &x * &x)
            .term(1, x.clone())
            .term(3, y)
            .term(5, one),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct HahnAlgebraReport {
    pub fitted: Result<FittedConstants, FitError>,
    pub expected: FittedConstants,
    /// Whether each relation holds with the expected constants substituted.
    pub relations_hold: Vec<(String, bool)>,
}

impl HahnAlgebraReport {
    pub fn passed(&self) -> bool {
        self.fitted.as_ref().is_ok_and(|f| *f == self.expected)
            && self.relations_hold.iter().all(|(_, ok)| *ok)
    }
}

pub fn verify_hahn_algebra(h: &HahnParams) -> HahnAlgebraReport {
    let relations = hahn_algebra_relations(h);
    let expected = hahn_algebra_constants(h);
    let relations_hold = relations
        .iter()
        .map(|r| (r.name.clone(), r.residual(expected.values()).is_zero()))
        .collect();
    HahnAlgebraReport {
        fitted: fit_relations(&HAHN_ALGEBRA_NAMES, &relations),
        expected,
        relations_hold,
    }
}

/// `tau1 XY + tau2 YX + tau3 X + tau4 Y + tau0`, composed.
pub fn compose_bilinear(t: &Taus, x: &ShiftOp, y: &ShiftOp) -> ShiftOp {
    let parts = [
        (x * y).scale(&t.tau1),
        (y * x).scale(&t.tau2),
        x.scale(&t.tau3),
        y.scale(&t.tau4),
        ShiftOp::identity().scale(&t.tau0),
    ];
    parts.iter().fold(ShiftOp::zero(), |acc, p| &acc + p)
}

/// Explicit coefficients `(A1, A2, A0)` of the bilinear operator:
///
/// ```text
/// A1 = (x - N)(x + alpha + 1)(kappa x + tau2 + tau4)
/// A2 = x (x - beta - N - 1)(kappa x + tau4 - tau2)
/// A0 = -A1 - A2 + ((alpha + beta + 2) tau2 + tau3) x + tau0 - N (alpha + 1) tau2
/// ```
pub fn bilinear_coefficients(t: &Taus, h: &HahnParams) -> [Poly; 3] {
    let (al, be, n) = (&h.alpha, &h.beta, h.big_n());
    let k = t.kappa();
    let a1 = &(&Poly::linear_root(&n) * &Poly::linear_root(&-(al + int(1))))
        * &Poly::linear(k.clone(), &t.tau2 + &t.tau4);
    let a2 = &(&Poly::x() * &Poly::linear_root(&(be + &n + int(1))))
        * &Poly::linear(k, &t.tau4 - &t.tau2);
    let linear = Poly::linear(
        (al + be + int(2)) * &t.tau2 + &t.tau3,
        &t.tau0 - &n * (al + int(1)) * &t.tau2,
    );
    let a0 = &(-&(&a1 + &a2)) + &linear;
    [a1, a2, a0]
}

/// Heun–Hahn parameters of the bilinear operator.
pub fn taus_to_heun(t: &Taus, h: &HahnParams) -> HeunParams {
    let (al, be, n) = (&h.alpha, &h.beta, h.big_n());
    let kappa = t.kappa();
    let up = &t.tau2 + &t.tau4;
    let down = &t.tau4 - &t.tau2;
    let ap1 = al + int(1);
    let bn1 = be + &n + int(1);
    HeunParams {
        mu1: &kappa * &ap1 + &up,
        mu0: &ap1 * &up,
        nu1: &down - &kappa * &bn1,
        nu0: -(&bn1 * &down),
        r1: (al + be + int(2)) * &t.tau2 + &t.tau3,
        r0: &t.tau0 - &n * &ap1 * &t.tau2,
        kappa,
    }
}

/// Composes the bilinear operator and checks it against both the explicit
/// coefficients and the seven-parameter form.
pub fn build_bilinear_w(t: &Taus, h: &HahnParams) -> Result<(ShiftOp, HeunParams), HahnError> {
    let w = compose_bilinear(t, &build_x(), &build_y(h));
    let [a1, a2, a0] = bilinear_coefficients(t, h);
    for (part, shift, explicit) in [("T+ coefficient", 1, a1), ("T- coefficient", -1, a2), ("identity part", 0, a0)] {
        let composed = w.coeff(shift);
        if composed != explicit {
            return Err(HahnError::BilinearMismatch {
                part,
                composed,
                explicit,
            });
        }
    }
    let params = taus_to_heun(t, h);
    let template = build_heun_hahn(&params, h.n);
    if template != w {
        return Err(HahnError::BilinearMismatch {
            part: "seven-parameter form",
            composed: w.coeff(0),
            explicit: template.coeff(0),
        });
    }
    Ok((w, params))
}

/// `xi_n = tau1 lambda_{n-1} + tau2 lambda_n + tau3`.
pub fn xi(t: &Taus, h: &HahnParams, n: i64) -> Rational {
    &t.tau1 * hahn_eigenvalue(h, n - 1) + &t.tau2 * hahn_eigenvalue(h, n) + &t.tau3
}

/// `zeta_n = tau2 lambda_{n-1} + tau1 lambda_n + tau3`.
pub fn zeta(t: &Taus, h: &HahnParams, n: i64) -> Rational {
    &t.tau2 * hahn_eigenvalue(h, n - 1) + &t.tau1 * hahn_eigenvalue(h, n) + &t.tau3
}

/// `eta_n = kappa lambda_n b_n + tau3 b_n + tau4 lambda_n + tau0`.
pub fn eta(t: &Taus, h: &HahnParams, n: i64, b_n: &Rational) -> Rational {
    let lam = hahn_eigenvalue(h, n);
    t.kappa() * &lam * b_n + &t.tau3 * b_n + &t.tau4 * &lam + &t.tau0
}

/// Bands of `W P_n = upper_n P_{n+1} + diagonal_n P_n + lower_n P_{n-1}` for
/// `n = 0..N-1`, with the recurrence data used to predict them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HahnBasisExpansion {
    #[serde(serialize_with = "serialize_rationals")]
    pub upper: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    pub diagonal: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    pub lower: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    pub b: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    pub u: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    pub lambda: Vec<Rational>,
}

/// Expands `W P_n` in the Hahn basis without comparing to closed forms.
pub fn hahn_expansion(w: &ShiftOp, h: &HahnParams, basis: &HahnBasis) -> Result<HahnBasisExpansion, HahnError> {
    let mut out = HahnBasisExpansion {
        upper: Vec::new(),
        diagonal: Vec::new(),
        lower: Vec::new(),
        b: Vec::new(),
        u: Vec::new(),
        lambda: Vec::new(),
    };
    for n in 0..h.n {
        let c = basis.expand(&w.apply_poly(basis.poly(n)))?;
        if let Some(k) = (0..c.len()).find(|&k| (k + 1 < n || k > n + 1) && !c[k].is_zero()) {
            return Err(HahnError::BandViolation { n, k });
        }
        let (b, u) = basis.recurrence(n)?;
        out.upper.push(c[n + 1].clone());
        out.diagonal.push(c[n].clone());
        out.lower.push(if n > 0 { c[n - 1].clone() } else { Rational::zero() });
        out.b.push(b);
        out.u.push(u);
        out.lambda.push(hahn_eigenvalue(h, n as i64));
    }
    Ok(out)
}

/// Expansion of `W P_n`, checked against
/// `xi_{n+1} P_{n+1} + eta_n P_n + zeta_n u_n P_{n-1}`.
pub fn hahn_tridiag(w: &ShiftOp, h: &HahnParams, t: &Taus) -> Result<HahnBasisExpansion, HahnError> {
    let basis = HahnBasis::new(h)?;
    let e = hahn_expansion(w, h, &basis)?;
    for n in 0..h.n {
        let ni = n as i64;
        let checks: [(&'static str, &Rational, Rational); 3] = [
            ("xi_(n+1)", &e.upper[n], xi(t, h, ni + 1)),
            ("eta_n", &e.diagonal[n], eta(t, h, ni, &e.b[n])),
            ("zeta_n u_n", &e.lower[n], zeta(t, h, ni) * &e.u[n]),
        ];
        for (which, observed, predicted) in checks {
            if *observed != predicted {
                return Err(HahnError::ClosedFormMismatch {
                    which,
                    n,
                    observed: observed.clone(),
                    predicted,
                });
            }
        }
    }
    Ok(e)
}

/// Checks, for `n = 0..=N` and the basis `(-x)_n`,
///
/// ```text
/// X (-x)_n = n (-x)_n - (-x)_{n+1}
/// Y (-x)_n = n (n + 1 + alpha + beta) (-x)_n + n (N - n + 1)(alpha + n) (-x)_{n-1}
/// ```
pub fn verify_two_diagonal(h: &HahnParams) -> bool {
    let minus_x = -&Poly::x();
    let phi: Vec<Poly> = (0..=h.n + 1).map(|k| minus_x.rising(k)).collect();
    let y = build_y(h);
    (0..=h.n).all(|n| {
        let nq = int(n as i64);
        let x_expected = &phi[n].scale(&nq) - &phi[n + 1];
        let mut y_expected = phi[n].scale(&hahn_eigenvalue(h, n as i64));
        if n > 0 {
            let c = &nq * int(h.n as i64 - n as i64 + 1) * (&h.alpha + &nq);
            y_expected = &y_expected + &phi[n - 1].scale(&c);
        }
        &Poly::x() * &phi[n] == x_expected && y.apply_poly(&phi[n]) == y_expected
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::heunhahn::heun_params_from_op;
    use proptest::prelude::*;

    pub(crate) fn hahn_params(max_n: usize) -> impl Strategy<Value = HahnParams> {
        (-12i64..=12, 1i64..=12, -12i64..=12, 1i64..=12, 1..=max_n).prop_filter_map(
            "invalid Hahn parameters",
            |(a, ad, b, bd, n)| HahnParams::new(rat(a, ad), rat(b, bd), n).ok(),
        )
    }

    pub(crate) fn taus() -> impl Strategy<Value = Taus> {
        proptest::collection::vec((-9i64..=9, 1i64..=6), 5).prop_map(|v| {
            let r: Vec<Rational> = v.iter().map(|&(p, q)| rat(p, q)).collect();
            Taus::new(r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone(), r[4].clone())
        })
    }

    fn zero_zero(n: usize) -> HahnParams {
        HahnParams::new(int(0), int(0), n).unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(HahnParams::new(int(0), int(0), 0), Err(HahnError::EmptyGrid));
        assert!(matches!(
            HahnParams::new(int(-3), int(0), 4),
            Err(HahnError::VanishingPochhammer { .. })
        ));
        // alpha + beta + 1 + m = 0 at m = 3
        assert!(HahnParams::new(rat(-5, 2), rat(-3, 2), 3).is_err());
        assert!(HahnParams::new(rat(-5, 2), rat(-3, 2), 1).is_ok());
    }

    #[test]
    fn polynomial_examples() {
        let h = zero_zero(2);
        assert_eq!(hahn_poly(&h, 0).unwrap(), Poly::one());
        assert_eq!(hahn_poly(&h, 1).unwrap(), Poly::from_ints(&[-1, 1]));
        assert!(hahn_poly(&h, 3).is_err());
        let y = build_y(&h);
        assert_eq!(y.apply_poly(&Poly::from_ints(&[-1, 1])), Poly::from_ints(&[-2, 2]));
        assert!(y.apply_poly(&Poly::one()).is_zero());
    }

    #[test]
    fn recurrence_examples() {
        let h = zero_zero(2);
        assert_eq!(hahn_recurrence(&h, 0).unwrap(), (int(1), int(0)));
        assert!(hahn_recurrence(&h, 2).is_err());
    }

    #[test]
    fn algebra_examples() {
        let h = zero_zero(2);
        let c = hahn_algebra_constants(&h);
        assert_eq!(c.value("a"), int(-2));
        assert_eq!(c.value("c1"), int(0));
        assert_eq!(c.value("d1"), int(0));
        assert_eq!(c.value("d2"), int(2));
        assert!(verify_hahn_algebra(&h).passed());
    }

    #[test]
    fn bilinear_examples() {
        let h = HahnParams::new(rat(1, 3), rat(1, 5), 6).unwrap();
        let zero = Taus::default();
        assert!(build_bilinear_w(&zero, &h).unwrap().0.is_zero());
        let y_only = Taus {
            tau4: int(1),
            ..Default::default()
        };
        assert_eq!(build_bilinear_w(&y_only, &h).unwrap().0, build_y(&h));

        let reduced = Taus::new(int(2), int(3), int(-3), int(1), int(-4));
        let (w, p) = build_bilinear_w(&reduced, &h).unwrap();
        assert!(p.kappa.is_zero());
        assert!(w.max_coeff_degree().unwrap() <= 2);
        let x = build_x();
        let y = build_y(&h);
        let expect = &(&(&x.commutator(&y).scale(&int(3)) + &x) + &y.scale(&int(-4)))
            + &ShiftOp::identity().scale(&int(2));
        assert_eq!(w, expect);
    }

    #[test]
    fn tridiag_examples() {
        let h = HahnParams::new(rat(1, 3), rat(1, 5), 5).unwrap();
        let t = Taus {
            tau3: int(1),
            ..Default::default()
        };
        let (w, _) = build_bilinear_w(&t, &h).unwrap();
        let e = hahn_tridiag(&w, &h, &t).unwrap();
        assert!(e.upper.iter().all(|v| *v == int(1)));
        assert_eq!(e.lower[0], int(0));

        let t = Taus {
            tau4: rat(3, 2),
            ..Default::default()
        };
        let (w, _) = build_bilinear_w(&t, &h).unwrap();
        let e = hahn_tridiag(&w, &h, &t).unwrap();
        assert!(e.upper.iter().chain(&e.lower).all(Zero::is_zero));
        for n in 0..5 {
            assert_eq!(e.diagonal[n], rat(3, 2) * hahn_eigenvalue(&h, n as i64));
        }
    }

    #[test]
    fn two_diagonal_example() {
        let h = zero_zero(2);
        assert!(verify_two_diagonal(&h));
        let phi1 = Poly::from_ints(&[0, -1]);
        assert_eq!(
            build_y(&h).apply_poly(&phi1),
            &phi1.scale(&int(2)) + &Poly::constant(int(2))
        );
    }

    #[test]
    fn hahn_polys_by_direct_sum() {
        // independent oracle: evaluate the scalar 3F2 at grid points
        let h = HahnParams::new(rat(2, 3), rat(-1, 4), 5).unwrap();
        for n in 0..=5usize {
            let p = hahn_poly(&h, n).unwrap();
            let shift = int(n as i64) + h.alpha() + h.beta() + int(1);
            let norm = pochhammer(&(h.alpha() + int(1)), n) * pochhammer(&int(-5), n)
                / pochhammer(&shift, n);
            for x in 0..=5 {
                let s = crate::exactnum::hyp3f2_terminating(
                    &[int(-(n as i64)), shift.clone(), int(-x)],
                    &[h.alpha() + int(1), int(-5)],
                    5,
                )
                .unwrap();
                assert_eq!(p.eval(&int(x)), &norm * s);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn eigen_and_recurrence(h in hahn_params(8)) {
            let basis = HahnBasis::new(&h).unwrap();
            for n in 0..=h.grid_size() {
                prop_assert!(basis.poly(n).is_monic());
                prop_assert!(eigen_residual(&h, &basis, n).is_zero());
            }
            for n in 0..h.grid_size() {
                prop_assert!(basis.recurrence(n).is_ok());
            }
            prop_assert!(verify_two_diagonal(&h));
        }

        #[test]
        fn bilinear_matches_template(h in hahn_params(8), t in taus()) {
            let (w, p) = build_bilinear_w(&t, &h).unwrap();
            prop_assert_eq!(&p.kappa, &t.kappa());
            prop_assert_eq!(heun_params_from_op(&w, h.grid_size()).unwrap(), p.clone());
            prop_assert_eq!(build_heun_hahn(&p, h.grid_size()), w.clone());
            prop_assert!(hahn_tridiag(&w, &h, &t).is_ok());
        }

        #[test]
        fn hahn_algebra_holds(h in hahn_params(7)) {
            let report = verify_hahn_algebra(&h);
            prop_assert!(report.passed(), "{:?}", report);
        }
    }
}
