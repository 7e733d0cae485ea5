//! Cubic relations satisfied by the bilinear Heun operator.
//!
//! With `Y` the Hahn operator and `W` the bilinear operator,
//!
//! ```text
//! [Y,[Y,W]] = g1 Y^2 + g2 {Y,W} + g3 Y + g4 W + g5
//! [W,[W,Y]] = e1 Y^2 + e2 Y^3 + g2 W^2 + g1 {Y,W} + g3 W + g6 Y + g7
//! ```
//!
//! The extra terms `e1 Y^2 + e2 Y^3` vanish exactly when `tau1 + tau2 = 0`
//! and `tau2 = +-tau4`, and the relations then reduce to the Racah algebra.
//! This module also fits the companion relations between `X` and `W`, the
//! equitable triple `Y + W1 + W2 = 0`, and the realization by differential
//! operators.

use num_traits::Zero;
use thiserror::Error;

use crate::exactnum::{int, rat, Rational};
use crate::hahn::{build_x, build_y, HahnParams, Taus};
use crate::polyops::{ordinary_heun_degree_check, DegreeCheck, DiffOp, Poly};
use crate::shiftalg::{fit_relations, FitError, FittedConstants, Relation, ShiftOp};

pub const HEUN_RACAH_NAMES: [&str; 9] = ["g1", "g2", "g3", "g4", "g5", "g6", "g7", "e1", "e2"];

pub const XW_NAMES: [&str; 12] = [
    "e3", "g8", "g9", "g10", "g11", "g12", "e4", "e5", "e6", "g13", "g14", "g15",
];

pub const RACAH_NAMES: [&str; 7] = ["a1", "a2", "b", "c1", "c2", "d1", "d2"];

pub fn heun_racah_relations(y: &ShiftOp, w: &ShiftOp) -> Vec<Relation> {
    let one = ShiftOp::identity();
    let yy = y * y;
    let yw = y.anticommutator(w);
    vec![
        Relation::new("[Y,[Y,W]]", y.commutator(&y.commutator(w)))
            .term(0, yy.clone())
            .term(1, yw.clone())
            .term(2, y.clone())
            .term(3, w.clone())
            .term(4, one.clone()),
        Relation::new("[W,[W,Y]]", w.commutator(&w.commutator(y)))
            .term(7, yy.clone())
            .term(8, &yy * y)
            .term(1, w * w)
            .term(0, yw)
            .term(2, w.clone())
            .term(5, y.clone())
            .term(6, one),
    ]
}

/// Fits `g1..g7, e1, e2` jointly, so the shared constants are determined
/// by both relations at once.
pub fn fit_heun_racah(y: &ShiftOp, w: &ShiftOp) -> Result<FittedConstants, FitError> {
    fit_relations(&HEUN_RACAH_NAMES, &heun_racah_relations(y, w))
}

/// `e2 = 2 (tau1 + tau2)^2`.
pub fn e2_closed_form(t: &Taus) -> Rational {
    int(2) * t.kappa() * t.kappa()
}

/// ```text
/// e1 = 6 tau4^2 + 3 (tau1 + tau2)(tau3 + (2N + beta - alpha) tau4)
///      - (tau1^2 + tau2^2)(3N(alpha + 1) - 2) - 2 (3N(alpha + 1) - 5) tau1 tau2
/// ```
pub fn e1_closed_form(t: &Taus, h: &HahnParams) -> Rational {
    let n = int(h.grid_size() as i64);
    let three_n_a = int(3) * &n * (h.alpha() + int(1));
    let b_const = int(2) * &n + h.beta() - h.alpha();
    int(6) * &t.tau4 * &t.tau4 + int(3) * t.kappa() * (&t.tau3 + b_const * &t.tau4)
        - (&t.tau1 * &t.tau1 + &t.tau2 * &t.tau2) * (&three_n_a - int(2))
        - int(2) * (&three_n_a - int(5)) * &t.tau1 * &t.tau2
}

pub fn xw_relations(x: &ShiftOp, w: &ShiftOp) -> Vec<Relation> {
    let one = ShiftOp::identity();
    let xx = x * x;
    let xw = x.anticommutator(w);
    vec![
        Relation::new("RXW_1", x.commutator(&x.commutator(w)))
            .term(0, &xx * x)
            .term(1, xx.clone())
            .term(2, xw.clone())
            .term(3, x.clone())
            .term(4, w.clone())
            .term(5, one.clone()),
        Relation::new("RXW_2", w.commutator(&w.commutator(x)))
            .term(6, xx.clone())
            .term(7, &xx * x)
            .term(8, &(x * w) * x)
            .term(2, w * w)
            .term(1, xw)
            .term(9, x.clone())
            .term(10, w.clone())
            .term(11, one),
    ]
}

/// Fits `e3..e6, g8..g15`, with `g8` and `g9` shared between the two
/// relations.
pub fn fit_xw_relations(x: &ShiftOp, w: &ShiftOp) -> Result<FittedConstants, FitError> {
    fit_relations(&XW_NAMES, &xw_relations(x, w))
}

/// Whether `tau1 + tau2 = 0` and `tau4 = s tau2` for a sign `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Degeneration {
    pub is_racah: bool,
    /// `s` with `tau4 = s tau2`; `+1` is reported when both signs apply.
    pub which_sign: Option<i8>,
}

pub fn degeneration_check(t: &Taus) -> Degeneration {
    let sign = if (&t.tau4 - &t.tau2).is_zero() {
        Some(1)
    } else if (&t.tau4 + &t.tau2).is_zero() {
        Some(-1)
    } else {
        None
    };
    let is_racah = t.kappa().is_zero() && sign.is_some();
    Degeneration {
        is_racah,
        which_sign: if is_racah { sign } else { None },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegenerationReport {
    pub degeneration: Degeneration,
    pub fit: Result<FittedConstants, FitError>,
    /// The relations close with `e1 = e2 = 0` for some choice of the
    /// remaining constants.
    pub extra_terms_vanish: bool,
}

impl DegenerationReport {
    /// The condition on `tau` and the fitted extra terms agree.
    pub fn consistent(&self) -> bool {
        self.degeneration.is_racah == self.extra_terms_vanish
    }
}

/// Compares the condition on `tau` with the fit: the relations are re-solved
/// with `e1` and `e2` removed from the unknowns, which succeeds exactly when
/// the extra terms can vanish.
pub fn verify_degeneration(t: &Taus, h: &HahnParams) -> DegenerationReport {
    let y = build_y(h);
    let w = crate::hahn::compose_bilinear(t, &build_x(), &y);
    let relations = heun_racah_relations(&y, &w);
    let without_extra: Vec<Relation> = relations
        .iter()
        .map(|r| Relation {
            terms: r.terms.iter().filter(|(i, _)| *i < 7).cloned().collect(),
            ..r.clone()
        })
        .collect();
    let extra_terms_vanish = !matches!(
        fit_relations(&HEUN_RACAH_NAMES[..7], &without_extra),
        Err(FitError::Inconsistent { .. })
    );
    DegenerationReport {
        degeneration: degeneration_check(t),
        fit: fit_relations(&HEUN_RACAH_NAMES, &relations),
        extra_terms_vanish,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TripleError {
    #[error("Y + W1 + W2 = {0}, not zero")]
    NonzeroSum(ShiftOp),
    #[error("{which} differs from its bilinear form by {difference}")]
    BilinearForm { which: &'static str, difference: ShiftOp },
    #[error("pair ({0}, {0}) is degenerate; the two operators must differ")]
    IdenticalPair(String),
}

/// `Y`, `W1`, `W2` with `Y + W1 + W2 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RacahTriple {
    pub gamma: Rational,
    pub epsilon: Rational,
    pub y: ShiftOp,
    pub w1: ShiftOp,
    pub w2: ShiftOp,
}

impl RacahTriple {
    pub fn named(&self) -> [(&'static str, &ShiftOp); 3] {
        [("Y", &self.y), ("W1", &self.w1), ("W2", &self.w2)]
    }
}

/// Explicit first-order forms
///
/// ```text
/// W1 = (x + alpha + 1)(N - x) T+ + x^2 + ((alpha - beta)/2 - N + gamma) x + epsilon - N(alpha + 1)/2
/// W2 = x (beta + N + 1 - x) T- + x^2 + ((alpha - beta)/2 - N - gamma) x - epsilon - N(alpha + 1)/2
/// ```
pub fn racah_triple_explicit(h: &HahnParams, gamma: &Rational, epsilon: &Rational) -> (ShiftOp, ShiftOp) {
    let (al, be) = (h.alpha(), h.beta());
    let n = int(h.grid_size() as i64);
    let half = rat(1, 2);
    let mid = (al - be) * &half - &n;
    let offset = &n * (al + int(1)) * &half;
    let up = &Poly::linear(int(1), al + int(1)) * &Poly::linear(int(-1), n.clone());
    let down = &Poly::x() * &Poly::linear(int(-1), be + &n + int(1));
    let diag = |lin: Rational, c: Rational| Poly::new(vec![c, lin, int(1)]);
    let w1 = ShiftOp::from_terms([(1, up), (0, diag(&mid + gamma, epsilon - &offset))]);
    let w2 = ShiftOp::from_terms([(-1, down), (0, diag(&mid - gamma, -epsilon - &offset))]);
    (w1, w2)
}

/// `W1 = [X,Y]/2 + gamma X - Y/2 + epsilon` and
/// `W2 = -[X,Y]/2 - gamma X - Y/2 - epsilon`, composed.
pub fn racah_triple_bilinear(h: &HahnParams, gamma: &Rational, epsilon: &Rational) -> (ShiftOp, ShiftOp) {
    let x = build_x();
    let y = build_y(h);
    let half = rat(1, 2);
    let half_comm = x.commutator(&y).scale(&half);
    let half_y = y.scale(&half);
    let shift = &x.scale(gamma) + &ShiftOp::identity().scale(epsilon);
    let w1 = &(&half_comm + &shift) - &half_y;
    let w2 = &(&(-&half_comm) - &shift) - &half_y;
    (w1, w2)
}

/// Builds the explicit forms and checks them against the bilinear forms and
/// `Y + W1 + W2 = 0`.
pub fn build_racah_triple(h: &HahnParams, gamma: &Rational, epsilon: &Rational) -> Result<RacahTriple, TripleError> {
    let (w1, w2) = racah_triple_explicit(h, gamma, epsilon);
    let y = build_y(h);
    let sum = &(&y + &w1) + &w2;
    if !sum.is_zero() {
        return Err(TripleError::NonzeroSum(sum));
    }
    let (f1, f2) = racah_triple_bilinear(h, gamma, epsilon);
    for (which, explicit, form) in [("W1", &w1, f1), ("W2", &w2, f2)] {
        let difference = explicit - &form;
        if !difference.is_zero() {
            return Err(TripleError::BilinearForm { which, difference });
        }
    }
    Ok(RacahTriple {
        gamma: gamma.clone(),
        epsilon: epsilon.clone(),
        y,
        w1,
        w2,
    })
}

/// Racah relations for `K1`, `K2`, `K3 = [K1,K2]`:
///
/// ```text
/// [K2,K3] = a1 {K1,K2} + a2 K2^2 + b K2 + c1 K1 + d1
/// [K3,K1] = a1 K1^2 + a2 {K1,K2} + b K1 + c2 K2 + d2
/// ```
pub fn racah_relations(k1: &ShiftOp, k2: &ShiftOp) -> Vec<Relation> {
    let k3 = k1.commutator(k2);
    let one = ShiftOp::identity();
    let anti = k1.anticommutator(k2);
    vec![
        Relation::new("[K2,K3]", k2.commutator(&k3))
            .term(0, anti.clone())
            .term(1, k2 * k2)
            .term(2, k2.clone())
            .term(3, k1.clone())
            .term(5, one.clone()),
        Relation::new("[K3,K1]", k3.commutator(k1))
            .term(0, k1 * k1)
            .term(1, anti)
            .term(2, k1.clone())
            .term(4, k2.clone())
            .term(6, one),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairFit {
    pub first: &'static str,
    pub second: &'static str,
    pub fit: Result<FittedConstants, FitError>,
}

pub fn fit_racah_pair(k1: &ShiftOp, k2: &ShiftOp) -> Result<FittedConstants, FitError> {
    fit_relations(&RACAH_NAMES, &racah_relations(k1, k2))
}

/// Fits the Racah relations for `(Y, W1)`, `(Y, W2)` and `(W1, W2)`.
pub fn verify_racah_pairs(triple: &RacahTriple) -> Result<Vec<PairFit>, TripleError> {
    let ops = triple.named();
    let mut out = Vec::with_capacity(3);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let ((first, a), (second, b)) = (ops[i], ops[j]);
        if a == b {
            return Err(TripleError::IdenticalPair(first.to_string()));
        }
        out.push(PairFit {
            first,
            second,
            fit: fit_racah_pair(a, b),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealizationError {
    #[error("{which} = {poly} has degree above 1")]
    DegreeTooHigh { which: &'static str, poly: Poly },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealizationClass {
    /// `tau1 + tau2 = 0`: an ordinary Heun operator of order at most 2.
    Ordinary,
    /// `tau1 + tau2 != 0`: a third-order operator.
    ThirdOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffRealization {
    pub w: DiffOp,
    pub class: RealizationClass,
    /// The predicted top coefficient: `x(x-1)(2 tau1 x - tau1 - tau4)` on
    /// the second derivative for [`RealizationClass::Ordinary`], and
    /// `-(tau1 + tau2) x^2 (x-1)^2` on the third derivative otherwise.
    pub predicted_top: Poly,
    pub top_matches: bool,
    /// For third-order operators, whether the second-order coefficient is
    /// `x(x-1)` times a polynomial of degree at most 1.
    pub second_order_shape: bool,
    pub degree_check: DegreeCheck,
}

impl DiffRealization {
    pub fn passed(&self) -> bool {
        self.top_matches && self.second_order_shape && self.degree_check.passed
    }
}

/// `x(x - 1)`
fn x_xm1() -> Poly {
    Poly::from_ints(&[0, -1, 1])
}

/// `x(x-1)(2 tau1 x - tau1 - tau4)`, the second-order coefficient when
/// `tau2 = -tau1`.
pub fn ordinary_second_order(t: &Taus) -> Poly {
    &x_xm1() * &Poly::linear(int(2) * &t.tau1, -(&t.tau1 + &t.tau4))
}

/// `-(tau1 + tau2) x^2 (x-1)^2`, the third-order coefficient.
pub fn third_order_leading(t: &Taus) -> Poly {
    (&x_xm1() * &x_xm1()).scale(&-t.kappa())
}

/// Composes `W = tau1 XY + tau2 YX + tau3 X + tau4 Y + tau0` for
/// `X = x(x-1) D + q1`, `Y = x(1-x) D^2 + t1 D`, and classifies it.
pub fn differential_realization(q1: &Poly, t1: &Poly, t: &Taus) -> Result<DiffRealization, RealizationError> {
    for (which, p) in [("q1", q1), ("t1", t1)] {
        if p.degree().unwrap_or(0) > 1 {
            return Err(RealizationError::DegreeTooHigh { which, poly: p.clone() });
        }
    }
    let x = DiffOp::from_terms([(1, x_xm1()), (0, q1.clone())]);
    let y = DiffOp::from_terms([(2, -&x_xm1()), (1, t1.clone())]);
    let w = [
        x.compose(&y).scale(&t.tau1),
        y.compose(&x).scale(&t.tau2),
        x.scale(&t.tau3),
        y.scale(&t.tau4),
        DiffOp::identity().scale(&t.tau0),
    ]
    .iter()
    .fold(DiffOp::zero(), |acc, d| acc.add(d));

    let kappa = t.kappa();
    let (class, predicted_top, top_matches, second_order_shape) = if kappa.is_zero() {
        let pi3 = ordinary_second_order(t);
        let ok = w.order().is_none_or(|o| o <= 2) && w.coeff(2) == pi3;
        (RealizationClass::Ordinary, pi3, ok, true)
    } else {
        let lead = third_order_leading(t);
        let ok = w.order() == Some(3) && w.coeff(3) == lead;
        let shape = match w.coeff(2).div_rem(&x_xm1()) {
            Ok((q, r)) => r.is_zero() && q.degree().unwrap_or(0) <= 1,
            Err(_) => false,
        };
        (RealizationClass::ThirdOrder, lead, ok, shape)
    };
    let degree_check = ordinary_heun_degree_check(&w, 10);
    Ok(DiffRealization {
        w,
        class,
        predicted_top,
        top_matches,
        second_order_shape,
        degree_check,
    })
}
