//! Seeded verification suites, one per checked property.
//!
//! Every suite draws its own parameter samples from a ChaCha stream derived
//! from the seed, so a report is reproducible and the suites can run in
//! parallel. A [`Mutation`] perturbs one predicted value by `+1`; a sound
//! suite must then fail.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::exactnum::{format_rational, int, rat, Rational};
use crate::gevp::{build_u, lambda, verify_solution, RIIParams};
use crate::hahn::{
    bilinear_coefficients, compose_bilinear, eta, hahn_algebra_constants, hahn_algebra_relations,
    hahn_eigenvalue, hahn_expansion, taus_to_heun, xi, zeta, HahnBasis, HahnParams, Taus, HAHN_ALGEBRA_NAMES,
};
use crate::heunhahn::{
    build_heun_hahn, heun_params_from_op, pochhammer_expansion, qes_truncate, sigma1, sigma2, sigma3, HeunParams,
    PochhammerBasis,
};
use crate::heunracah::{
    differential_realization, e1_closed_form, e2_closed_form, fit_heun_racah, fit_racah_pair,
    ordinary_second_order, racah_triple_bilinear, racah_triple_explicit, third_order_leading, verify_degeneration,
    RealizationClass,
};
use crate::linalg::{self, Solution};
use crate::polyops::Poly;
use crate::shiftalg::{fit_relations, ShiftOp};

/// A single predicted value shifted by `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutation {
    Sigma1,
    Sigma2,
    /// `n(2n-1)` replaced by `n(2n-1) + 1` inside `sigma2`.
    Sigma2Factor,
    Sigma3,
    HahnEigenvalue,
    BilinearUp,
    BilinearDown,
    BilinearIdentity,
    Kappa,
    Xi,
    Eta,
    Zeta,
    HahnA,
    HahnB,
    HahnC1,
    HahnC2,
    HahnD1,
    HahnD2,
    E1,
    E2,
    TripleW1,
    TripleW2,
    OrdinarySecondOrder,
    ThirdOrderLeading,
    PencilEigenvalue,
}

impl Mutation {
    pub const ALL: [Mutation; 25] = [
        Mutation::Sigma1,
        Mutation::Sigma2,
        Mutation::Sigma2Factor,
        Mutation::Sigma3,
        Mutation::HahnEigenvalue,
        Mutation::BilinearUp,
        Mutation::BilinearDown,
        Mutation::BilinearIdentity,
        Mutation::Kappa,
        Mutation::Xi,
        Mutation::Eta,
        Mutation::Zeta,
        Mutation::HahnA,
        Mutation::HahnB,
        Mutation::HahnC1,
        Mutation::HahnC2,
        Mutation::HahnD1,
        Mutation::HahnD2,
        Mutation::E1,
        Mutation::E2,
        Mutation::TripleW1,
        Mutation::TripleW2,
        Mutation::OrdinarySecondOrder,
        Mutation::ThirdOrderLeading,
        Mutation::PencilEigenvalue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::Sigma1 => "sigma1",
            Mutation::Sigma2 => "sigma2",
            Mutation::Sigma2Factor => "sigma2-factor",
            Mutation::Sigma3 => "sigma3",
            Mutation::HahnEigenvalue => "hahn-eigenvalue",
            Mutation::BilinearUp => "bilinear-up",
            Mutation::BilinearDown => "bilinear-down",
            Mutation::BilinearIdentity => "bilinear-identity",
            Mutation::Kappa => "kappa",
            Mutation::Xi => "xi",
            Mutation::Eta => "eta",
            Mutation::Zeta => "zeta",
            Mutation::HahnA => "hahn-a",
            Mutation::HahnB => "hahn-b",
            Mutation::HahnC1 => "hahn-c1",
            Mutation::HahnC2 => "hahn-c2",
            Mutation::HahnD1 => "hahn-d1",
            Mutation::HahnD2 => "hahn-d2",
            Mutation::E1 => "e1",
            Mutation::E2 => "e2",
            Mutation::TripleW1 => "triple-w1",
            Mutation::TripleW2 => "triple-w2",
            Mutation::OrdinarySecondOrder => "ordinary-second-order",
            Mutation::ThirdOrderLeading => "third-order-leading",
            Mutation::PencilEigenvalue => "pencil-eigenvalue",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mutation {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        })
    }
}

/// Outcome of one check, with exact values rendered as strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub expected: String,
    pub observed: String,
    /// The identity being checked, written out.
    pub identity: String,
}

impl CheckRecord {
    pub fn new(name: &str, identity: &str, outcome: Result<(String, String), Failure>) -> Self {
        let (status, expected, observed) = match outcome {
            Ok((e, o)) => (Status::Pass, e, o),
            Err(f) => (if f.error { Status::Error } else { Status::Fail }, f.expected, f.observed),
        };
        CheckRecord {
            name: name.to_string(),
            status,
            expected,
            observed,
            identity: identity.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// First mismatch found by a suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub expected: String,
    pub observed: String,
    pub error: bool,
}

impl Failure {
    pub fn mismatch(expected: impl Into<String>, observed: impl Into<String>) -> Self {
        Failure {
            expected: expected.into(),
            observed: observed.into(),
            error: false,
        }
    }

    /// A library call returned an error where success was required.
    pub fn from_error(context: impl fmt::Display, err: impl fmt::Display) -> Self {
        Failure {
            expected: format!("{context}: success"),
            observed: format!("{context}: {err}"),
            error: false,
        }
    }
}

fn check_eq<T: PartialEq + fmt::Display>(what: impl fmt::Display, observed: &T, expected: &T) -> Result<(), Failure> {
    if observed == expected {
        Ok(())
    } else {
        Err(Failure::mismatch(format!("{what}: {expected}"), format!("{what}: {observed}")))
    }
}

fn check(what: impl fmt::Display, ok: bool, detail: impl FnOnce() -> String) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::mismatch(format!("{what}"), detail()))
    }
}

/// Parameters shared by all suites. Suites that take Hahn parameters use
/// `(alpha, beta, N, taus)` as their first sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub alpha: Rational,
    pub beta: Rational,
    pub n: usize,
    /// Drawn from the seed when absent.
    pub taus: Option<Taus>,
    pub gamma: Option<Rational>,
    pub epsilon: Option<Rational>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            alpha: rat(1, 3),
            beta: rat(1, 5),
            n: 8,
            taus: None,
            gamma: None,
            epsilon: None,
        }
    }
}

/// Per-suite sampling context.
pub struct Ctx<'a> {
    rng: ChaCha8Rng,
    cfg: &'a VerifyConfig,
    taus: &'a Taus,
    mutation: Option<Mutation>,
    targets: &'a [Mutation],
}

impl Ctx<'_> {
    fn bump(&self, target: Mutation) -> Rational {
        debug_assert!(self.targets.contains(&target), "undeclared mutation {target}");
        if self.mutation == Some(target) {
            Rational::one()
        } else {
            Rational::zero()
        }
    }

    fn bump_poly(&self, target: Mutation) -> Poly {
        Poly::constant(self.bump(target))
    }

    /// `p/q` with `|p| <= 12`, `1 <= q <= 12`.
    pub fn small_rational(&mut self) -> Rational {
        rat(self.rng.gen_range(-12..=12), self.rng.gen_range(1..=12))
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.small_rational();
            if !r.is_zero() {
                return r;
            }
        }
    }

    fn non_integer(&mut self) -> Rational {
        loop {
            let r = self.small_rational();
            if !r.is_integer() {
                return r;
            }
        }
    }

    fn grid(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    pub fn taus(&mut self) -> Taus {
        Taus::new(
            self.small_rational(),
            self.small_rational(),
            self.small_rational(),
            self.small_rational(),
            self.small_rational(),
        )
    }

    /// Sample `i` of a suite: the configured parameters first, then random
    /// ones with `N` in `lo..=hi`.
    fn hahn(&mut self, i: usize, lo: usize, hi: usize) -> HahnParams {
        if i == 0 {
            if let Ok(h) = HahnParams::new(self.cfg.alpha.clone(), self.cfg.beta.clone(), self.cfg.n) {
                return h;
            }
        }
        let n = self.grid(lo, hi);
        loop {
            if let Ok(h) = HahnParams::new(self.small_rational(), self.small_rational(), n) {
                return h;
            }
        }
    }

    fn sample_taus(&mut self, i: usize) -> Taus {
        if i == 0 {
            self.taus.clone()
        } else {
            self.taus()
        }
    }

    /// Random parameters with `r1 != 0` and `sigma1_n != 0` for `n < N`.
    pub fn heun_params(&mut self, big_n: usize) -> HeunParams {
        loop {
            let mut v: [Rational; 7] = std::array::from_fn(|_| Rational::zero());
            for c in v.iter_mut() {
                *c = self.small_rational();
            }
            let p = HeunParams::from_array(v);
            if p.raises_degree() && (0..big_n).all(|n| !sigma1(&p, big_n, n).is_zero()) {
                return p;
            }
        }
    }
}

type SuiteFn = fn(&mut Ctx) -> Result<(String, String), Failure>;

pub struct Suite {
    pub name: &'static str,
    pub identity: &'static str,
    /// Suites with the same stream see the same samples.
    stream: u64,
    /// The mutations this suite reads.
    pub targets: &'static [Mutation],
    run: SuiteFn,
}

pub fn suites() -> Vec<Suite> {
    vec![
        Suite {
            name: "degree-raising",
            targets: &[Mutation::Sigma1],
            identity: "deg W x^n = n + 1 with leading coefficient (mu1 - nu1 + kappa (n-1-N)) n + r1",
            stream: 1,
            run: suite_degree_raising,
        },
        Suite {
            name: "pochhammer-tridiagonal",
            targets: &[Mutation::Sigma1, Mutation::Sigma2, Mutation::Sigma2Factor, Mutation::Sigma3],
            identity: "W phi_n = sigma1_n phi_(n+1) + sigma2_n phi_n + sigma3_n phi_(n-1), phi_n = x(x-1)...(x-n+1)",
            stream: 1,
            run: suite_pochhammer,
        },
        Suite {
            name: "hahn-eigenproblem",
            targets: &[Mutation::HahnEigenvalue],
            identity: "Y P_n = n (n + alpha + beta + 1) P_n",
            stream: 3,
            run: suite_hahn_eigen,
        },
        Suite {
            name: "bilinear-coincidence",
            targets: &[Mutation::BilinearUp, Mutation::BilinearDown, Mutation::BilinearIdentity, Mutation::Kappa],
            identity: "tau1 XY + tau2 YX + tau3 X + tau4 Y + tau0 has the explicit cubic coefficients and kappa = tau1 + tau2",
            stream: 4,
            run: suite_bilinear,
        },
        Suite {
            name: "hahn-tridiagonal",
            targets: &[Mutation::Xi, Mutation::Eta, Mutation::Zeta],
            identity: "W P_n = xi_(n+1) P_(n+1) + eta_n P_n + zeta_n u_n P_(n-1)",
            stream: 5,
            run: suite_hahn_tridiag,
        },
        Suite {
            name: "hahn-algebra",
            targets: &[Mutation::HahnA, Mutation::HahnB, Mutation::HahnC1, Mutation::HahnC2, Mutation::HahnD1, Mutation::HahnD2],
            identity: "[Y,[X,Y]] = -2{X,Y} + (2N+beta-alpha) Y + c1 X + d1, [[X,Y],X] = -2X^2 + (2N+beta-alpha) X - Y + d2",
            stream: 6,
            run: suite_hahn_algebra,
        },
        Suite {
            name: "heun-racah",
            targets: &[Mutation::E1, Mutation::E2],
            identity: "[Y,[Y,W]] and [W,[W,Y]] close with e2 = 2(tau1+tau2)^2 and the closed form of e1",
            stream: 7,
            run: suite_heun_racah,
        },
        Suite {
            name: "racah-degeneration-and-triple",
            targets: &[Mutation::E1, Mutation::E2, Mutation::TripleW1, Mutation::TripleW2],
            identity: "e1 = e2 = 0 iff tau1 + tau2 = 0 and tau2 = +-tau4; Y + W1 + W2 = 0 and each pair satisfies the Racah relations",
            stream: 8,
            run: suite_degeneration_triple,
        },
        Suite {
            name: "differential-realization",
            targets: &[Mutation::OrdinarySecondOrder, Mutation::ThirdOrderLeading],
            identity: "tau2 = -tau1 gives order 2 with x(x-1)(2 tau1 x - tau1 - tau4) D^2; otherwise -(tau1+tau2) x^2 (x-1)^2 D^3",
            stream: 9,
            run: suite_differential,
        },
        Suite {
            name: "generalized-eigenproblem",
            targets: &[Mutation::PencilEigenvalue],
            identity: "(L1 - n(N-beta-n) L2) U_n = 0 as rational functions and on the grid",
            stream: 10,
            run: suite_gevp,
        },
        Suite {
            name: "qes-truncation",
            targets: &[Mutation::Sigma1, Mutation::Sigma2, Mutation::Sigma3],
            identity: "sigma1_M = 0 makes span(phi_0..phi_M) invariant; W psi = 0 for every kernel vector",
            stream: 11,
            run: suite_qes,
        },
    ]
}

const SAMPLES_HEUN: usize = 50;

fn suite_degree_raising(c: &mut Ctx) -> Result<(String, String), Failure> {
    let big_n = 10;
    for _ in 0..SAMPLES_HEUN {
        let p = c.heun_params(big_n);
        let w = build_heun_hahn(&p, big_n);
        for n in 0..big_n {
            let image = w.apply_poly(&Poly::monomial(Rational::one(), n));
            check_eq(format!("deg W x^{n}"), &image.degree().map_or(-1, |d| d as i64), &(n as i64 + 1))?;
            let predicted = sigma1(&p, big_n, n) + c.bump(Mutation::Sigma1);
            check_eq(format!("leading coefficient of W x^{n}"), &image.coeff(n + 1), &predicted)?;
        }
    }
    Ok((format!("{SAMPLES_HEUN} samples, N = {big_n}"), "all degrees and leading coefficients match".into()))
}

fn suite_pochhammer(c: &mut Ctx) -> Result<(String, String), Failure> {
    let big_n = 10;
    let basis = PochhammerBasis::new(big_n);
    for _ in 0..SAMPLES_HEUN {
        let p = c.heun_params(big_n);
        let w = build_heun_hahn(&p, big_n);
        let bands = pochhammer_expansion(&w, &basis).map_err(|e| Failure::mismatch("three bands", e.to_string()))?;
        for n in 0..=big_n {
            let s2 = sigma2(&p, big_n, n)
                + c.bump(Mutation::Sigma2)
                + c.bump(Mutation::Sigma2Factor) * (&p.mu1 - &p.kappa * int(big_n as i64 - n as i64 + 1));
            check_eq(format!("sigma1_{n}"), &bands.sigma1[n], &(sigma1(&p, big_n, n) + c.bump(Mutation::Sigma1)))?;
            check_eq(format!("sigma2_{n}"), &bands.sigma2[n], &s2)?;
            let s3 = if n == 0 { Rational::zero() } else { sigma3(&p, big_n, n) + c.bump(Mutation::Sigma3) };
            check_eq(format!("sigma3_{n}"), &bands.sigma3[n], &s3)?;
        }
    }
    Ok((format!("{SAMPLES_HEUN} samples, n = 0..={big_n}"), "all three bands match, zero elsewhere".into()))
}

fn suite_hahn_eigen(c: &mut Ctx) -> Result<(String, String), Failure> {
    let samples = 10;
    for i in 0..samples {
        let h = c.hahn(i, 1, 10);
        let basis = HahnBasis::new(&h).map_err(|e| Failure::from_error("Hahn basis", e))?;
        let y = crate::hahn::build_y(&h);
        for n in 0..=h.grid_size() {
            let p = basis.poly(n);
            check(format!("P_{n} monic of degree {n}"), p.degree() == Some(n) && p.is_monic(), || p.to_string())?;
            let lam = hahn_eigenvalue(&h, n as i64) + c.bump(Mutation::HahnEigenvalue);
            check_eq(format!("Y P_{n} (N = {})", h.grid_size()), &y.apply_poly(p), &p.scale(&lam))?;
        }
    }
    Ok((format!("{samples} samples, N <= 10"), "Y P_n = lambda_n P_n for all n <= N".into()))
}

fn suite_bilinear(c: &mut Ctx) -> Result<(String, String), Failure> {
    for i in 0..SAMPLES_HEUN {
        let h = c.hahn(i, 1, 10);
        let t = c.sample_taus(i);
        let w = compose_bilinear(&t, &crate::hahn::build_x(), &crate::hahn::build_y(&h));
        let [a1, a2, a0] = bilinear_coefficients(&t, &h);
        let a1 = &a1 + &c.bump_poly(Mutation::BilinearUp);
        let a2 = &a2 + &c.bump_poly(Mutation::BilinearDown);
        let a0 = &a0 + &c.bump_poly(Mutation::BilinearIdentity);
        check_eq("T+ coefficient", &w.coeff(1), &a1)?;
        check_eq("T- coefficient", &w.coeff(-1), &a2)?;
        check_eq("identity part", &w.coeff(0), &a0)?;
        check(
            "shifts within {-1, 0, 1}",
            w.terms().keys().all(|k| (-1..=1).contains(k)),
            || w.to_string(),
        )?;
        let read = heun_params_from_op(&w, h.grid_size()).map_err(|e| Failure::from_error("seven-parameter form", e))?;
        check_eq("kappa", &read.kappa, &(t.kappa() + c.bump(Mutation::Kappa)))?;
        check_eq("seven-parameter image", &build_heun_hahn(&taus_to_heun(&t, &h), h.grid_size()), &w)?;
    }
    Ok((format!("{SAMPLES_HEUN} samples"), "composed operator equals the explicit coefficients".into()))
}

fn suite_hahn_tridiag(c: &mut Ctx) -> Result<(String, String), Failure> {
    let samples = 10;
    for i in 0..samples {
        let h = c.hahn(i, 2, 8);
        let t = c.sample_taus(i);
        let w = compose_bilinear(&t, &crate::hahn::build_x(), &crate::hahn::build_y(&h));
        let basis = HahnBasis::new(&h).map_err(|e| Failure::from_error("Hahn basis", e))?;
        let e = hahn_expansion(&w, &h, &basis).map_err(|e| Failure::mismatch("three bands", e.to_string()))?;
        for n in 0..h.grid_size() {
            let ni = n as i64;
            check_eq(format!("xi_{}", n + 1), &e.upper[n], &(xi(&t, &h, ni + 1) + c.bump(Mutation::Xi)))?;
            check_eq(
                format!("eta_{n}"),
                &e.diagonal[n],
                &(eta(&t, &h, ni, &e.b[n]) + c.bump(Mutation::Eta)),
            )?;
            check_eq(
                format!("zeta_{n} u_{n}"),
                &e.lower[n],
                &((zeta(&t, &h, ni) + c.bump(Mutation::Zeta)) * &e.u[n]),
            )?;
        }
    }
    Ok((format!("{samples} samples, n = 0..N-1"), "all three bands match".into()))
}

fn suite_hahn_algebra(c: &mut Ctx) -> Result<(String, String), Failure> {
    let samples = 10;
    let bumps = [
        Mutation::HahnA,
        Mutation::HahnB,
        Mutation::HahnC1,
        Mutation::HahnC2,
        Mutation::HahnD1,
        Mutation::HahnD2,
    ];
    for i in 0..samples {
        let h = c.hahn(i, 1, 10);
        let fit = fit_relations(&HAHN_ALGEBRA_NAMES, &hahn_algebra_relations(&h))
            .map_err(|e| Failure::from_error("Hahn algebra fit", e))?;
        let expected = hahn_algebra_constants(&h);
        for (k, name) in HAHN_ALGEBRA_NAMES.iter().enumerate() {
            check_eq(
                format!("{name} (N = {})", h.grid_size()),
                &fit.value(name),
                &(expected.value(name) + c.bump(bumps[k])),
            )?;
        }
    }
    Ok((format!("{samples} samples"), "fitted constants equal the closed forms".into()))
}

fn suite_heun_racah(c: &mut Ctx) -> Result<(String, String), Failure> {
    let samples = 20;
    for i in 0..samples {
        let h = c.hahn(i, 2, 7);
        let t = c.sample_taus(i);
        let y = crate::hahn::build_y(&h);
        let w = compose_bilinear(&t, &crate::hahn::build_x(), &y);
        let fit = fit_heun_racah(&y, &w).map_err(|e| Failure::from_error("Heun-Racah fit", e))?;
        check_eq("e2", &fit.value("e2"), &(e2_closed_form(&t) + c.bump(Mutation::E2)))?;
        check_eq("e1", &fit.value("e1"), &(e1_closed_form(&t, &h) + c.bump(Mutation::E1)))?;
    }
    Ok((format!("{samples} samples"), "unique fits, zero residual, e1 and e2 match".into()))
}

fn suite_degeneration_triple(c: &mut Ctx) -> Result<(String, String), Failure> {
    let samples = 10;
    for i in 0..samples {
        let h = c.hahn(i, 2, 6);
        let tau1 = c.nonzero_rational();
        let sign = if i % 2 == 0 { int(1) } else { int(-1) };
        let t = Taus::new(c.small_rational(), tau1.clone(), -tau1.clone(), c.small_rational(), -tau1 * &sign);
        let report = verify_degeneration(&t, &h);
        check("condition on tau detected", report.degeneration.is_racah, || format!("{:?}", report.degeneration))?;
        check("extra terms vanish", report.extra_terms_vanish, || format!("{:?}", report.fit))?;
        if let Ok(fit) = &report.fit {
            check_eq("e1", &fit.value("e1"), &(e1_closed_form(&t, &h) + c.bump(Mutation::E1)))?;
            check_eq("e2", &fit.value("e2"), &(e2_closed_form(&t) + c.bump(Mutation::E2)))?;
        }
        let generic = c.taus();
        let report = verify_degeneration(&generic, &h);
        check("condition and fit agree", report.consistent(), || format!("{generic:?}: {report:?}"))?;

        let gamma = if i == 0 { c.cfg.gamma.clone() } else { None }.unwrap_or_else(|| c.small_rational());
        let epsilon = if i == 0 { c.cfg.epsilon.clone() } else { None }.unwrap_or_else(|| c.small_rational());
        let (w1, w2) = racah_triple_explicit(&h, &gamma, &epsilon);
        let w1 = &w1 + &ShiftOp::multiplication(c.bump_poly(Mutation::TripleW1));
        let w2 = &w2 + &ShiftOp::multiplication(c.bump_poly(Mutation::TripleW2));
        let y = crate::hahn::build_y(&h);
        check_eq("Y + W1 + W2", &(&(&y + &w1) + &w2), &ShiftOp::zero())?;
        let (f1, f2) = racah_triple_bilinear(&h, &gamma, &epsilon);
        check_eq("W1", &w1, &f1)?;
        check_eq("W2", &w2, &f2)?;
        for (name, a, b) in [("(Y, W1)", &y, &w1), ("(Y, W2)", &y, &w2), ("(W1, W2)", &w1, &w2)] {
            fit_racah_pair(a, b).map_err(|e| Failure::from_error(format!("Racah fit for {name}"), e))?;
        }
    }
    Ok((format!("{samples} samples"), "degenerate fits, zero sum, three Racah pairs".into()))
}

fn suite_differential(c: &mut Ctx) -> Result<(String, String), Failure> {
    let samples = 10;
    for i in 0..samples {
        let q1 = Poly::new(vec![c.small_rational(), c.small_rational()]);
        let t1 = Poly::new(vec![c.small_rational(), c.small_rational()]);
        let mut t = c.sample_taus(i);
        if t.kappa().is_zero() {
            t.tau2 += Rational::one();
        }
        let generic = differential_realization(&q1, &t1, &t).map_err(|e| Failure::from_error("realization", e))?;
        check("third-order class", generic.class == RealizationClass::ThirdOrder, || format!("{:?}", generic.class))?;
        check_eq("order", &generic.w.order().map_or(-1, |o| o as i64), &3)?;
        let lead = &third_order_leading(&t) + &c.bump_poly(Mutation::ThirdOrderLeading);
        check_eq("third-order coefficient", &generic.w.coeff(3), &lead)?;
        check("second-order coefficient is x(x-1) times a linear factor", generic.second_order_shape, || {
            generic.w.coeff(2).to_string()
        })?;

        let mut tr = t.clone();
        tr.tau2 = -tr.tau1.clone();
        let ordinary = differential_realization(&q1, &t1, &tr).map_err(|e| Failure::from_error("realization", e))?;
        check("order at most 2", ordinary.w.order().is_none_or(|o| o <= 2), || ordinary.w.to_string())?;
        let pi = &ordinary_second_order(&tr) + &c.bump_poly(Mutation::OrdinarySecondOrder);
        check_eq("second-order coefficient", &ordinary.w.coeff(2), &pi)?;
        check("degree raising by at most one", ordinary.degree_check.passed, || {
            format!("{:?}", ordinary.degree_check.failures)
        })?;
    }
    Ok((format!("{samples} samples, each in both classes"), "orders and top coefficients match".into()))
}

fn suite_gevp(c: &mut Ctx) -> Result<(String, String), Failure> {
    let samples = 10;
    let (big_n, n_max) = (8, 5);
    for _ in 0..samples {
        // non-integer alpha and beta; a zero of P_n cancelling a pole is
        // treated as an excluded coincidence
        let p = loop {
            let Ok(p) = RIIParams::new(c.non_integer(), c.non_integer(), big_n) else {
                continue;
            };
            if (0..=n_max).all(|n| build_u(&p, n).is_ok_and(|s| s.poles_exact())) {
                break p;
            }
        };
        for n in 0..=n_max {
            let sol = build_u(&p, n).map_err(|e| Failure::from_error(format!("U_{n}"), e))?;
            let lam = lambda(&p, n) + c.bump(Mutation::PencilEigenvalue);
            let r = verify_solution(&p, &sol, &lam).map_err(|e| Failure::from_error(format!("U_{n}"), e))?;
            let tag = format!(
                "(L1 - lambda_{n} L2) U_{n} at alpha = {}, beta = {}",
                format_rational(p.alpha()),
                format_rational(p.beta())
            );
            check(format!("{tag}: zero numerator"), r.residual.is_zero(), || r.residual.num().to_string())?;
            check(format!("{tag}: zero on all {} grid points", big_n + 1), r.grid_residual.iter().all(Zero::is_zero), || {
                r.grid_residual.iter().map(format_rational).collect::<Vec<_>>().join(", ")
            })?;
        }
    }
    Ok((format!("{samples} samples, N = {big_n}, n = 0..={n_max}"), "zero residual, symbolic and on the grid".into()))
}

/// Parameters with `sigma1_M = 0`; with `kernel` set, `(mu0, nu0, r0)` are
/// solved so that a chosen vector spans part of the kernel.
fn engineer_qes(c: &mut Ctx, big_n: usize, m: usize, kernel: bool) -> Option<HeunParams> {
    let mut p = HeunParams {
        kappa: c.small_rational(),
        mu1: c.small_rational(),
        nu1: c.small_rational(),
        mu0: c.small_rational(),
        nu0: c.small_rational(),
        r0: c.small_rational(),
        r1: Rational::zero(),
    };
    p.r1 = -(sigma1(&p, big_n, m) + c.bump(Mutation::Sigma1));
    if !kernel {
        return Some(p);
    }
    let mut coords: Vec<Rational> = (0..m).map(|_| c.small_rational()).collect();
    coords.push(Rational::one());
    // A(mu0, nu0, r0) coords is affine in the three unknowns
    let image = |q: &HeunParams| -> Vec<Rational> {
        (0..=m)
            .map(|row| {
                let mut acc = sigma2(q, big_n, row) * &coords[row];
                if row < m {
                    acc += sigma3(q, big_n, row + 1) * &coords[row + 1];
                }
                if row > 0 {
                    acc += sigma1(q, big_n, row - 1) * &coords[row - 1];
                }
                acc
            })
            .collect()
    };
    let set = |v: [Rational; 3]| {
        let mut q = p.clone();
        [q.mu0, q.nu0, q.r0] = v;
        q
    };
    let z = Rational::zero;
    let base = image(&set([z(), z(), z()]));
    let columns: Vec<Vec<Rational>> = [
        [Rational::one(), z(), z()],
        [z(), Rational::one(), z()],
        [z(), z(), Rational::one()],
    ]
    .into_iter()
    .map(|v| image(&set(v)).iter().zip(&base).map(|(a, b)| a - b).collect())
    .collect();
    let matrix: Vec<Vec<Rational>> = (0..=m).map(|r| columns.iter().map(|col| col[r].clone()).collect()).collect();
    let rhs: Vec<Rational> = base.iter().map(|b| -b).collect();
    let v = match linalg::solve(&matrix, &rhs, 3) {
        Solution::Unique(v) => v,
        Solution::Family { particular, .. } => particular,
        Solution::Inconsistent => return None,
    };
    Some(set([v[0].clone(), v[1].clone(), v[2].clone()]))
}

fn suite_qes(c: &mut Ctx) -> Result<(String, String), Failure> {
    let big_n = c.cfg.n.max(3);
    let per_case = 4;
    let mut kernels = 0;
    for m in [1usize, 2] {
        for i in 0..per_case {
            let kernel = i % 2 == 0;
            let p = loop {
                if let Some(p) = engineer_qes(c, big_n, m, kernel) {
                    break p;
                }
            };
            let t = qes_truncate(&p, big_n, m).map_err(|e| Failure::from_error(format!("truncation at M = {m}"), e))?;
            check_eq("matrix size", &t.matrix.len(), &(m + 1))?;
            for n in 0..=m {
                let s2 = sigma2(&p, big_n, n) + c.bump(Mutation::Sigma2);
                check_eq(format!("entry ({n}, {n})"), &t.matrix[n][n], &s2)?;
                if n > 0 {
                    let s3 = sigma3(&p, big_n, n) + c.bump(Mutation::Sigma3);
                    check_eq(format!("entry ({}, {n})", n - 1), &t.matrix[n - 1][n], &s3)?;
                }
            }
            for l in -2..=2 {
                let lam = int(l);
                let shifted: Vec<Vec<Rational>> = (0..=m)
                    .map(|r| {
                        (0..=m)
                            .map(|s| if r == s { &lam - &t.matrix[r][s] } else { -t.matrix[r][s].clone() })
                            .collect()
                    })
                    .collect();
                check_eq(format!("characteristic polynomial at {l}"), &t.char_poly.eval(&lam), &linalg::determinant(&shifted))?;
            }
            if kernel {
                check("nontrivial kernel", !t.kernel.is_empty(), || format!("matrix {:?}", t.matrix))?;
            }
            let w = build_heun_hahn(&p, big_n);
            for psi in &t.kernel_polys {
                kernels += 1;
                check(format!("psi of degree <= {m}"), psi.degree().is_some_and(|d| d <= m), || psi.to_string())?;
                check_eq("W psi", &w.apply_poly(psi), &Poly::zero())?;
            }
        }
    }
    Ok((
        format!("M = 1, 2 with {per_case} samples each, N = {big_n}"),
        format!("{kernels} kernel vectors, all solve W psi = 0"),
    ))
}

/// The parameters used, including the sampled `tau` when none was given.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub parameters: Vec<(String, String)>,
    pub checks: Vec<CheckRecord>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn resolved_taus(cfg: &VerifyConfig) -> Taus {
    cfg.taus.clone().unwrap_or_else(|| {
        let mut c = Ctx {
            rng: stream_rng(cfg.seed, 0),
            cfg,
            taus: &Taus::default(),
            mutation: None,
            targets: &[],
        };
        c.taus()
    })
}

fn run_suite(suite: &Suite, cfg: &VerifyConfig, taus: &Taus, mutation: Option<Mutation>) -> CheckRecord {
    let mut ctx = Ctx {
        rng: stream_rng(cfg.seed, suite.stream),
        cfg,
        taus,
        mutation,
        targets: suite.targets,
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| (suite.run)(&mut ctx))).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(Failure {
            expected: "suite completes".into(),
            observed: msg,
            error: true,
        })
    });
    CheckRecord::new(suite.name, suite.identity, outcome)
}

/// Runs every suite, optionally with one prediction perturbed.
pub fn run_suites(cfg: &VerifyConfig, mutation: Option<Mutation>) -> VerifyReport {
    let taus = resolved_taus(cfg);
    let checks = suites()
        .par_iter()
        .map(|s| run_suite(s, cfg, &taus, mutation))
        .collect();
    let mut parameters = vec![
        ("seed".to_string(), cfg.seed.to_string()),
        ("alpha".to_string(), format_rational(&cfg.alpha)),
        ("beta".to_string(), format_rational(&cfg.beta)),
        ("N".to_string(), cfg.n.to_string()),
    ];
    for (k, v) in [
        ("tau0", &taus.tau0),
        ("tau1", &taus.tau1),
        ("tau2", &taus.tau2),
        ("tau3", &taus.tau3),
        ("tau4", &taus.tau4),
    ] {
        parameters.push((k.to_string(), format_rational(v)));
    }
    for (k, v) in [("gamma", &cfg.gamma), ("epsilon", &cfg.epsilon)] {
        if let Some(v) = v {
            parameters.push((k.to_string(), format_rational(v)));
        }
    }
    if let Some(m) = mutation {
        parameters.push(("mutation".to_string(), m.to_string()));
    }
    VerifyReport { parameters, checks }
}

/// The full report, plus one check per [`Mutation`] recording which suites
/// caught it.
pub fn run_verify_all(cfg: &VerifyConfig) -> VerifyReport {
    let mut report = run_suites(cfg, None);
    report.checks.extend(mutation_sweep(cfg).into_iter().map(|(m, caught)| {
        let outcome = if caught.is_empty() {
            Err(Failure::mismatch("at least one failing suite", "none"))
        } else {
            Ok(("at least one failing suite".to_string(), caught.join(", ")))
        };
        CheckRecord::new(
            &format!("mutation-{m}"),
            "a prediction shifted by +1 is rejected",
            outcome,
        )
    }));
    report
}

/// For every mutation, the names of the suites that fail under it. Suites
/// that never read a mutation are unaffected by it and are skipped.
pub fn mutation_sweep(cfg: &VerifyConfig) -> Vec<(Mutation, Vec<&'static str>)> {
    let taus = resolved_taus(cfg);
    let all = suites();
    Mutation::ALL
        .par_iter()
        .map(|&m| {
            let caught = all
                .par_iter()
                .filter(|s| s.targets.contains(&m) && !run_suite(s, cfg, &taus, Some(m)).passed())
                .map(|s| s.name)
                .collect();
            (m, caught)
        })
        .collect()
}
