//! The Heun operator of Hahn type in its seven-parameter form
//!
//! ```text
//! W = A1(x) T+ + A2(x) T- + A0(x)
//! A1 = (x - N)(kappa x^2 + mu1 x + mu0)
//! A2 = x (kappa x^2 + nu1 x + nu0)
//! A0 = -A1 - A2 + r1 x + r0
//! ```
//!
//! together with its degree-raising property, its tridiagonal action on the
//! Pochhammer basis `phi_n = (-1)^n (-x)_n` and finite truncations.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactnum::{format_rational, int, serialize_rationals, Rational};
use crate::linalg;
use crate::polyops::{expand_in_basis, Poly, PolyError};
use crate::shiftalg::ShiftOp;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeunError {
    #[error("W phi_{n} has a nonzero component along phi_{k}, outside the three central bands")]
    BandViolation { n: usize, k: usize },
    #[error("{which} at n = {n}: observed {observed}, closed form {predicted}")]
    ClosedFormMismatch {
        which: &'static str,
        n: usize,
        observed: Rational,
        predicted: Rational,
    },
    #[error("operator is not of Heun-Hahn form: {0}")]
    NotHeunHahn(String),
    #[error("truncation needs 1 <= M < N, got M = {m}, N = {n}")]
    TruncationRange { m: usize, n: usize },
    #[error("truncation condition fails: sigma1_M = {sigma1_m} (sigma1_(M+1) = {sigma1_next})")]
    TruncationCondition { sigma1_m: Rational, sigma1_next: Rational },
    #[error("kernel vector does not solve W psi = 0 exactly: residual {0}")]
    KernelResidual(Poly),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HeunParams {
    pub kappa: Rational,
    pub mu1: Rational,
    pub mu0: Rational,
    pub nu1: Rational,
    pub nu0: Rational,
    pub r1: Rational,
    pub r0: Rational,
}

impl HeunParams {
    pub const NAMES: [&'static str; 7] = ["kappa", "mu1", "mu0", "nu1", "nu0", "r1", "r0"];

    pub fn from_array(v: [Rational; 7]) -> Self {
        let [kappa, mu1, mu0, nu1, nu0, r1, r0] = v;
        HeunParams {
            kappa,
            mu1,
            mu0,
            nu1,
            nu0,
            r1,
            r0,
        }
    }

    pub fn to_array(&self) -> [Rational; 7] {
        [
            self.kappa.clone(),
            self.mu1.clone(),
            self.mu0.clone(),
            self.nu1.clone(),
            self.nu0.clone(),
            self.r1.clone(),
            self.r0.clone(),
        ]
    }

    /// Degree raising from constants needs `r1 != 0`.
    pub fn raises_degree(&self) -> bool {
        !self.r1.is_zero()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let arr = self.to_array();
        let map = Self::NAMES
            .iter()
            .zip(arr.iter())
            .map(|(n, v)| (n.to_string(), serde_json::Value::String(format_rational(v))))
            .collect();
        serde_json::Value::Object(map)
    }
}

fn quadratic(a2: &Rational, a1: &Rational, a0: &Rational) -> Poly {
    Poly::new(vec![a0.clone(), a1.clone(), a2.clone()])
}

pub fn build_heun_hahn(p: &HeunParams, n: usize) -> ShiftOp {
    let a1 = &Poly::linear_root(&int(n as i64)) * &quadratic(&p.kappa, &p.mu1, &p.mu0);
    let a2 = &Poly::x() * &quadratic(&p.kappa, &p.nu1, &p.nu0);
    let a0 = &(-&(&a1 + &a2)) + &Poly::linear(p.r1.clone(), p.r0.clone());
    ShiftOp::from_terms([(1, a1), (-1, a2), (0, a0)])
}

/// Reads the seven parameters back from an operator, failing unless it has
/// exactly the Heun–Hahn shape on the grid `{0..=n}`.
pub fn heun_params_from_op(w: &ShiftOp, n: usize) -> Result<HeunParams, HeunError> {
    let bad = |msg: String| HeunError::NotHeunHahn(msg);
    if let Some(k) = w.terms().keys().find(|k| !(-1..=1).contains(*k)) {
        return Err(bad(format!("unexpected shift T^{k}")));
    }
    let a1 = w.coeff(1);
    let a2 = w.coeff(-1);
    let a0 = w.coeff(0);
    let (q1, rem1) = a1.div_rem(&Poly::linear_root(&int(n as i64)))?;
    if !rem1.is_zero() {
        return Err(bad(format!("A1 = {a1} is not divisible by x - {n}")));
    }
    let (q2, rem2) = a2.div_rem(&Poly::x())?;
    if !rem2.is_zero() {
        return Err(bad(format!("A2 = {a2} is not divisible by x")));
    }
    if q1.degree().unwrap_or(0) > 2 || q2.degree().unwrap_or(0) > 2 {
        return Err(bad("A1 or A2 has degree above 3".into()));
    }
    if q1.coeff(2) != q2.coeff(2) {
        return Err(bad(format!(
            "leading coefficients of A1 and A2 differ: {} vs {}",
            q1.coeff(2),
            q2.coeff(2)
        )));
    }
    let rest = &(&a0 + &a1) + &a2;
    if rest.degree().unwrap_or(0) > 1 {
        return Err(bad(format!("A0 + A1 + A2 = {rest} has degree above 1")));
    }
    Ok(HeunParams {
        kappa: q1.coeff(2),
        mu1: q1.coeff(1),
        mu0: q1.coeff(0),
        nu1: q2.coeff(1),
        nu0: q2.coeff(0),
        r1: rest.coeff(1),
        r0: rest.coeff(0),
    })
}

/// Leading coefficient of `W x^n`: `(mu1 - nu1 + kappa (n - 1 - N)) n + r1`.
pub fn sigma1(p: &HeunParams, big_n: usize, n: usize) -> Rational {
    let n_q = int(n as i64);
    let inner = &p.mu1 - &p.nu1 + &p.kappa * int(n as i64 - 1 - big_n as i64);
    inner * &n_q + &p.r1
}

/// Diagonal coefficient of `W phi_n`:
/// `r0 + (mu0 + r1 - nu0 - mu1 N - nu1 n) n + n (2n - 1)(mu1 - kappa (N - n + 1))`.
pub fn sigma2(p: &HeunParams, big_n: usize, n: usize) -> Rational {
    let n_q = int(n as i64);
    let big = int(big_n as i64);
    let linear = &p.mu0 + &p.r1 - &p.nu0 - &p.mu1 * &big - &p.nu1 * &n_q;
    let quad = int((n * (2 * n)) as i64 - n as i64)
        * (&p.mu1 - &p.kappa * int(big_n as i64 - n as i64 + 1));
    &p.r0 + linear * &n_q + quad
}

/// Lower coefficient of `W phi_n`: `-n (N - n + 1)(mu0 + (n - 1)(mu1 + kappa (n - 1)))`.
pub fn sigma3(p: &HeunParams, big_n: usize, n: usize) -> Rational {
    let nm1 = int(n as i64 - 1);
    let inner = &p.mu0 + &nm1 * (&p.mu1 + &p.kappa * &nm1);
    -int(n as i64) * int(big_n as i64 - n as i64 + 1) * inner
}

/// `phi_n(x) = (-1)^n (-x)_n = x (x - 1) ... (x - n + 1)` for `n = 0..=N+1`.
///
/// The element `phi_{N+1}` is included so that `W phi_N` can be expanded.
#[derive(Debug, Clone)]
pub struct PochhammerBasis {
    n: usize,
    elements: Vec<Poly>,
}

impl PochhammerBasis {
    pub fn new(n: usize) -> Self {
        let mut elements = Vec::with_capacity(n + 2);
        let mut cur = Poly::one();
        for k in 0..=n + 1 {
            elements.push(cur.clone());
            cur = &cur * &Poly::linear_root(&int(k as i64));
        }
        PochhammerBasis { n, elements }
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn element(&self, k: usize) -> &Poly {
        &self.elements[k]
    }

    pub fn elements(&self) -> &[Poly] {
        &self.elements
    }

    pub fn expand(&self, p: &Poly) -> Result<Vec<Rational>, PolyError> {
        expand_in_basis(p, &self.elements)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeRaiseEntry {
    pub n: usize,
    pub degree: Option<usize>,
    pub leading: Rational,
    pub predicted: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeRaiseReport {
    pub passed: bool,
    pub entries: Vec<DegreeRaiseEntry>,
}

/// Checks `deg(W x^n) = n + 1` for `n = 0..N-1` with leading coefficient
/// `sigma1_n`. The prediction needs the operator to have Heun–Hahn shape;
/// otherwise it is missing and the check fails.
pub fn degree_raise_check(w: &ShiftOp, big_n: usize) -> DegreeRaiseReport {
    let params = heun_params_from_op(w, big_n).ok();
    let entries: Vec<DegreeRaiseEntry> = (0..big_n)
        .map(|n| {
            let image = w.apply_poly(&Poly::monomial(Rational::one(), n));
            DegreeRaiseEntry {
                n,
                degree: image.degree(),
                leading: image.coeff(n + 1),
                predicted: params.as_ref().map(|p| sigma1(p, big_n, n)),
            }
        })
        .collect();
    let passed = entries.iter().all(|e| {
        e.degree == Some(e.n + 1) && e.predicted.as_ref() == Some(&e.leading)
    });
    DegreeRaiseReport { passed, entries }
}

/// The three bands of `W phi_n = s1_n phi_{n+1} + s2_n phi_n + s3_n phi_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TridiagCoeffs {
    #[serde(serialize_with = "serialize_rationals")]
    pub sigma1: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    pub sigma2: Vec<Rational>,
    #[serde(serialize_with = "serialize_rationals")]
    pub sigma3: Vec<Rational>,
}

/// Expands `W phi_n`, `n = 0..=N`, and reads off the three bands. Fails if
/// any other component is nonzero.
pub fn pochhammer_expansion(w: &ShiftOp, basis: &PochhammerBasis) -> Result<TridiagCoeffs, HeunError> {
    let big_n = basis.grid_size();
    let mut out = TridiagCoeffs {
        sigma1: Vec::new(),
        sigma2: Vec::new(),
        sigma3: Vec::new(),
    };
    for n in 0..=big_n {
        let image = w.apply_poly(basis.element(n));
        let c = basis.expand(&image)?;
        if let Some(k) = (0..c.len()).find(|&k| (k + 1 < n || k > n + 1) && !c[k].is_zero()) {
            return Err(HeunError::BandViolation { n, k });
        }
        out.sigma1.push(c[n + 1].clone());
        out.sigma2.push(c[n].clone());
        out.sigma3.push(if n > 0 { c[n - 1].clone() } else { Rational::zero() });
    }
    Ok(out)
}

/// Expansion in the Pochhammer basis, checked against the closed forms of
/// the three bands.
pub fn pochhammer_tridiag(w: &ShiftOp, basis: &PochhammerBasis) -> Result<TridiagCoeffs, HeunError> {
    let big_n = basis.grid_size();
    let p = heun_params_from_op(w, big_n)?;
    let coeffs = pochhammer_expansion(w, basis)?;
    for n in 0..=big_n {
        let checks: [(&'static str, &Rational, Rational); 3] = [
            ("sigma1", &coeffs.sigma1[n], sigma1(&p, big_n, n)),
            ("sigma2", &coeffs.sigma2[n], sigma2(&p, big_n, n)),
            ("sigma3", &coeffs.sigma3[n], sigma3(&p, big_n, n)),
        ];
        for (which, observed, predicted) in checks {
            if *observed != predicted {
                return Err(HeunError::ClosedFormMismatch {
                    which,
                    n,
                    observed: observed.clone(),
                    predicted,
                });
            }
        }
    }
    Ok(coeffs)
}

/// Restriction of `W` to polynomials of degree at most `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct QesTruncation {
    pub m: usize,
    pub sigma1_m: Rational,
    pub sigma1_next: Rational,
    /// `(M+1) x (M+1)` matrix in the basis `phi_0..phi_M`; column `n` holds
    /// the coordinates of `W phi_n`.
    pub matrix: Vec<Vec<Rational>>,
    /// `det(lambda I - matrix)`, as a polynomial in `lambda`.
    pub char_poly: Poly,
    /// Coordinates of a basis of `{psi : W psi = 0}` within the subspace.
    pub kernel: Vec<Vec<Rational>>,
    /// The same kernel basis as polynomials in `x`.
    pub kernel_polys: Vec<Poly>,
}

/// Characteristic polynomial `det(lambda I - A)` of a tridiagonal matrix via
/// the continuant recurrence
/// `p_k = (lambda - a_k) p_{k-1} - b_{k-1} c_{k-1} p_{k-2}`.
pub fn tridiagonal_char_poly(matrix: &[Vec<Rational>]) -> Poly {
    let size = matrix.len();
    let mut prev = Poly::one();
    if size == 0 {
        return prev;
    }
    let mut cur = Poly::linear(Rational::one(), -matrix[0][0].clone());
    for k in 1..size {
        let off = &matrix[k - 1][k] * &matrix[k][k - 1];
        let next = &(&Poly::linear(Rational::one(), -matrix[k][k].clone()) * &cur) - &prev.scale(&off);
        prev = cur;
        cur = next;
    }
    cur
}

/// Quasi-exact truncation: when the raising coefficient out of `phi_M`
/// vanishes, `W` preserves `span(phi_0..phi_M)` and `W psi = 0` reduces to a
/// finite tridiagonal problem.
pub fn qes_truncate(p: &HeunParams, big_n: usize, m: usize) -> Result<QesTruncation, HeunError> {
    if m == 0 || m >= big_n {
        return Err(HeunError::TruncationRange { m, n: big_n });
    }
    let sigma1_m = sigma1(p, big_n, m);
    let sigma1_next = sigma1(p, big_n, m + 1);
    if !sigma1_m.is_zero() {
        return Err(HeunError::TruncationCondition { sigma1_m, sigma1_next });
    }
    let w = build_heun_hahn(p, big_n);
    let basis = PochhammerBasis::new(big_n);
    let bands = pochhammer_expansion(&w, &basis)?;
    let size = m + 1;
    let mut matrix = vec![vec![Rational::zero(); size]; size];
    for n in 0..size {
        matrix[n][n] = bands.sigma2[n].clone();
        if n > 0 {
            matrix[n - 1][n] = bands.sigma3[n].clone();
        }
        if n + 1 < size {
            matrix[n + 1][n] = bands.sigma1[n].clone();
        }
    }
    let char_poly = tridiagonal_char_poly(&matrix);
    let kernel: Vec<Vec<Rational>> = linalg::nullspace(&matrix, size)
        .iter()
        .map(|v| linalg::normalize_direction(v))
        .collect();
    let mut kernel_polys = Vec::with_capacity(kernel.len());
    for v in &kernel {
        let psi = v
            .iter()
            .enumerate()
            .fold(Poly::zero(), |acc, (k, c)| &acc + &basis.element(k).scale(c));
        let residual = w.apply_poly(&psi);
        if !residual.is_zero() {
            return Err(HeunError::KernelResidual(residual));
        }
        kernel_polys.push(psi);
    }
    Ok(QesTruncation {
        m,
        sigma1_m,
        sigma1_next,
        matrix,
        char_poly,
        kernel,
        kernel_polys,
    })
}
