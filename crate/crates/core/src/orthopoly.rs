//! Monic classical orthogonal polynomials: Laguerre–Sonin and Jacobi.
//!
//! Conventions: `L_n^α` is monic and orthogonal for `x^α e^{-x}` on `(0, ∞)`,
//! `P_n^{(α,β)}` is monic and orthogonal for `(1-x)^α (1+x)^β` on `(-1, 1)`.
//! Both satisfy `p_{k+1} = (x - b_k) p_k - c_k p_{k-1}` with `c_k = k_k / k_{k-1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, ln_gamma, DoubleDouble, Scaled, SharedScale};

/// Largest degree accepted by the public evaluators.
pub const MAX_DEGREE: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaguerreParams {
    pub alpha: f64,
}

impl LaguerreParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameters(format!("Laguerre weight needs alpha > -1, got {alpha}")));
        }
        Ok(LaguerreParams { alpha })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "Jacobi weight needs alpha > -1 and beta > -1, got ({alpha}, {beta})"
            )));
        }
        Ok(JacobiParams { alpha, beta })
    }
}

/// One classical family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Laguerre(LaguerreParams),
    Jacobi(JacobiParams),
}

/// Values `p_0(x), ..., p_n(x)`; entry `j` equals `values[j] * 2^scale_exponents[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySequenceEval {
    pub values: Vec<f64>,
    pub scale_exponents: Option<Vec<i64>>,
}

impl PolySequenceEval {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, j: usize) -> Scaled {
        let e = self.scale_exponents.as_ref().map_or(0, |s| s[j]);
        Scaled::new(self.values[j], e)
    }

    /// Unscaled value; overflows to infinity when out of range.
    pub fn value(&self, j: usize) -> f64 {
        self.get(j).to_f64()
    }
}

/// Recurrence coefficients `(b_k, c_k)` of monic Jacobi polynomials.
pub fn jacobi_coeffs(a: f64, b: f64, k: usize) -> (f64, f64) {
    let kf = k as f64;
    let s = 2.0 * kf + a + b;
    let bk = if k == 0 { (b - a) / (a + b + 2.0) } else { (b * b - a * a) / (s * (s + 2.0)) };
    let ck = match k {
        0 => 0.0,
        1 => 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b)),
        _ => 4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0)),
    };
    (bk, ck)
}

/// Recurrence coefficients `(b_k, c_k)` of monic Laguerre polynomials.
pub fn laguerre_coeffs(alpha: f64, k: usize) -> (f64, f64) {
    let kf = k as f64;
    (2.0 * kf + alpha + 1.0, kf * (kf + alpha))
}

/// `ln k_n^α = ln n! + ln Γ(n+α+1)`.
pub fn laguerre_log_norm(p: LaguerreParams, n: usize) -> f64 {
    ln_factorial(n) + ln_gamma(n as f64 + p.alpha + 1.0)
}

/// `ln k_n^{(α,β)}`, entirely through log-gamma.
pub fn jacobi_log_norm(p: JacobiParams, n: usize) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    let ln2 = std::f64::consts::LN_2;
    if n == 0 {
        return (a + b + 1.0) * ln2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0);
    }
    let nf = n as f64;
    let s = 2.0 * nf + a + b;
    (s + 1.0) * ln2 + ln_factorial(n) + ln_gamma(nf + a + 1.0) + ln_gamma(nf + b + 1.0) + ln_gamma(nf + a + b + 1.0)
        - (s + 1.0).ln()
        - 2.0 * ln_gamma(s + 1.0)
}

impl Family {
    pub fn laguerre(alpha: f64) -> Result<Family> {
        Ok(Family::Laguerre(LaguerreParams::new(alpha)?))
    }

    pub fn jacobi(alpha: f64, beta: f64) -> Result<Family> {
        Ok(Family::Jacobi(JacobiParams::new(alpha, beta)?))
    }

    /// `(b_k, c_k)` in `p_{k+1} = (x - b_k) p_k - c_k p_{k-1}`.
    #[inline]
    pub fn coeffs(&self, k: usize) -> (f64, f64) {
        match *self {
            Family::Laguerre(p) => laguerre_coeffs(p.alpha, k),
            Family::Jacobi(p) => jacobi_coeffs(p.alpha, p.beta, k),
        }
    }

    pub fn log_norm(&self, n: usize) -> f64 {
        match *self {
            Family::Laguerre(p) => laguerre_log_norm(p, n),
            Family::Jacobi(p) => jacobi_log_norm(p, n),
        }
    }

    /// Total mass `k_0`.
    pub fn mass(&self) -> f64 {
        self.log_norm(0).exp()
    }

    /// Support interval of the weight.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Family::Laguerre(_) => (0.0, f64::INFINITY),
            Family::Jacobi(_) => (-1.0, 1.0),
        }
    }

    /// Weight function `w(x)` on the support.
    pub fn weight(&self, x: f64) -> f64 {
        match *self {
            Family::Laguerre(p) => x.powf(p.alpha) * (-x).exp(),
            Family::Jacobi(p) => (1.0 - x).powf(p.alpha) * (1.0 + x).powf(p.beta),
        }
    }

    /// Family with both exponents raised by one (target of the derivative identity).
    pub fn derivative_family(&self) -> Family {
        match *self {
            Family::Laguerre(p) => Family::Laguerre(LaguerreParams { alpha: p.alpha + 1.0 }),
            Family::Jacobi(p) => Family::Jacobi(JacobiParams { alpha: p.alpha + 1.0, beta: p.beta + 1.0 }),
        }
    }

    /// Overflow-safe evaluation of `p_0..p_n` at `x`.
    pub fn eval(&self, n: usize, x: f64) -> PolySequenceEval {
        let mut values = Vec::with_capacity(n + 1);
        let mut exps = Vec::with_capacity(n + 1);
        let mut scale = SharedScale::default();
        let mut cur = [1.0, 0.0];
        values.push(1.0);
        exps.push(0);
        let mut scaled = false;
        for k in 0..n {
            let (bk, ck) = self.coeffs(k);
            let next = (x - bk) * cur[0] - ck * cur[1];
            let mut v = [next, cur[0]];
            let before = scale.exponent;
            scale.renorm(&mut v);
            if scale.exponent != before {
                scaled = true;
            }
            cur = v;
            values.push(cur[0]);
            exps.push(scale.exponent);
        }
        PolySequenceEval { values, scale_exponents: if scaled { Some(exps) } else { None } }
    }

    /// Plain `f64` evaluation of `p_0..p_n`; no overflow protection.
    pub fn eval_plain(&self, n: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(1.0);
        let (mut p0, mut p1) = (0.0, 1.0);
        for k in 0..n {
            let (bk, ck) = self.coeffs(k);
            let p2 = (x - bk) * p1 - ck * p0;
            p0 = p1;
            p1 = p2;
            out.push(p1);
        }
        out
    }

    /// Values and first derivatives of `p_0..p_n` at `x` (plain `f64`).
    pub fn eval_with_derivative(&self, n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
        let mut v = Vec::with_capacity(n + 1);
        let mut d = Vec::with_capacity(n + 1);
        v.push(1.0);
        d.push(0.0);
        let (mut p0, mut p1, mut d0, mut d1) = (0.0, 1.0, 0.0, 0.0);
        for k in 0..n {
            let (bk, ck) = self.coeffs(k);
            let p2 = (x - bk) * p1 - ck * p0;
            let d2 = p1 + (x - bk) * d1 - ck * d0;
            p0 = p1;
            p1 = p2;
            d0 = d1;
            d1 = d2;
            v.push(p1);
            d.push(d1);
        }
        (v, d)
    }

    /// `p_0..p_n` at `x` in double-double arithmetic; the recurrence coefficients are taken as given.
    pub fn eval_dd(&self, n: usize, x: f64) -> Vec<DoubleDouble> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(DoubleDouble::from_f64(1.0));
        let (mut p0, mut p1) = (DoubleDouble::ZERO, DoubleDouble::from_f64(1.0));
        let xd = DoubleDouble::from_f64(x);
        for k in 0..n {
            let (bk, ck) = self.coeffs(k);
            let p2 = xd.sub(DoubleDouble::from_f64(bk)).mul(p1).sub(p0.mul_f64(ck));
            p0 = p1;
            p1 = p2;
            out.push(p1);
        }
        out
    }

    /// `p_n(x)` as a scaled value.
    pub fn value_scaled(&self, n: usize, x: f64) -> Scaled {
        self.eval(n, x).get(n)
    }

    /// Ratios `r_k = p_{k+1}(ξ)/p_k(ξ)` for `k = 0..=n`, by `r_k = (ξ - b_k) - c_k / r_{k-1}`.
    pub fn ratios(&self, n: usize, xi: f64) -> Vec<f64> {
        let mut r = Vec::with_capacity(n + 1);
        let (b0, _) = self.coeffs(0);
        r.push(xi - b0);
        for k in 1..=n {
            let (bk, ck) = self.coeffs(k);
            let prev = r[k - 1];
            r.push((xi - bk) - ck / prev);
        }
        r
    }
}

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::Numerical(format!("degree {n} exceeds the configured maximum {MAX_DEGREE}")));
    }
    Ok(())
}

/// Monic `L_j^α(x)`, `j = 0..=n`.
pub fn laguerre_eval(params: LaguerreParams, n: usize, x: f64) -> Result<PolySequenceEval> {
    check_degree(n)?;
    Ok(Family::Laguerre(params).eval(n, x))
}

/// Monic `P_j^{(α,β)}(x)`, `j = 0..=n`.
pub fn jacobi_eval(params: JacobiParams, n: usize, x: f64) -> Result<PolySequenceEval> {
    check_degree(n)?;
    Ok(Family::Jacobi(params).eval(n, x))
}

/// Explicit sum for monic Laguerre:
/// `L_n^α(x) = (-1)^n n! Σ_m (-1)^m / m! · C(n+α, n-m) x^m`.
pub fn laguerre_explicit(alpha: f64, n: usize, x: f64) -> f64 {
    let nf = n as f64;
    let mut s = 0.0;
    for m in 0..=n {
        let mf = m as f64;
        let ln_binom = ln_gamma(nf + alpha + 1.0) - ln_factorial(n - m) - ln_gamma(alpha + mf + 1.0);
        let term = (ln_binom - ln_factorial(m)).exp() * x.powi(m as i32);
        s += if m % 2 == 0 { term } else { -term };
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * ln_factorial(n).exp() * s
}

/// Explicit sum for monic Jacobi:
/// `P_n = 2^n Γ(α+n+1)/Γ(α+β+2n+1) Σ_m C(n,m) Γ(α+β+n+m+1)/Γ(α+m+1) ((x-1)/2)^m`.
pub fn jacobi_explicit(alpha: f64, beta: f64, n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    let pre = nf * std::f64::consts::LN_2 + ln_gamma(alpha + nf + 1.0) - ln_gamma(alpha + beta + 2.0 * nf + 1.0);
    let y = (x - 1.0) / 2.0;
    let mut s = 0.0;
    for m in 0..=n {
        let mf = m as f64;
        let ln_binom = ln_factorial(n) - ln_factorial(m) - ln_factorial(n - m);
        let t = (pre + ln_binom + ln_gamma(alpha + beta + nf + mf + 1.0) - ln_gamma(alpha + mf + 1.0)).exp();
        s += t * y.powi(m as i32);
    }
    s
}

/// Both sides of `d/dx L_n^α(x) = n L_{n-1}^{α+1}(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftCheck {
    pub derivative: f64,
    pub shifted: f64,
}

impl ShiftCheck {
    pub fn rel_error(&self) -> f64 {
        crate::numeric::rel_diff(self.derivative, self.shifted)
    }
}

/// Evaluates both sides of the Laguerre derivative identity at `x`.
pub fn laguerre_derivative_shift(params: LaguerreParams, n: usize, x: f64) -> ShiftCheck {
    let fam = Family::Laguerre(params);
    let (_, d) = fam.eval_with_derivative(n, x);
    let shifted = if n == 0 { 0.0 } else { n as f64 * fam.derivative_family().eval_plain(n - 1, x)[n - 1] };
    ShiftCheck { derivative: d[n], shifted }
}

/// Both sides of `d/dx P_n^{(α,β)} = n P_{n-1}^{(α+1,β+1)}` at `x`.
pub fn jacobi_derivative_shift(params: JacobiParams, n: usize, x: f64) -> ShiftCheck {
    let fam = Family::Jacobi(params);
    let (_, d) = fam.eval_with_derivative(n, x);
    let shifted = if n == 0 { 0.0 } else { n as f64 * fam.derivative_family().eval_plain(n - 1, x)[n - 1] };
    ShiftCheck { derivative: d[n], shifted }
}

/// Which exponent the connection formula raises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftDirection {
    Alpha,
    Beta,
}

/// Multiplier `c` in `P_n^{(α,β)} = P_n^{(α',β')} + c P_{n-1}^{(α',β')}`,
/// where `(α',β')` raises α (`Alpha`) or β (`Beta`) by one.
pub fn jacobi_connection(params: JacobiParams, n: usize, direction: ShiftDirection) -> f64 {
    assert!(n >= 1, "connection coefficient needs n >= 1");
    let (a, b) = (params.alpha, params.beta);
    let nf = n as f64;
    let s = 2.0 * nf + a + b;
    match direction {
        ShiftDirection::Alpha => -2.0 * nf * (nf + b) / (s * (s + 1.0)),
        ShiftDirection::Beta => 2.0 * nf * (nf + a) / (s * (s + 1.0)),
    }
}

/// Reproducing kernel `N_n(x, ξ) = Σ_{j≤n} p_j(x) p_j(ξ) / k_j`, each term rescaled in log space.
pub fn reproducing_kernel(family: Family, n: usize, x: f64, xi: f64) -> f64 {
    let px = family.eval(n, x);
    let pxi = family.eval(n, xi);
    let mut s = 0.0;
    for j in 0..=n {
        let a = px.get(j);
        let b = pxi.get(j);
        let sign = f64::from(a.signum() * b.signum());
        if sign == 0.0 {
            continue;
        }
        s += sign * (a.ln_abs() + b.ln_abs() - family.log_norm(j)).exp();
    }
    s
}
