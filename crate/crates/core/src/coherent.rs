//! The seven coherent pairs `(c₀, c₁)`: validation, `σ_n`, square norms
//! `k_n⁽⁰⁾`, `k_n⁽¹⁾`, and evaluation of the families `P_n` (for `c₀`) and
//! `T_n` (for `c₁`) linked by `T_n = P'_{n+1}/(n+1) - σ_n P'_n/n`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{jacobi_d_moments, laguerre_c_moments, MomentSequence};
use crate::numeric::{ln_factorial, ln_gamma};
use crate::orthopoly::{jacobi_coeffs, Family};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    LaguerreA,
    LaguerreB,
    LaguerreC,
    JacobiA,
    JacobiB,
    JacobiC,
    JacobiD,
}

impl CaseTag {
    pub const ALL: [CaseTag; 7] = [
        CaseTag::LaguerreA,
        CaseTag::LaguerreB,
        CaseTag::LaguerreC,
        CaseTag::JacobiA,
        CaseTag::JacobiB,
        CaseTag::JacobiC,
        CaseTag::JacobiD,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CaseTag::LaguerreA => "laguerre-a",
            CaseTag::LaguerreB => "laguerre-b",
            CaseTag::LaguerreC => "laguerre-c",
            CaseTag::JacobiA => "jacobi-a",
            CaseTag::JacobiB => "jacobi-b",
            CaseTag::JacobiC => "jacobi-c",
            CaseTag::JacobiD => "jacobi-d",
        }
    }

    /// Parameter keys accepted by the case grammar.
    pub fn keys(&self) -> &'static [&'static str] {
        match self {
            CaseTag::LaguerreA => &["alpha", "xi"],
            CaseTag::LaguerreB => &["M"],
            CaseTag::LaguerreC => &["alpha", "xi", "M"],
            CaseTag::JacobiA => &["alpha", "beta", "xi"],
            CaseTag::JacobiB => &["beta", "M"],
            CaseTag::JacobiC => &["alpha", "M"],
            CaseTag::JacobiD => &["alpha", "beta", "xi", "M"],
        }
    }

    pub fn is_laguerre(&self) -> bool {
        matches!(self, CaseTag::LaguerreA | CaseTag::LaguerreB | CaseTag::LaguerreC)
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseTag::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown case `{s}`")))
    }
}

/// One coherent pair with its parameters. Fields a case does not use are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentCase {
    pub tag: CaseTag,
    pub alpha: f64,
    pub beta: f64,
    pub xi: f64,
    pub mass: f64,
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameters(msg)
}

impl CoherentCase {
    /// Validates the parameters against the invariants of `tag`.
    pub fn new(tag: CaseTag, alpha: f64, beta: f64, xi: f64, mass: f64) -> Result<Self> {
        let all_finite = [alpha, beta, xi, mass].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(invalid(format!("{tag}: parameters must be finite")));
        }
        let uses_mass = !matches!(tag, CaseTag::LaguerreA | CaseTag::JacobiA);
        if uses_mass && mass < 0.0 {
            return Err(invalid(format!("{tag}: M >= 0 required, got {mass}")));
        }
        match tag {
            CaseTag::LaguerreA => {
                if !(alpha > 0.0) {
                    return Err(invalid(format!("laguerre-a: alpha > 0 required, got {alpha}")));
                }
                if !(xi < 0.0) {
                    return Err(invalid(format!("laguerre-a: xi < 0 required, got {xi}")));
                }
            }
            CaseTag::LaguerreB => {}
            CaseTag::LaguerreC => {
                if !(alpha > -1.0) {
                    return Err(invalid(format!("laguerre-c: alpha > -1 required, got {alpha}")));
                }
                if !(xi <= 0.0) {
                    return Err(invalid(format!("laguerre-c: xi <= 0 required, got {xi}")));
                }
            }
            CaseTag::JacobiA => {
                if !(alpha > 0.0 && beta > 0.0) {
                    return Err(invalid(format!("jacobi-a: alpha > 0 and beta > 0 required, got ({alpha}, {beta})")));
                }
                if !(xi.abs() > 1.0) {
                    return Err(invalid(format!("jacobi-a: |xi| > 1 required, got {xi}")));
                }
            }
            CaseTag::JacobiB => {
                if !(beta > 0.0) {
                    return Err(invalid(format!("jacobi-b: beta > 0 required, got {beta}")));
                }
            }
            CaseTag::JacobiC => {
                if !(alpha > 0.0) {
                    return Err(invalid(format!("jacobi-c: alpha > 0 required, got {alpha}")));
                }
            }
            CaseTag::JacobiD => {
                if !(alpha > -1.0 && beta > -1.0) {
                    return Err(invalid(format!("jacobi-d: alpha > -1 and beta > -1 required, got ({alpha}, {beta})")));
                }
                if !(xi.abs() >= 1.0) {
                    return Err(invalid(format!("jacobi-d: |xi| >= 1 required, got {xi}")));
                }
            }
        }
        let keep = |k: &str, v: f64| if tag.keys().contains(&k) { v } else { 0.0 };
        Ok(CoherentCase {
            tag,
            alpha: keep("alpha", alpha),
            beta: keep("beta", beta),
            xi: keep("xi", xi),
            mass: keep("M", mass),
        })
    }

    pub fn laguerre_a(alpha: f64, xi: f64) -> Result<Self> {
        Self::new(CaseTag::LaguerreA, alpha, 0.0, xi, 0.0)
    }

    pub fn laguerre_b(mass: f64) -> Result<Self> {
        Self::new(CaseTag::LaguerreB, 0.0, 0.0, 0.0, mass)
    }

    pub fn laguerre_c(alpha: f64, xi: f64, mass: f64) -> Result<Self> {
        Self::new(CaseTag::LaguerreC, alpha, 0.0, xi, mass)
    }

    pub fn jacobi_a(alpha: f64, beta: f64, xi: f64) -> Result<Self> {
        Self::new(CaseTag::JacobiA, alpha, beta, xi, 0.0)
    }

    pub fn jacobi_b(beta: f64, mass: f64) -> Result<Self> {
        Self::new(CaseTag::JacobiB, 0.0, beta, 0.0, mass)
    }

    pub fn jacobi_c(alpha: f64, mass: f64) -> Result<Self> {
        Self::new(CaseTag::JacobiC, alpha, 0.0, 0.0, mass)
    }

    pub fn jacobi_d(alpha: f64, beta: f64, xi: f64, mass: f64) -> Result<Self> {
        Self::new(CaseTag::JacobiD, alpha, beta, xi, mass)
    }

    /// `ε`: orientation sign of the Jacobi cases (`+1` for the Laguerre cases).
    pub fn epsilon(&self) -> f64 {
        match self.tag {
            CaseTag::JacobiA => {
                if self.xi < -1.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            CaseTag::JacobiB => 1.0,
            CaseTag::JacobiC => -1.0,
            CaseTag::JacobiD => {
                if self.xi <= -1.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            _ => 1.0,
        }
    }

    /// `γ` of the JacobiB/C cases (`β` resp. `α`).
    pub fn gamma(&self) -> f64 {
        match self.tag {
            CaseTag::JacobiB => self.beta,
            CaseTag::JacobiC => self.alpha,
            _ => f64::NAN,
        }
    }

    /// Classical family behind `P_n` (the continuous part of `c₀` for the kernel cases).
    pub fn p_family(&self) -> Family {
        let (a, b) = (self.alpha, self.beta);
        match self.tag {
            CaseTag::LaguerreA => lag(a - 1.0),
            CaseTag::LaguerreB => lag(0.0),
            CaseTag::LaguerreC => lag(a),
            CaseTag::JacobiA => jac(a - 1.0, b - 1.0),
            CaseTag::JacobiB => jac(0.0, b - 1.0),
            CaseTag::JacobiC => jac(a - 1.0, 0.0),
            CaseTag::JacobiD => jac(a, b),
        }
    }

    /// Classical family behind `T_n`.
    pub fn t_family(&self) -> Family {
        let (a, b) = (self.alpha, self.beta);
        match self.tag {
            CaseTag::LaguerreA => lag(a),
            CaseTag::LaguerreB => lag(0.0),
            CaseTag::LaguerreC => lag(a + 1.0),
            CaseTag::JacobiA => jac(a, b),
            CaseTag::JacobiB => jac(0.0, b),
            CaseTag::JacobiC => jac(a, 0.0),
            CaseTag::JacobiD => jac(a + 1.0, b + 1.0),
        }
    }

    /// Location of the `c₀` atom for the point-mass cases.
    fn atom(&self) -> f64 {
        match self.tag {
            CaseTag::JacobiB => 1.0,
            CaseTag::JacobiC => -1.0,
            _ => 0.0,
        }
    }

    /// Case grammar form, e.g. `laguerre-b M=1`.
    pub fn spec_string(&self) -> String {
        let mut s = self.tag.name().to_string();
        for k in self.tag.keys() {
            let v = match *k {
                "alpha" => self.alpha,
                "beta" => self.beta,
                "xi" => self.xi,
                _ => self.mass,
            };
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }
}

impl fmt::Display for CoherentCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

fn lag(a: f64) -> Family {
    Family::Laguerre(crate::orthopoly::LaguerreParams { alpha: a })
}

fn jac(a: f64, b: f64) -> Family {
    Family::Jacobi(crate::orthopoly::JacobiParams { alpha: a, beta: b })
}

/// `σ_n`, `ln k_n⁽⁰⁾`, `ln k_n⁽¹⁾` for `n = 0..=n_max` (`σ_0` unused).
#[derive(Debug, Clone, PartialEq)]
pub struct PairData {
    pub case: CoherentCase,
    pub n_max: usize,
    sigma: Vec<f64>,
    log_k0: Vec<f64>,
    log_k1: Vec<f64>,
    /// `r_n = Q_{n+1}(ξ)/Q_n(ξ)` for the Christoffel cases.
    ratios: Option<Vec<f64>>,
    /// Moments `c₁(T-family)` for LaguerreC and JacobiD.
    pub moments: Option<MomentSequence>,
}

fn ensure_positive(what: &str, n: usize, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DegenerateFunctional(format!("{what}: expected a positive quantity at n = {n}, got {v}")))
    }
}

impl PairData {
    /// Precomputes the pair data up to degree `n_max`.
    pub fn new(case: CoherentCase, n_max: usize) -> Result<PairData> {
        let n_top = n_max;
        let mut sigma = vec![f64::NAN; n_top + 1];
        let mut log_k0 = vec![0.0; n_top + 1];
        let mut log_k1 = vec![0.0; n_top + 1];
        let mut ratios = None;
        let mut moments = None;
        let (a, b, xi, m) = (case.alpha, case.beta, case.xi, case.mass);
        match case.tag {
            CaseTag::LaguerreA => {
                let r = lag(a - 1.0).ratios(n_top, xi);
                for n in 0..=n_top {
                    let neg = ensure_positive("laguerre-a k0 sign pattern", n, -r[n])?;
                    log_k0[n] = ln_factorial(n) + ln_gamma(a + n as f64) + neg.ln();
                    log_k1[n] = lag(a).log_norm(n);
                    if n >= 1 {
                        sigma[n] = n as f64 * (n as f64 + a) / r[n];
                    }
                }
                ratios = Some(r);
            }
            CaseTag::LaguerreB => {
                for n in 0..=n_top {
                    let nf = n as f64;
                    log_k0[n] = 2.0 * ln_factorial(n) + ((nf + 1.0) * m + 1.0).ln() - (nf * m + 1.0).ln();
                    log_k1[n] = 2.0 * ln_factorial(n);
                    if n >= 1 {
                        sigma[n] = -nf * (1.0 + nf * m) / ((nf + 1.0) * m + 1.0);
                    }
                }
            }
            CaseTag::LaguerreC => {
                let t = laguerre_c_moments(a, xi, m, n_top)?;
                let up = lag(a + 1.0);
                for n in 0..=n_top {
                    log_k0[n] = lag(a).log_norm(n);
                    if n == 0 {
                        ensure_positive("laguerre-c c1(1)", 0, f64::from(t.get(0).sign))?;
                        log_k1[0] = t.get(0).ln_abs;
                    } else {
                        let q = t.get(n).div(t.get(n - 1));
                        ensure_positive("laguerre-c moment ratio sign", n, -f64::from(q.sign))?;
                        sigma[n] = q.to_f64();
                        log_k1[n] = up.log_norm(n - 1) + q.ln_abs;
                    }
                }
                moments = Some(t);
            }
            CaseTag::JacobiA => {
                let eps = case.epsilon();
                let fam = jac(a - 1.0, b - 1.0);
                let r = fam.ratios(n_top + 1, xi);
                for n in 0..=n_top {
                    let v = ensure_positive("jacobi-a k0 sign pattern", n, -eps * r[n])?;
                    log_k0[n] = fam.log_norm(n) + v.ln();
                    log_k1[n] = jac(a, b).log_norm(n);
                    if n >= 1 {
                        let (_, c_next) = jacobi_coeffs(a - 1.0, b - 1.0, n + 1);
                        sigma[n] = n as f64 / (n as f64 + 1.0) * c_next / r[n];
                    }
                }
                ratios = Some(r);
            }
            CaseTag::JacobiB | CaseTag::JacobiC => {
                let g = case.gamma();
                let eps = case.epsilon();
                let big_d = |n: f64| 2f64.powf(g) + n * m * (n - 1.0 + g);
                let base = jac(0.0, g - 1.0);
                for n in 0..=n_top {
                    let nf = n as f64;
                    log_k0[n] = base.log_norm(n) + big_d(nf + 1.0).ln() - big_d(nf).ln();
                    log_k1[n] = jac(0.0, g).log_norm(n);
                    if n >= 1 {
                        sigma[n] = eps * 2.0 * nf * (nf + g) * big_d(nf)
                            / ((2.0 * nf + g) * (2.0 * nf + g + 1.0) * big_d(nf + 1.0));
                    }
                }
            }
            CaseTag::JacobiD => {
                let eps = case.epsilon();
                let u = jacobi_d_moments(a, b, xi, eps, m, n_top)?;
                let up = jac(a + 1.0, b + 1.0);
                for n in 0..=n_top {
                    log_k0[n] = jac(a, b).log_norm(n);
                    if n == 0 {
                        ensure_positive("jacobi-d c1(1)", 0, f64::from(u.get(0).sign))?;
                        log_k1[0] = u.get(0).ln_abs;
                    } else {
                        let q = u.get(n).div(u.get(n - 1));
                        ensure_positive("jacobi-d moment ratio sign", n, -eps * f64::from(q.sign))?;
                        sigma[n] = q.to_f64();
                        log_k1[n] = up.log_norm(n - 1) + q.ln_abs;
                    }
                }
                moments = Some(u);
            }
        }
        for n in 1..=n_top {
            if sigma[n] == 0.0 || !sigma[n].is_finite() {
                return Err(Error::DegenerateFunctional(format!("sigma_{n} = {} for {case}", sigma[n])));
            }
        }
        Ok(PairData { case, n_max: n_top, sigma, log_k0, log_k1, ratios, moments })
    }

    /// `σ_n`, `n ≥ 1`.
    pub fn sigma(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.n_max, "sigma index {n} outside 1..={}", self.n_max);
        self.sigma[n]
    }

    pub fn log_k0(&self, n: usize) -> f64 {
        self.log_k0[n]
    }

    pub fn log_k1(&self, n: usize) -> f64 {
        self.log_k1[n]
    }

    /// `(P_n(x), P'_n(x))`, `n ≤ n_max`.
    pub fn p_eval(&self, n: usize, x: f64) -> (f64, f64) {
        if n == 0 {
            return (1.0, 0.0);
        }
        let case = &self.case;
        let fam = case.p_family();
        match case.tag {
            CaseTag::LaguerreC | CaseTag::JacobiD => {
                let (v, d) = fam.eval_with_derivative(n, x);
                (v[n], d[n])
            }
            CaseTag::LaguerreA | CaseTag::JacobiA => {
                let r = self.ratios.as_ref().expect("ratios present for Christoffel cases");
                let xi = case.xi;
                if (x - xi).abs() < 1e-8 * (1.0 + xi.abs()) {
                    // kernel form: Σ_j Q_j(x) (Q_j(ξ)/Q_n(ξ)) (k_n/k_j)
                    let (v, d) = fam.eval_with_derivative(n, x);
                    let ln_kn = fam.log_norm(n);
                    let mut inv_ratio = 1.0;
                    let (mut p, mut dp) = (0.0, 0.0);
                    for j in (0..=n).rev() {
                        if j < n {
                            inv_ratio /= r[j];
                        }
                        let c = inv_ratio * (ln_kn - fam.log_norm(j)).exp();
                        p += c * v[j];
                        dp += c * d[j];
                    }
                    (p, dp)
                } else {
                    let (v, d) = fam.eval_with_derivative(n + 1, x);
                    let h = x - xi;
                    let p = (v[n + 1] - r[n] * v[n]) / h;
                    let dp = (d[n + 1] - r[n] * d[n] - p) / h;
                    (p, dp)
                }
            }
            CaseTag::LaguerreB | CaseTag::JacobiB | CaseTag::JacobiC => {
                let (v, d) = fam.eval_with_derivative(n, x);
                if n == 0 || case.mass == 0.0 {
                    return (v[n], d[n]);
                }
                let x0 = case.atom();
                let at = fam.eval_plain(n, x0);
                let (mut k, mut kd, mut k00) = (0.0, 0.0, 0.0);
                for j in 0..n {
                    let inv = (-fam.log_norm(j)).exp();
                    k += v[j] * at[j] * inv;
                    kd += d[j] * at[j] * inv;
                    k00 += at[j] * at[j] * inv;
                }
                let c = case.mass * at[n] / (1.0 + case.mass * k00);
                (v[n] - c * k, d[n] - c * kd)
            }
        }
    }

    /// `(T_n(x), T'_n(x))`, `n ≤ n_max`.
    pub fn t_eval(&self, n: usize, x: f64) -> (f64, f64) {
        let fam = self.case.t_family();
        let (v, d) = fam.eval_with_derivative(n, x);
        match self.case.tag {
            CaseTag::LaguerreC | CaseTag::JacobiD if n >= 1 => {
                let s = self.sigma[n];
                (v[n] - s * v[n - 1], d[n] - s * d[n - 1])
            }
            _ => (v[n], d[n]),
        }
    }

    /// `T_n(x) - [P'_{n+1}(x)/(n+1) - σ_n P'_n(x)/n]`, `1 ≤ n < n_max`.
    pub fn coherence_residual(&self, n: usize, x: f64) -> f64 {
        assert!(n >= 1 && n < self.n_max, "coherence needs 1 <= n < n_max");
        let (t, _) = self.t_eval(n, x);
        let (_, dp1) = self.p_eval(n + 1, x);
        let (_, dp) = self.p_eval(n, x);
        t - (dp1 / (n as f64 + 1.0) - self.sigma[n] * dp / n as f64)
    }
}

/// `σ_n` for a case.
pub fn sigma(case: &CoherentCase, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameters("sigma_n is defined for n >= 1".into()));
    }
    Ok(PairData::new(*case, n)?.sigma(n))
}

pub fn log_k0(case: &CoherentCase, n: usize) -> Result<f64> {
    Ok(PairData::new(*case, n)?.log_k0(n))
}

pub fn log_k1(case: &CoherentCase, n: usize) -> Result<f64> {
    Ok(PairData::new(*case, n)?.log_k1(n))
}

pub fn p_eval(case: &CoherentCase, n: usize, x: f64) -> Result<f64> {
    Ok(PairData::new(*case, n.max(1))?.p_eval(n, x).0)
}

pub fn t_eval(case: &CoherentCase, n: usize, x: f64) -> Result<f64> {
    Ok(PairData::new(*case, n.max(1))?.t_eval(n, x).0)
}

pub fn coherence_residual(case: &CoherentCase, n: usize, x: f64) -> Result<f64> {
    Ok(PairData::new(*case, n + 1)?.coherence_residual(n, x))
}
