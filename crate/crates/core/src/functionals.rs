//! Linear functionals realised numerically: Gauss rules for the classical
//! weights, rules for the non-classical `c₁` densities, point masses, and the
//! moment sequences `c₁(L_n^{α+1})` and `c₁(P_n^{(α+1,β+1)})`.

use serde::{Deserialize, Serialize};

use crate::coherent::{CaseTag, CoherentCase};
use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, ln_gamma, ln_pochhammer, log_add_exp, rel_diff, SignedLog};
use crate::orthopoly::{jacobi_log_norm, Family, JacobiParams, LaguerreParams};

/// Largest node count used by the doubling loop.
pub const MAX_NODES: usize = 512;
/// Agreement required between successive node counts.
pub const CONVERGENCE_TOL: f64 = 1e-10;
/// Cross-validation tolerance between independent moment paths.
pub const CROSS_TOL: f64 = 1e-7;
/// Highest degree cross-validated against quadrature.
pub const CROSS_CHECK_MAX: usize = 40;

/// Nodes and weights for the continuous part of a functional, plus an optional atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `(location, mass)`.
    pub point_mass: Option<(f64, f64)>,
    /// Polynomial degree integrated exactly, when the rule is a Gauss rule.
    pub exact_degree: Option<usize>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn with_point_mass(mut self, loc: f64, mass: f64) -> Self {
        self.point_mass = if mass > 0.0 { Some((loc, mass)) } else { None };
        self
    }

    /// `Σ wᵢ f(xᵢ) s(xᵢ) + M f(loc)`. The smooth factor never touches the atom.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F, smooth: Option<&dyn Fn(f64) -> f64>) -> f64 {
        let mut s = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            s += match smooth {
                Some(g) => w * v * g(x),
                None => w * v,
            };
        }
        if let Some((loc, m)) = self.point_mass {
            s += m * f(loc);
        }
        s
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
/// `d` holds the diagonal, `e[i]` couples `i` and `i+1`; `d` is overwritten.
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence("QL iteration for quadrature nodes".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// `p_m(x) / p'_m(x)` with renormalisation so large nodes do not overflow.
fn newton_ratio(family: &Family, m: usize, x: f64) -> f64 {
    let (mut p0, mut p1, mut d0, mut d1) = (0.0, 1.0, 0.0, 0.0);
    for k in 0..m {
        let (bk, ck) = family.coeffs(k);
        let p2 = (x - bk) * p1 - ck * p0;
        let d2 = p1 + (x - bk) * d1 - ck * d0;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
        let big = p1.abs().max(d1.abs());
        if big > 1e150 || (big < 1e-150 && big > 0.0) {
            let f = 1.0 / big;
            p0 *= f;
            p1 *= f;
            d0 *= f;
            d1 *= f;
        }
    }
    p1 / d1
}

/// `ln Σ_{k<m} p_k(x)² / k_k` (Christoffel function reciprocal).
fn ln_christoffel_sum(family: &Family, m: usize, x: f64) -> f64 {
    let mut q0 = 0.0;
    let mut q1 = (-0.5 * family.log_norm(0)).exp();
    let mut sum = q1 * q1;
    let mut ln_scale = 0.0;
    for k in 0..m - 1 {
        let (bk, ck) = family.coeffs(k);
        let (_, ck1) = family.coeffs(k + 1);
        let q2 = ((x - bk) * q1 - ck.sqrt() * q0) / ck1.sqrt();
        q0 = q1;
        q1 = q2;
        sum += q1 * q1;
        if sum > 1e200 {
            let f = 1e-100;
            q0 *= f;
            q1 *= f;
            sum *= f * f;
            ln_scale += 200.0 * std::f64::consts::LN_10;
        }
    }
    sum.ln() + ln_scale
}

/// Gauss rule with `m` nodes for a classical weight (Golub–Welsch with Newton polishing).
pub fn gauss_rule(family: Family, m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::InvalidParameters("a Gauss rule needs at least one node".into()));
    }
    let mut d: Vec<f64> = (0..m).map(|k| family.coeffs(k).0).collect();
    let mut e: Vec<f64> = (1..=m).map(|k| if k < m { family.coeffs(k).1.sqrt() } else { 0.0 }).collect();
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(|a, b| a.total_cmp(b));
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (i, &x0) in d.iter().enumerate() {
        let mut x = x0;
        let gap = {
            let lo = if i > 0 { x0 - d[i - 1] } else { f64::INFINITY };
            let hi = if i + 1 < m { d[i + 1] - x0 } else { f64::INFINITY };
            lo.min(hi)
        };
        for _ in 0..3 {
            let step = newton_ratio(&family, m, x);
            if !step.is_finite() || step.abs() > 0.1 * gap.min(1.0 + x.abs()) {
                break;
            }
            x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
                break;
            }
        }
        let w = (-ln_christoffel_sum(&family, m, x)).exp();
        if w > 0.0 && w.is_finite() {
            nodes.push(x);
            weights.push(w);
        }
    }
    Ok(QuadratureRule { nodes, weights, point_mass: None, exact_degree: Some(2 * m - 1) })
}

/// Density factor multiplying the classical weight of a rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SmoothFactor {
    One,
    /// `ε (x - ξ)`.
    Linear {
        eps: f64,
        xi: f64,
    },
    /// `1 / (ε (x - ξ))`.
    Inverse {
        eps: f64,
        xi: f64,
    },
}

impl SmoothFactor {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SmoothFactor::One => 1.0,
            SmoothFactor::Linear { eps, xi } => eps * (x - xi),
            SmoothFactor::Inverse { eps, xi } => 1.0 / (eps * (x - xi)),
        }
    }

    fn extra_degree(&self) -> usize {
        match self {
            SmoothFactor::Linear { .. } => 1,
            _ => 0,
        }
    }
}

/// Composite rule for `x^{α+1} e^{-x}` on `(0, ∞)` resolving a nearby pole at `ξ < 0`:
/// Gauss–Jacobi on `[0, h]`, geometric Gauss–Legendre panels on `[h, 1]`,
/// shifted Gauss–Laguerre on `[1, ∞)`, with `h = min(|ξ|, 1)`.
pub fn laguerre_c_composite_rule(alpha: f64, xi: f64, m: usize) -> Result<QuadratureRule> {
    let h = (-xi).min(1.0);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let head = gauss_rule(Family::Jacobi(JacobiParams::new(0.0, alpha + 1.0)?), m)?;
    let c = (h / 2.0).powf(alpha + 2.0);
    for (&t, &w) in head.nodes.iter().zip(&head.weights) {
        let x = h * (1.0 + t) / 2.0;
        nodes.push(x);
        weights.push(c * w * (-x).exp());
    }
    let legendre = gauss_rule(Family::Jacobi(JacobiParams::new(0.0, 0.0)?), m)?;
    let mut a = h;
    while a < 1.0 {
        let b = (2.0 * a).min(1.0);
        let half = (b - a) / 2.0;
        for (&t, &w) in legendre.nodes.iter().zip(&legendre.weights) {
            let x = a + half * (1.0 + t);
            nodes.push(x);
            weights.push(half * w * x.powf(alpha + 1.0) * (-x).exp());
        }
        a = b;
    }
    let tail = gauss_rule(Family::Laguerre(LaguerreParams::new(0.0)?), m)?;
    let e1 = (-1.0f64).exp();
    for (&y, &w) in tail.nodes.iter().zip(&tail.weights) {
        let x = 1.0 + y;
        nodes.push(x);
        weights.push(w * e1 * x.powf(alpha + 1.0));
    }
    Ok(QuadratureRule { nodes, weights, point_mass: None, exact_degree: None })
}

/// How the continuous part of a functional is discretised.
#[derive(Debug, Clone, Copy, PartialEq)]
enum RuleKind {
    Gauss(Family),
    LaguerreComposite { alpha: f64, xi: f64 },
}

impl RuleKind {
    fn build(&self, m: usize) -> Result<QuadratureRule> {
        match *self {
            RuleKind::Gauss(f) => gauss_rule(f, m),
            RuleKind::LaguerreComposite { alpha, xi } => laguerre_c_composite_rule(alpha, xi, m),
        }
    }
}

/// A functional `f ↦ ∫ f s dμ + M f(loc)` ready for repeated evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    pub rule: QuadratureRule,
    pub smooth: SmoothFactor,
}

impl Functional {
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let s = self.smooth;
        match s {
            SmoothFactor::One => self.rule.apply(f, None),
            _ => self.rule.apply(f, Some(&move |x| s.eval(x))),
        }
    }

    /// Continuous part only.
    pub fn apply_continuous<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut s = 0.0;
        for (&x, &w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            s += w * f(x) * self.smooth.eval(x);
        }
        s
    }

    /// Builds a functional exact (or converged) for integrands of total degree `degree`.
    fn build(kind: RuleKind, smooth: SmoothFactor, probe: Family, degree: usize) -> Result<Functional> {
        let needs_doubling = matches!(smooth, SmoothFactor::Inverse { .. }) || !matches!(kind, RuleKind::Gauss(_));
        if !needs_doubling {
            let m = (degree + smooth.extra_degree()) / 2 + 2;
            if m > 4 * MAX_NODES {
                return Err(Error::QuadratureBudget(format!("degree {degree} needs {m} nodes")));
            }
            return Ok(Functional { rule: kind.build(m)?, smooth });
        }
        let k = degree / 2;
        let ln_kk = probe.log_norm(k);
        let probes = |r: &QuadratureRule| -> [f64; 2] {
            let f = Functional { rule: r.clone(), smooth };
            let one = f.apply_continuous(|_| 1.0);
            let sq = f.apply_continuous(|x| {
                let v = probe.value_scaled(k, x);
                if v.mantissa == 0.0 {
                    0.0
                } else {
                    (2.0 * v.ln_abs() - ln_kk).exp()
                }
            });
            [one, sq]
        };
        let mut m = (degree / 2 + 15).min(MAX_NODES);
        let mut rule = kind.build(m)?;
        let mut prev = probes(&rule);
        loop {
            if m >= MAX_NODES {
                return Err(Error::QuadratureBudget(format!(
                    "no agreement to {CONVERGENCE_TOL:e} within {MAX_NODES} nodes (degree {degree})"
                )));
            }
            m = (2 * m).min(MAX_NODES);
            let next_rule = kind.build(m)?;
            let next = probes(&next_rule);
            let agree = prev.iter().zip(&next).all(|(a, b)| rel_diff(*a, *b) <= CONVERGENCE_TOL);
            rule = next_rule;
            prev = next;
            if agree {
                break;
            }
        }
        Ok(Functional { rule, smooth })
    }

    /// The functional `c₀` or `c₁` of a case, for integrands of degree ≤ `degree`.
    pub fn for_case(case: &CoherentCase, side: Side, degree: usize) -> Result<Functional> {
        let (a, b, xi, mass) = (case.alpha, case.beta, case.xi, case.mass);
        let eps = case.epsilon();
        let lag = |al: f64| -> Result<Family> { Family::laguerre(al) };
        let jac = |al: f64, be: f64| -> Result<Family> { Family::jacobi(al, be) };
        let gauss = |f: Family, s: SmoothFactor| Functional::build(RuleKind::Gauss(f), s, f, degree);
        let with_mass = |f: Result<Functional>, loc: f64| -> Result<Functional> {
            let mut f = f?;
            f.rule = f.rule.with_point_mass(loc, mass);
            Ok(f)
        };
        match (case.tag, side) {
            (CaseTag::LaguerreA, Side::C0) => gauss(lag(a - 1.0)?, SmoothFactor::Linear { eps: 1.0, xi }),
            (CaseTag::LaguerreA, Side::C1) => gauss(lag(a)?, SmoothFactor::One),
            (CaseTag::LaguerreB, Side::C0) => with_mass(gauss(lag(0.0)?, SmoothFactor::One), 0.0),
            (CaseTag::LaguerreB, Side::C1) => gauss(lag(0.0)?, SmoothFactor::One),
            (CaseTag::LaguerreC, Side::C0) => gauss(lag(a)?, SmoothFactor::One),
            (CaseTag::LaguerreC, Side::C1) => {
                if xi == 0.0 {
                    with_mass(gauss(lag(a)?, SmoothFactor::One), 0.0)
                } else {
                    let f = Functional::build(
                        RuleKind::LaguerreComposite { alpha: a, xi },
                        SmoothFactor::Inverse { eps: 1.0, xi },
                        lag(a + 1.0)?,
                        degree,
                    );
                    with_mass(f, xi)
                }
            }
            (CaseTag::JacobiA, Side::C0) => gauss(jac(a - 1.0, b - 1.0)?, SmoothFactor::Linear { eps, xi }),
            (CaseTag::JacobiA, Side::C1) => gauss(jac(a, b)?, SmoothFactor::One),
            (CaseTag::JacobiB, Side::C0) => with_mass(gauss(jac(0.0, b - 1.0)?, SmoothFactor::One), 1.0),
            (CaseTag::JacobiB, Side::C1) => gauss(jac(0.0, b)?, SmoothFactor::One),
            (CaseTag::JacobiC, Side::C0) => with_mass(gauss(jac(a - 1.0, 0.0)?, SmoothFactor::One), -1.0),
            (CaseTag::JacobiC, Side::C1) => gauss(jac(a, 0.0)?, SmoothFactor::One),
            (CaseTag::JacobiD, Side::C0) => gauss(jac(a, b)?, SmoothFactor::One),
            (CaseTag::JacobiD, Side::C1) => {
                if xi == 1.0 {
                    with_mass(gauss(jac(a, b + 1.0)?, SmoothFactor::One), xi)
                } else if xi == -1.0 {
                    with_mass(gauss(jac(a + 1.0, b)?, SmoothFactor::One), xi)
                } else {
                    let fam = jac(a + 1.0, b + 1.0)?;
                    let f = Functional::build(RuleKind::Gauss(fam), SmoothFactor::Inverse { eps, xi }, fam, degree);
                    with_mass(f, xi)
                }
            }
        }
    }
}

/// Which functional of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    C0,
    C1,
}

/// Polynomial in the monomial basis, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly { coeffs: vec![0.0] };
        }
        Poly { coeffs: self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect() }
    }
}

/// `c(p q)` for the chosen functional of a case.
pub fn functional_apply(case: &CoherentCase, which: Side, p: &Poly, q: &Poly) -> Result<f64> {
    let f = Functional::for_case(case, which, p.degree() + q.degree())?;
    Ok(f.apply(|x| p.eval(x) * q.eval(x)))
}

/// Provenance of a moment sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentMethod {
    ClosedForm,
    BackwardRecurrence,
    Quadrature,
}

/// Signed log-magnitudes of `c₁(q_n)`, `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    pub values: Vec<SignedLog>,
    pub method: MomentMethod,
}

impl MomentSequence {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> SignedLog {
        self.values[n]
    }

    /// `value(n) / value(n-1)`.
    pub fn ratio(&self, n: usize) -> f64 {
        self.values[n].div(self.values[n - 1]).to_f64()
    }
}

/// Minimal solution ratios `ρ_n = y_n / y_{n-1}`, `n = 1..=n_max`, of
/// `y_{n+1} = (ξ - b_n) y_n - c_n y_{n-1}` by Miller's algorithm in continued-fraction form.
/// The start index doubles until the ratios settle to 1e-14.
pub fn minimal_ratios(family: &Family, xi: f64, n_max: usize) -> Result<Vec<f64>> {
    let run = |start: usize| -> Vec<f64> {
        let mut rho = vec![0.0; n_max + 1];
        let mut next = 0.0;
        for n in (1..=start).rev() {
            let (bn, cn) = family.coeffs(n);
            let r = cn / ((xi - bn) - next);
            if n <= n_max {
                rho[n] = r;
            }
            next = r;
        }
        rho
    };
    let mut start = 2 * n_max + 64;
    let mut prev = run(start);
    for _ in 0..26 {
        start *= 2;
        let cur = run(start);
        let settled = (1..=n_max).all(|n| rel_diff(prev[n], cur[n]) <= 1e-14);
        prev = cur;
        if settled {
            return Ok(prev);
        }
    }
    Err(Error::NoConvergence(format!("backward recurrence did not settle at xi = {xi}")))
}

/// Squared-form quadrature of `c̃(q_n) = ∫ q_n² dμ̃ / q_n(ξ)` for `n ≤ n_max`.
fn squared_form_moments(f: &Functional, family: &Family, xi: f64, n_max: usize) -> Vec<f64> {
    let ln_at_xi = family.eval(n_max, xi);
    (0..=n_max)
        .map(|n| {
            let den = ln_at_xi.get(n);
            let num = f.apply_continuous(|x| {
                let v = family.value_scaled(n, x);
                if v.mantissa == 0.0 {
                    return 0.0;
                }
                (2.0 * v.ln_abs() - den.ln_abs()).exp()
            });
            f64::from(den.signum()) * num
        })
        .collect()
}

fn cross_validate(values: &[SignedLog], reference: &[f64], what: &str) -> Result<()> {
    for (n, r) in reference.iter().enumerate() {
        let v = values[n];
        let r = SignedLog::from_f64(*r);
        let ok = v.sign == r.sign && (v.ln_abs - r.ln_abs).abs() <= CROSS_TOL;
        if !ok {
            return Err(Error::LossOfSignificance(format!(
                "{what}: moment {n} disagrees with quadrature ({} vs {})",
                v.to_f64(),
                r.to_f64()
            )));
        }
    }
    Ok(())
}

/// `t_n = c₁(L_n^{α+1})` for the LaguerreC functional, `n = 0..=n_max`.
pub fn laguerre_c_moments(alpha: f64, xi: f64, mass: f64, n_max: usize) -> Result<MomentSequence> {
    if !(alpha > -1.0) || !(xi <= 0.0) || !(mass >= 0.0) {
        return Err(Error::InvalidParameters(format!(
            "LaguerreC moments need alpha > -1, xi <= 0, M >= 0 (got {alpha}, {xi}, {mass})"
        )));
    }
    let up = Family::laguerre(alpha + 1.0)?;
    if xi == 0.0 {
        let values = (0..=n_max)
            .map(|n| {
                let classical = ln_factorial(n) + ln_gamma(alpha + 1.0);
                let ln = if mass > 0.0 {
                    log_add_exp(classical, mass.ln() + ln_pochhammer(alpha + 2.0, n))
                } else {
                    classical
                };
                SignedLog::new(if n % 2 == 0 { 1 } else { -1 }, ln)
            })
            .collect();
        return Ok(MomentSequence { values, method: MomentMethod::ClosedForm });
    }
    let rho = minimal_ratios(&up, xi, n_max)?;
    let check = n_max.min(CROSS_CHECK_MAX);
    let f = Functional::build(
        RuleKind::LaguerreComposite { alpha, xi },
        SmoothFactor::Inverse { eps: 1.0, xi },
        up,
        2 * check,
    )?;
    let t0 = f.apply_continuous(|_| 1.0);
    let values = combine_with_mass(t0, &rho, &up, xi, mass, n_max);
    let tilde = minimal_values(t0, &rho);
    cross_validate(&tilde, &squared_form_moments(&f, &up, xi, check), "LaguerreC")?;
    Ok(MomentSequence { values, method: MomentMethod::BackwardRecurrence })
}

fn minimal_values(y0: f64, rho: &[f64]) -> Vec<SignedLog> {
    let mut out = Vec::with_capacity(rho.len());
    let mut cur = SignedLog::from_f64(y0);
    out.push(cur);
    for &r in &rho[1..] {
        cur = cur.mul(SignedLog::from_f64(r));
        out.push(cur);
    }
    out
}

/// `ỹ_n + M q_n(ξ)`; both terms carry the sign of `q_n(ξ)`.
fn combine_with_mass(y0: f64, rho: &[f64], family: &Family, xi: f64, mass: f64, n_max: usize) -> Vec<SignedLog> {
    let tilde = minimal_values(y0, rho);
    if mass == 0.0 {
        return tilde;
    }
    let at = family.eval(n_max, xi);
    tilde
        .into_iter()
        .enumerate()
        .map(|(n, t)| t.add(SignedLog::from_f64(mass).mul(at.get(n).to_signed_log())))
        .collect()
}

/// `u_n = c₁(P_n^{(α+1,β+1)})` for the JacobiD functional, `n = 0..=n_max`.
pub fn jacobi_d_moments(alpha: f64, beta: f64, xi: f64, eps: f64, mass: f64, n_max: usize) -> Result<MomentSequence> {
    if !(alpha > -1.0 && beta > -1.0) || !(xi.abs() >= 1.0) || !(mass >= 0.0) {
        return Err(Error::InvalidParameters(format!(
            "JacobiD moments need alpha, beta > -1, |xi| >= 1, M >= 0 (got {alpha}, {beta}, {xi}, {mass})"
        )));
    }
    let up = Family::jacobi(alpha + 1.0, beta + 1.0)?;
    if xi.abs() == 1.0 {
        // ξ = -1 is the mirror of ξ = 1 with α, β swapped and sign (-1)^n.
        let (a, b) = if xi == 1.0 { (alpha, beta) } else { (beta, alpha) };
        let ln2 = std::f64::consts::LN_2;
        let ln_u0 = jacobi_log_norm(JacobiParams { alpha: a, beta: b + 1.0 }, 0);
        let values: Vec<SignedLog> = (0..=n_max)
            .map(|n| {
                let nf = n as f64;
                let cont =
                    ln_u0 + nf * ln2 + ln_factorial(n) + ln_pochhammer(b + 2.0, n) - ln_pochhammer(a + b + 3.0, 2 * n);
                let ln = if mass > 0.0 {
                    let at_one = nf * ln2 + ln_pochhammer(a + 2.0, n) - ln_pochhammer(nf + a + b + 3.0, n);
                    log_add_exp(cont, mass.ln() + at_one)
                } else {
                    cont
                };
                let sign = if xi == 1.0 || n % 2 == 0 { 1 } else { -1 };
                SignedLog::new(sign, ln)
            })
            .collect();
        let check = n_max.min(CROSS_CHECK_MAX);
        let base = if xi == 1.0 { Family::jacobi(alpha, beta + 1.0)? } else { Family::jacobi(alpha + 1.0, beta)? };
        let rule = gauss_rule(base, check + 2)?;
        let reference: Vec<f64> = (0..=check)
            .map(|n| rule.apply(|x| up.eval_plain(n, x)[n], None) + mass * up.eval_plain(n, xi)[n])
            .collect();
        cross_validate(&values, &reference, "JacobiD closed form")?;
        return Ok(MomentSequence { values, method: MomentMethod::ClosedForm });
    }
    let rho = minimal_ratios(&up, xi, n_max)?;
    let check = n_max.min(CROSS_CHECK_MAX);
    let f = Functional::build(RuleKind::Gauss(up), SmoothFactor::Inverse { eps, xi }, up, 2 * check)?;
    let u0 = f.apply_continuous(|_| 1.0);
    let values = combine_with_mass(u0, &rho, &up, xi, mass, n_max);
    let tilde = minimal_values(u0, &rho);
    cross_validate(&tilde, &squared_form_moments(&f, &up, xi, check), "JacobiD")?;
    Ok(MomentSequence { values, method: MomentMethod::BackwardRecurrence })
}

/// `c̃₁(1)` for LaguerreC (`ξ < 0`) by the converged composite rule.
pub fn laguerre_c_tilde_mass(alpha: f64, xi: f64) -> Result<f64> {
    let f = Functional::build(
        RuleKind::LaguerreComposite { alpha, xi },
        SmoothFactor::Inverse { eps: 1.0, xi },
        Family::laguerre(alpha + 1.0)?,
        0,
    )?;
    Ok(f.apply_continuous(|_| 1.0))
}

/// Largest relative disagreement between the moment sequence used by the
/// recurrence (closed form or stabilized backward recurrence) and direct
/// quadrature, for `n ≤ n_max`. LaguerreC and JacobiD only.
pub fn moment_cross_check(case: &CoherentCase, n_max: usize) -> Result<f64> {
    let (a, b, xi, mass) = (case.alpha, case.beta, case.xi, case.mass);
    let worst = |seq: &[SignedLog], reference: &[f64]| -> f64 {
        reference.iter().zip(seq).map(|(r, v)| rel_diff(v.to_f64(), *r)).fold(0.0, f64::max)
    };
    match case.tag {
        CaseTag::LaguerreC => {
            let up = Family::laguerre(a + 1.0)?;
            if xi == 0.0 {
                let seq = laguerre_c_moments(a, xi, mass, n_max)?;
                let rule = gauss_rule(Family::laguerre(a)?, n_max / 2 + 2)?;
                let reference: Vec<f64> = (0..=n_max)
                    .map(|n| rule.apply(|x| up.eval_plain(n, x)[n], None) + mass * up.eval_plain(n, 0.0)[n])
                    .collect();
                return Ok(worst(&seq.values, &reference));
            }
            let rho = minimal_ratios(&up, xi, n_max)?;
            let f = Functional::build(
                RuleKind::LaguerreComposite { alpha: a, xi },
                SmoothFactor::Inverse { eps: 1.0, xi },
                up,
                2 * n_max,
            )?;
            let tilde = minimal_values(f.apply_continuous(|_| 1.0), &rho);
            Ok(worst(&tilde, &squared_form_moments(&f, &up, xi, n_max)))
        }
        CaseTag::JacobiD => {
            let up = Family::jacobi(a + 1.0, b + 1.0)?;
            if xi.abs() == 1.0 {
                let seq = jacobi_d_moments(a, b, xi, case.epsilon(), mass, n_max)?;
                let base = if xi == 1.0 { Family::jacobi(a, b + 1.0)? } else { Family::jacobi(a + 1.0, b)? };
                let rule = gauss_rule(base, n_max / 2 + 2)?;
                let reference: Vec<f64> = (0..=n_max)
                    .map(|n| rule.apply(|x| up.eval_plain(n, x)[n], None) + mass * up.eval_plain(n, xi)[n])
                    .collect();
                return Ok(worst(&seq.values, &reference));
            }
            let rho = minimal_ratios(&up, xi, n_max)?;
            let f = Functional::build(
                RuleKind::Gauss(up),
                SmoothFactor::Inverse { eps: case.epsilon(), xi },
                up,
                2 * n_max,
            )?;
            let tilde = minimal_values(f.apply_continuous(|_| 1.0), &rho);
            Ok(worst(&tilde, &squared_form_moments(&f, &up, xi, n_max)))
        }
        _ => Err(Error::InvalidParameters(format!("{}: moments are classical", case.tag))),
    }
}

/// Forward run of the moment recurrence from two seeds; unstable for minimal solutions.
pub fn forward_moments(family: &Family, xi: f64, y0: f64, y1: f64, n_max: usize) -> Vec<f64> {
    let mut out = vec![y0, y1];
    for n in 1..n_max {
        let (bn, cn) = family.coeffs(n);
        let next = (xi - bn) * out[n] - cn * out[n - 1];
        out.push(next);
    }
    out.truncate(n_max + 1);
    out
}
