//! Smallest eigenvalue `μ₁,ₙ` of `K̃_n`: certified bisection, lower bounds
//! (Newton, Laguerre's method), qd upper bounds, closed-form LaguerreB bounds,
//! and the extremal polynomial.

use serde::{Deserialize, Serialize};

use crate::coherent::{CaseTag, CoherentCase, PairData};
use crate::error::{Error, Result};
use crate::numeric::{DoubleDouble, Scaled};
use crate::recurrence::{build_generic_from, RecurrenceSpec};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Bracket of `μ₁,ₙ` in extended range; `μ` may lie far below the smallest `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledInterval {
    pub lo: Scaled,
    pub hi: Scaled,
}

impl ScaledInterval {
    pub fn to_interval(&self) -> Interval {
        Interval { lo: self.lo.to_f64(), hi: self.hi.to_f64() }
    }

    /// `[ln lo, ln hi]`.
    pub fn ln(&self) -> Interval {
        let l = |v: Scaled| if v.is_zero() { f64::NEG_INFINITY } else { v.ln_abs() };
        Interval { lo: l(self.lo), hi: l(self.hi) }
    }
}

const MAX_BISECTION_STEPS: usize = 400;
const MAX_INVERSE_ITERATIONS: usize = 2000;
/// Overshoot of a computed bound past the certified bracket, in units of `n·ε`, treated as rounding.
const ROUNDING_SLACK: f64 = 64.0;

/// `K̃ = L Lᵀ` with `L` lower bidiagonal: diagonal `√q`, subdiagonal `√e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factors {
    pub q: Vec<f64>,
    pub e: Vec<f64>,
}

impl Factors {
    pub fn of(spec: &RecurrenceSpec) -> Result<Factors> {
        let (q, e) = spec.qd_start_or_pivots();
        let ok = q.len() == spec.n
            && q.iter().all(|&v| v > 0.0 && v.is_finite())
            && e.iter().all(|&v| v >= 0.0 && v.is_finite());
        if !ok {
            return Err(Error::Numerical("K̃ has a nonpositive eigenvalue".into()));
        }
        Ok(Factors { q, e })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Eigenvalues strictly below `lambda`, from the stationary qd transform of `LLᵀ - λI`.
    pub fn count_below(&self, lambda: Scaled) -> usize {
        if lambda.exponent.abs() < 960 {
            if let Some(c) = self.count_f64(lambda.to_f64()) {
                return c;
            }
        }
        self.count_scaled(lambda)
    }

    fn count_f64(&self, lam: f64) -> Option<usize> {
        let n = self.n();
        let mut s = -lam;
        let mut count = 0;
        for i in 0..n {
            let dp = self.q[i] + s;
            if !(dp.abs() >= 1e-290 && dp.is_finite()) {
                return None;
            }
            if dp < 0.0 {
                count += 1;
            }
            if i + 1 < n {
                s = self.e[i] * (s / dp) - lam;
            }
        }
        Some(count)
    }

    fn count_scaled(&self, lam: Scaled) -> usize {
        let n = self.n();
        let mut s = lam.neg();
        let mut count = 0;
        for i in 0..n {
            let mut dp = Scaled::from_f64(self.q[i]).add(s);
            if dp.is_zero() {
                dp = Scaled::new(-1.0, lam.exponent - 60);
            }
            if dp.signum() < 0 {
                count += 1;
            }
            if i + 1 < n {
                s = Scaled::from_f64(self.e[i]).mul(s.div(dp)).sub(lam);
            }
        }
        count
    }

    /// `(tr K̃⁻¹, ‖K̃⁻¹‖²_F)` as sums of positive terms, using `L⁻¹_{ij} = ±u_i v_j`.
    pub fn inverse_traces(&self) -> (Scaled, Scaled) {
        let n = self.n();
        let mut u = Vec::with_capacity(n);
        u.push(Scaled::from_f64(1.0));
        for i in 1..n {
            u.push(u[i - 1].mul(Scaled::from_f64(self.e[i - 1] / self.q[i])));
        }
        let v: Vec<Scaled> = (0..n).map(|i| Scaled::from_f64(1.0).div(u[i].mul(Scaled::from_f64(self.q[i])))).collect();
        let mut w = vec![Scaled::ZERO; n];
        let mut acc = Scaled::ZERO;
        for i in (0..n).rev() {
            acc = acc.add(u[i]);
            w[i] = acc;
        }
        let mut s1 = Scaled::ZERO;
        let mut s2 = Scaled::ZERO;
        let mut prefix = Scaled::ZERO;
        let two = Scaled::from_f64(2.0);
        for m in 0..n {
            s1 = s1.add(v[m].mul(w[m]));
            let inner = v[m].mul(v[m]).add(two.mul(v[m]).mul(prefix));
            s2 = s2.add(w[m].mul(w[m]).mul(inner));
            prefix = prefix.add(v[m]);
        }
        (s1, s2)
    }

    /// Newton step from zero, `1 / tr K̃⁻¹`.
    pub fn newton(&self) -> Scaled {
        Scaled::from_f64(1.0).div(self.inverse_traces().0)
    }

    /// Laguerre step from zero, `n / (S₁ (1 + √((n-1)(n S₂/S₁² - 1))))`.
    pub fn laguerre(&self) -> Scaled {
        let (s1, s2) = self.inverse_traces();
        let n = self.n() as f64;
        let r = s2.div(s1.mul(s1)).to_f64().min(1.0);
        let h = (n - 1.0) * (n * r - 1.0).max(0.0);
        Scaled::from_f64(n / (1.0 + h.sqrt())).div(s1)
    }

    /// Bisection on the count; geometric midpoints while `hi/lo > 2`.
    fn bisect(&self, upper: f64, tol: f64) -> Result<ScaledInterval> {
        let n = self.n();
        if n == 1 {
            let v = Scaled::from_f64(self.q[0]);
            return Ok(ScaledInterval { lo: v, hi: v });
        }
        let mut lo = self.newton();
        let half = Scaled::from_f64(0.5);
        let mut tries = 0;
        while self.count_below(lo) != 0 {
            lo = lo.mul(half);
            tries += 1;
            if tries > 64 {
                lo = Scaled::ZERO;
                break;
            }
        }
        let mut hi = Scaled::from_f64(upper.min(self.q[n - 1] * (1.0 + 1e-12)));
        if self.count_below(hi) < 1 {
            hi = Scaled::from_f64(upper);
        }
        if self.count_below(hi) < 1 {
            return Err(Error::Numerical("Gershgorin bound does not bracket the spectrum".into()));
        }
        let tol_s = Scaled::from_f64(tol);
        for _ in 0..MAX_BISECTION_STEPS {
            if !tol_s.mul(hi).lt(hi.sub(lo)) {
                return Ok(ScaledInterval { lo, hi });
            }
            let mid =
                if !lo.is_zero() && hi.exponent - lo.exponent > 1 { lo.mul(hi).sqrt() } else { lo.add(hi).mul(half) };
            if !lo.lt(mid) || !mid.lt(hi) {
                return Ok(ScaledInterval { lo, hi });
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::NoConvergence(format!(
            "bisection after {MAX_BISECTION_STEPS} steps: [{:e}, {:e}]",
            lo.to_f64(),
            hi.to_f64()
        )))
    }
}

/// Number of eigenvalues of `K̃` strictly below `lambda`.
pub fn inertia_count(spec: &RecurrenceSpec, lambda: f64) -> usize {
    match Factors::of(spec) {
        Ok(f) => f.count_below(Scaled::from_f64(lambda)),
        Err(_) => entry_count(spec, lambda),
    }
}

/// Negative pivots of the LDLᵀ factorization of `K̃ - λI` built from the entries.
fn entry_count(spec: &RecurrenceSpec, lambda: f64) -> usize {
    let pivmin = f64::MIN_POSITIVE * 1e10;
    let mut count = 0;
    let mut p = 1.0;
    for i in 0..spec.n {
        let o = if i > 0 { spec.offdiag_sq[i - 1] } else { 0.0 };
        p = spec.diag[i] - lambda - if i > 0 { o / p } else { 0.0 };
        if p.abs() < pivmin {
            p = -pivmin;
        }
        if p < 0.0 {
            count += 1;
        }
    }
    count
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= 1e-14) {
        return Err(Error::InvalidParameters(format!("tolerance must be >= 1e-14, got {tol}")));
    }
    Ok(())
}

/// Certified bracket of `μ₁,ₙ` in extended range with `hi - lo ≤ tol·hi`.
pub fn smallest_zero_scaled(spec: &RecurrenceSpec, tol: f64) -> Result<ScaledInterval> {
    check_tol(tol)?;
    Factors::of(spec)?.bisect(spec.gershgorin().1, tol)
}

/// Certified bracket `[lo, hi]` of `μ₁,ₙ` with `hi - lo ≤ tol·hi`.
pub fn smallest_zero(spec: &RecurrenceSpec, tol: f64) -> Result<Interval> {
    smallest_zero_scaled(spec, tol).map(|m| m.to_interval())
}

/// Newton step from zero: `-A_n(0)/A'_n(0) = 1/tr K̃⁻¹`.
pub fn newton_bound(spec: &RecurrenceSpec) -> Result<f64> {
    Ok(Factors::of(spec)?.newton().to_f64())
}

/// Laguerre's-method step from zero:
/// `x̃₁ = n|A| / (|A'| + √H)`, `H = (n-1)²A'² - n(n-1)AA''`.
///
/// With `S_k = Σ λ_i⁻ᵏ` one has `A/A' = -1/S₁` and `A''/A' = (S₂ - S₁²)/S₁`.
pub fn laguerre_method_bound(spec: &RecurrenceSpec) -> Result<f64> {
    Ok(Factors::of(spec)?.laguerre().to_f64())
}

/// qd arrays after `r` sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdState {
    pub q: Vec<f64>,
    pub e: Vec<f64>,
    pub r: usize,
}

/// Result of [`qd_iterate`]: the state reached and the bound of every completed round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdOutcome {
    pub state: QdState,
    /// `(r, q_n⁽ʳ⁾)` for every valid round.
    pub bounds: Vec<(usize, f64)>,
    pub breakdown: bool,
}

impl QdOutcome {
    pub fn last_bound(&self) -> f64 {
        self.bounds.last().map(|b| b.1).unwrap_or(f64::INFINITY)
    }
}

/// qd sweeps from the factors of `K̃`; `q_n⁽ʳ⁾` bounds `μ₁,ₙ` from above.
///
/// Each sweep is the differential form of the progressive step
/// `q' = q + e - e'_prev`, `e' = q_next e / q'`, and gives the same arrays.
pub fn qd_iterate(spec: &RecurrenceSpec, rounds: usize) -> QdOutcome {
    let (q, e) = spec.qd_start_or_pivots();
    let n = spec.n;
    let mut state = QdState { q, e, r: 0 };
    let valid = |s: &QdState| s.q.iter().all(|&v| v > 0.0 && v.is_finite()) && s.e.iter().all(|&v| v >= 0.0);
    if !valid(&state) {
        return QdOutcome { bounds: vec![], state, breakdown: true };
    }
    let mut bounds = vec![(0, state.q[n - 1])];
    let mut breakdown = false;
    for r in 1..=rounds {
        let mut nq = vec![0.0; n];
        let mut ne = vec![0.0; n.saturating_sub(1)];
        let mut d = state.q[0];
        for i in 0..n - 1 {
            nq[i] = d + state.e[i];
            let t = state.q[i + 1] / nq[i];
            ne[i] = state.e[i] * t;
            d *= t;
        }
        nq[n - 1] = d;
        let next = QdState { q: nq, e: ne, r };
        if !valid(&next) {
            breakdown = true;
            break;
        }
        bounds.push((r, next.q[n - 1]));
        state = next;
    }
    QdOutcome { state, bounds, breakdown }
}

/// Closed-form LaguerreB bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaguerreBClosed {
    /// The stated lower bound, which the published table reproduces.
    pub x1_paper: f64,
    /// `-A_n(0)/A'_n(0)` from the closed forms of `A_n(0)`, `A'_n(0)`; equals `6·x1_paper`.
    pub x1_newton: f64,
    pub x_tilde1: f64,
    pub q2: f64,
}

/// Closed forms of the LaguerreB bounds at mass `m` and degree `n`.
pub fn laguerre_b_closed_bounds(m: f64, n: usize) -> Result<LaguerreBClosed> {
    if !(m >= 0.0) || n == 0 {
        return Err(Error::InvalidParameters(format!("need M >= 0 and n >= 1 (got {m}, {n})")));
    }
    let nf = n as f64;
    let top = 1.0 + (nf + 1.0) * m;
    let x1_paper = top / (nf * (nf + 1.0) * (3.0 + (nf + 2.0) * m));
    let k = (nf + 1.0).powi(2) * (3.0 + (nf + 2.0) * m).powi(2) / 36.0
        - top * (nf + 1.0) * (nf + 2.0) * (5.0 + (nf + 3.0) * m) / 60.0;
    let x_tilde1 = top / ((nf + 1.0) * (3.0 + (nf + 2.0) * m) / 6.0 + (nf - 1.0) * k.max(0.0).sqrt());
    let j = nf - 1.0;
    let p1 = 1.0 + m * (2.0 + j) + m * m * (2.0 + j) * (3.0 + 2.0 * j) / 6.0;
    let p2 = 5.0
        + 5.0 * m * (3.0 + j)
        + m * m * (3.0 + j) * (5.0 + 2.0 * j)
        + m.powi(3) * (2.0 + j) * (3.0 + j) * (5.0 + 2.0 * j) / 6.0;
    let q2 = 30.0 * top * p1 / ((nf + 1.0) * (2.0 * nf + 1.0) * p2);
    Ok(LaguerreBClosed { x1_paper, x1_newton: 6.0 * x1_paper, x_tilde1, q2 })
}

/// All bounds for one spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    pub newton_x1: f64,
    /// Stated closed form, LaguerreB only.
    pub paper_closed_x1: Option<f64>,
    pub laguerre_x1: f64,
    /// `(r, q_n⁽ʳ⁾)`, `r = 0..=rounds` until breakdown.
    pub qd_upper: Vec<(usize, f64)>,
    pub qd_breakdown: bool,
    pub mu: Interval,
    /// `[ln mu.lo, ln mu.hi]`, finite even when `mu` underflows.
    pub ln_mu: Interval,
    /// `[1/√mu.hi, 1/√mu.lo]`.
    pub markov_constant: Interval,
}

impl BoundsReport {
    /// `q_n⁽ʳ⁾` for round `r`, if it was reached.
    pub fn qd(&self, r: usize) -> Option<f64> {
        self.qd_upper.iter().find(|(k, _)| *k == r).map(|b| b.1)
    }
}

/// Bounds and certified bracket for a spec.
///
/// Bounds that land inside the bisection bracket are tested with the inertia
/// count and tighten the bracket when they pass. A bound that rounding pushed
/// past `μ` by at most `64 n ε` is replaced by the certified bracket end.
pub fn compute_bounds(spec: &RecurrenceSpec, tol: f64, qd_rounds: usize) -> Result<BoundsReport> {
    check_tol(tol)?;
    let f = Factors::of(spec)?;
    let upper = spec.gershgorin().1;
    let mut mu = f.bisect(upper, tol)?;
    let mut newton = f.newton();
    let mut laguerre = f.laguerre();
    let mut qd = qd_iterate(spec, qd_rounds);
    let q_min = Scaled::from_f64(qd.bounds.iter().map(|b| b.1).fold(f64::INFINITY, f64::min));
    if q_min.lt(mu.hi) || mu.lo.lt(laguerre) || mu.lo.lt(newton) {
        mu = f.bisect(upper, 0.0)?;
    }
    if spec.n > 1 {
        let slack = Scaled::from_f64(ROUNDING_SLACK * spec.n as f64 * f64::EPSILON);
        for x in [&mut laguerre, &mut newton] {
            if mu.lo.lt(*x) {
                if f.count_below(*x) == 0 {
                    if !mu.hi.lt(*x) {
                        mu.lo = *x;
                    }
                } else if !slack.mul(mu.lo).lt(x.sub(mu.lo)) {
                    *x = mu.lo;
                }
            }
        }
        let q_min = Scaled::from_f64(qd.bounds.iter().map(|b| b.1).fold(f64::INFINITY, f64::min));
        if q_min.lt(mu.hi) && !q_min.lt(mu.lo) && f.count_below(q_min) >= 1 {
            mu.hi = q_min;
        }
        for b in qd.bounds.iter_mut() {
            let q = Scaled::from_f64(b.1);
            if q.lt(mu.hi) && f.count_below(q) == 0 && !slack.mul(mu.hi).lt(mu.hi.sub(q)) {
                b.1 = mu.hi.to_f64();
            }
        }
    }
    let paper_closed_x1 = match spec.case {
        Some(c) if c.tag == CaseTag::LaguerreB => Some(laguerre_b_closed_bounds(c.mass, spec.n)?.x1_paper),
        _ => None,
    };
    let inv_sqrt = |v: Scaled| Scaled::from_f64(1.0).div(v.sqrt()).to_f64();
    Ok(BoundsReport {
        n: spec.n,
        newton_x1: newton.to_f64(),
        paper_closed_x1,
        laguerre_x1: laguerre.to_f64(),
        qd_upper: qd.bounds,
        qd_breakdown: qd.breakdown,
        markov_constant: Interval { lo: inv_sqrt(mu.hi), hi: inv_sqrt(mu.lo) },
        ln_mu: mu.ln(),
        mu: mu.to_interval(),
    })
}

/// Bounds for a case at degree `n` through the generic construction.
pub fn bounds_for_case(case: &CoherentCase, n: usize, tol: f64, qd_rounds: usize) -> Result<BoundsReport> {
    if n == 0 {
        return Err(Error::InvalidParameters("degree n must be >= 1".into()));
    }
    let data = PairData::new(*case, n)?;
    let spec = build_generic_from(&data, n)?;
    compute_bounds(&spec, tol, qd_rounds)
}

/// Extremal polynomial `p̃ = Σ y_j R_j` with `y_j = w_j / (j √k_{j-1}⁽¹⁾)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalPolynomial {
    pub r_basis_coeffs: Vec<f64>,
    /// Unit eigenvector `w` of `K̃` (largest entry positive).
    pub eigenvector: Vec<f64>,
    pub rayleigh: f64,
    pub residual: f64,
}

impl ExtremalPolynomial {
    /// `(p̃(x), p̃'(x))` using `R_1 = P_1`, `R_j = P_j - σ_{j-1} j/(j-1) P_{j-1}`.
    pub fn eval(&self, data: &PairData, x: f64) -> (f64, f64) {
        let n = self.r_basis_coeffs.len();
        let p: Vec<(f64, f64)> = (0..=n).map(|j| data.p_eval(j, x)).collect();
        let mut v = 0.0;
        let mut d = 0.0;
        for j in 1..=n {
            let y = self.r_basis_coeffs[j - 1];
            let (mut rv, mut rd) = p[j];
            if j >= 2 {
                let s = data.sigma(j - 1) * j as f64 / (j as f64 - 1.0);
                rv -= s * p[j - 1].0;
                rd -= s * p[j - 1].1;
            }
            v += y * rv;
            d += y * rd;
        }
        (v, d)
    }

    /// `p̃(x)` summed in double-double when `P_n` is a classical family
    /// (LaguerreC, JacobiD); otherwise as [`Self::eval`].
    pub fn value_extended(&self, data: &PairData, x: f64) -> f64 {
        if !matches!(data.case.tag, CaseTag::LaguerreC | CaseTag::JacobiD) {
            return self.eval(data, x).0;
        }
        let n = self.r_basis_coeffs.len();
        let p = data.case.p_family().eval_dd(n, x);
        let mut v = DoubleDouble::ZERO;
        for j in 1..=n {
            let y = self.r_basis_coeffs[j - 1];
            v = v.add(p[j].mul_f64(y));
            if j >= 2 {
                let s = data.sigma(j - 1) * j as f64 / (j as f64 - 1.0);
                v = v.sub(p[j - 1].mul_f64(s).mul_f64(y));
            }
        }
        v.to_f64()
    }
}

/// `x ↦ c·K̃⁻¹x` through `L` and `Lᵀ`; returns the result and `log₂ c`.
///
/// For a checkerboard-signed `x` both substitutions add terms of one sign.
fn factored_solve(a: &[f64], b: &[f64], x: &[f64]) -> (Vec<f64>, i64) {
    const BIG: f64 = 1e150;
    let n = a.len();
    let mut y = vec![0.0; n];
    let mut scale = 0i64;
    let mut c = 1.0;
    for i in 0..n {
        let s = if i > 0 { c * x[i] - b[i - 1] * y[i - 1] } else { c * x[i] };
        y[i] = s / a[i];
        if y[i].abs() > BIG {
            y[..=i].iter_mut().for_each(|v| *v *= 1.0 / BIG);
            c /= BIG;
            scale += 1;
        }
    }
    for i in (0..n).rev() {
        if i + 1 < n {
            y[i] -= b[i] * y[i + 1];
        }
        y[i] /= a[i];
        if y[i].abs() > BIG {
            y.iter_mut().for_each(|v| *v *= 1.0 / BIG);
            scale += 1;
        }
    }
    (y, -scale)
}

fn normalize(v: &mut [f64]) -> f64 {
    let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nrm > 0.0 {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    nrm
}

/// Eigenvector of `K̃` at `μ₁,ₙ` by inverse iteration and the matching polynomial coefficients.
pub fn extremal_polynomial(spec: &RecurrenceSpec, case: &CoherentCase, mu: Interval) -> Result<ExtremalPolynomial> {
    let n = spec.n;
    let data = PairData::new(*case, n)?;
    extremal_from(spec, &data, mu)
}

/// As [`extremal_polynomial`] with precomputed pair data.
///
/// Iterates with `(LLᵀ)⁻¹` from a checkerboard start; the off-diagonal signs
/// `-sign(σ_j)` are applied afterwards. `residual` is `‖ρ K̃⁻¹w - w‖` for the unit `w`.
pub fn extremal_from(spec: &RecurrenceSpec, data: &PairData, mu: Interval) -> Result<ExtremalPolynomial> {
    let f = Factors::of(spec)?;
    let n = f.n();
    let a: Vec<f64> = f.q.iter().map(|v| v.sqrt()).collect();
    let b: Vec<f64> = f.e.iter().map(|v| v.sqrt()).collect();
    let mut w: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    normalize(&mut w);
    let tiny = 4.0 * f64::EPSILON * (n as f64).sqrt();
    let mut rho = Scaled::from_f64(mu.mid());
    let mut res = f64::INFINITY;
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let (mut z, k) = factored_solve(&a, &b, &w);
        let wz: f64 = w.iter().zip(&z).map(|(p, q)| p * q).sum();
        if !(wz > 0.0) {
            return Err(Error::NoConvergence("inverse iteration lost positivity".into()));
        }
        rho = Scaled::new(1.0 / wz, -k);
        res = z.iter().zip(&w).map(|(p, q)| (p / wz - q).powi(2)).sum::<f64>().sqrt();
        normalize(&mut z);
        let step = z.iter().zip(&w).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        w = z;
        if step <= tiny {
            break;
        }
    }
    if !(res < 1e-8) {
        return Err(Error::NoConvergence(format!("inverse iteration residual {res:e}")));
    }
    let mut sign = 1.0;
    for i in 0..n {
        w[i] *= sign;
        sign *= -data.sigma(i + 1).signum();
    }
    let imax = (0..n).max_by(|&i, &j| w[i].abs().total_cmp(&w[j].abs())).unwrap_or(0);
    if w[imax] < 0.0 {
        w.iter_mut().for_each(|v| *v = -*v);
    }
    let coeffs = (1..=n).map(|j| w[j - 1] / (j as f64 * (0.5 * data.log_k1(j - 1)).exp())).collect();
    Ok(ExtremalPolynomial { r_basis_coeffs: coeffs, eigenvector: w, rayleigh: rho.to_f64(), residual: res })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rel_diff;
    use crate::recurrence::{build_generic, build_specialized};

    fn lb(m: f64) -> CoherentCase {
        CoherentCase::laguerre_b(m).unwrap()
    }

    #[test]
    fn trivial_dimension_one() {
        let s = build_generic(&lb(0.0), 1).unwrap();
        let mu = smallest_zero(&s, 1e-12).unwrap();
        assert_eq!(mu.lo, 1.0);
        assert_eq!(mu.hi, 1.0);
        assert!((newton_bound(&s).unwrap() - 1.0).abs() < 1e-15);
        assert!((laguerre_method_bound(&s).unwrap() - 1.0).abs() < 1e-15);
        let qd = qd_iterate(&s, 0);
        assert_eq!(qd.bounds, vec![(0, 1.0)]);
    }

    #[test]
    fn table_cell_m1_n20() {
        let r = bounds_for_case(&lb(1.0), 20, 1e-12, 5).unwrap();
        assert!((r.mu.mid() - 0.020393972).abs() < 5e-9);
        assert!((r.laguerre_x1 - 0.019766736).abs() < 1e-9);
        assert!((r.qd(2).unwrap() - 0.029017408).abs() < 1e-9);
        assert!((r.paper_closed_x1.unwrap() - 0.002095238).abs() < 1e-9);
        for w in r.qd_upper.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
        assert!(r.qd(5).unwrap() > r.mu.hi);
    }

    #[test]
    fn newton_example() {
        let s = build_generic(&lb(1.0), 2).unwrap();
        assert!((newton_bound(&s).unwrap() - 4.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn closed_forms() {
        let c = laguerre_b_closed_bounds(1.0, 20).unwrap();
        assert!((c.x1_paper - 0.002095238).abs() < 1e-9);
        assert!((c.x_tilde1 - 0.019766736).abs() < 1e-9);
        assert!((c.q2 - 0.029017408).abs() < 1e-9);
        assert!(rel_diff(c.x1_newton, 6.0 * c.x1_paper) < 1e-15);
        let c = laguerre_b_closed_bounds(50.0, 500).unwrap();
        assert!((c.x1_paper - 0.000003983).abs() < 1e-9);
        assert!((c.q2 - 0.000059577).abs() < 1e-9);
        // p₁₉⁽¹⁾ = 165.5, p₁₉⁽²⁾ = 4372 at M = 1
        let direct = 30.0 * 22.0 * 165.5 / (21.0 * 41.0 * 4372.0);
        assert!((c_q2(1.0, 20) - direct).abs() < 1e-12);
    }

    fn c_q2(m: f64, n: usize) -> f64 {
        laguerre_b_closed_bounds(m, n).unwrap().q2
    }

    #[test]
    fn closed_newton_matches_spec_newton() {
        for &(m, n) in &[(1.0, 20), (5.0, 50), (0.0, 7)] {
            let s = build_generic(&lb(m), n).unwrap();
            let c = laguerre_b_closed_bounds(m, n).unwrap();
            assert!(rel_diff(newton_bound(&s).unwrap(), c.x1_newton) < 1e-12);
            assert!(rel_diff(laguerre_method_bound(&s).unwrap(), c.x_tilde1) < 1e-10);
            assert!(rel_diff(qd_iterate(&s, 2).bounds[2].1, c.q2) < 1e-10);
        }
    }

    #[test]
    fn single_cell_table_at_zero_mass() {
        let c = laguerre_b_closed_bounds(0.0, 1).unwrap();
        assert!((c.x1_paper - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn ordering_on_jacobi_b() {
        let s = build_generic(&CoherentCase::jacobi_b(1.0, 0.0).unwrap(), 8).unwrap();
        let mu = smallest_zero(&s, 1e-12).unwrap();
        let x = laguerre_method_bound(&s).unwrap();
        assert!(x > 0.0 && x <= mu.lo);
    }

    #[test]
    fn rejects_tiny_tolerance() {
        let s = build_generic(&lb(1.0), 4).unwrap();
        assert!(smallest_zero(&s, 1e-16).is_err());
    }

    #[test]
    fn interlacing() {
        let s = build_specialized(&CoherentCase::jacobi_a(1.0, 1.0, 2.0).unwrap(), 40).unwrap();
        let mut prev = f64::INFINITY;
        for n in 1..=40 {
            let mu = smallest_zero(&s.truncate(n), 1e-13).unwrap();
            assert!(mu.lo <= prev);
            prev = mu.hi;
        }
    }

    #[test]
    fn extremal_rayleigh_matches_mu() {
        let c = lb(1.0);
        let s = build_generic(&c, 5).unwrap();
        let mu = smallest_zero(&s, 1e-14).unwrap();
        let e = extremal_polynomial(&s, &c, mu).unwrap();
        assert!((e.rayleigh - mu.mid()).abs() <= 1e-10 * mu.mid());
        assert!(e.residual < 1e-10);
        let one = build_generic(&c, 1).unwrap();
        let e1 = extremal_polynomial(&one, &c, smallest_zero(&one, 1e-12).unwrap()).unwrap();
        assert_eq!(e1.eigenvector, vec![1.0]);
    }

    #[test]
    fn factored_count_matches_entry_count() {
        let s = build_generic(&CoherentCase::jacobi_b(1.5, 1.0).unwrap(), 30).unwrap();
        let f = Factors::of(&s).unwrap();
        for lam in [1e-9, 1e-4, 0.01, 0.3, 2.0, 50.0] {
            assert_eq!(f.count_below(Scaled::from_f64(lam)), entry_count(&s, lam), "lambda {lam}");
        }
        assert_eq!(f.count_scaled(Scaled::from_f64(0.3)), f.count_f64(0.3).unwrap());
    }

    #[test]
    fn inverse_traces_by_hand() {
        // K = [[2, 1], [1, 2]]: q = (2, 3/2), e = 1/2, eigenvalues 1 and 3
        let f = Factors { q: vec![2.0, 1.5], e: vec![0.5] };
        let (s1, s2) = f.inverse_traces();
        assert!(rel_diff(s1.to_f64(), 1.0 + 1.0 / 3.0) < 1e-15);
        assert!(rel_diff(s2.to_f64(), 1.0 + 1.0 / 9.0) < 1e-15);
        assert!(rel_diff(f.laguerre().to_f64(), 1.0) < 1e-15);
    }

    #[test]
    fn differential_sweep_matches_progressive() {
        let s = build_generic(&lb(5.0), 12).unwrap();
        let (mut q, mut e) = s.qd_start_or_pivots();
        for _ in 0..3 {
            let n = q.len();
            let mut nq = vec![0.0; n];
            let mut ne = vec![0.0; n - 1];
            let mut prev = 0.0;
            for i in 0..n {
                nq[i] = q[i] + if i + 1 < n { e[i] } else { 0.0 } - prev;
                if i + 1 < n {
                    ne[i] = q[i + 1] * e[i] / nq[i];
                    prev = ne[i];
                }
            }
            q = nq;
            e = ne;
        }
        let out = qd_iterate(&s, 3);
        for (a, b) in out.state.q.iter().zip(&q) {
            assert!(rel_diff(*a, *b) < 1e-12);
        }
    }

    #[test]
    fn bracket_below_f64_range() {
        let c = CoherentCase::jacobi_d(0.5, 0.5, -2.0, 1.0).unwrap();
        let s = build_generic(&c, 2000).unwrap();
        let mu = smallest_zero_scaled(&s, 1e-12).unwrap();
        assert_eq!(mu.to_interval().hi, 0.0);
        let ln = mu.ln();
        assert!(ln.hi.is_finite() && ln.lo <= ln.hi && ln.hi < -5000.0);
        assert!(ln.width() <= 1e-11);
        let f = Factors::of(&s).unwrap();
        assert_eq!(f.count_below(mu.lo), 0);
        assert!(f.count_below(mu.hi) >= 1);
        let r = compute_bounds(&s, 1e-12, 2).unwrap();
        assert!(r.ln_mu.lo >= ln.lo && r.ln_mu.hi <= ln.hi && r.ln_mu.lo <= r.ln_mu.hi);
    }

    #[test]
    fn tiny_mu_matches_independent_pivots() {
        // the f64 path and the extended path agree where both apply
        let c = CoherentCase::jacobi_d(0.5, 0.5, -2.0, 1.0).unwrap();
        let s = build_generic(&c, 60).unwrap();
        let mu = smallest_zero_scaled(&s, 1e-13).unwrap();
        let f = Factors::of(&s).unwrap();
        assert_eq!(f.count_scaled(mu.lo), 0);
        assert!(f.count_scaled(mu.hi) >= 1);
        assert!(rel_diff(newton_bound(&s).unwrap(), f.newton().to_f64()) == 0.0);
        assert!(f.newton().lt(mu.hi) || f.newton() == mu.hi);
    }
}
