//! The three-term recurrence of `A_n(λ) = det(λI - K̃_n)`.
//!
//! Sign convention: a [`RecurrenceSpec`] stores the entries of `K̃` itself, so
//! `A_n(λ) = (λ - d_n) A_{n-1}(λ) - o_{n-1} A_{n-2}(λ)` with `A_0 = 1`,
//! `A_1 = λ - d_1`. A recurrence written as `(λ + B_n)` maps to `d_n = -B_n`,
//! and `o_{n-1} = C_n`.

use serde::{Deserialize, Serialize};

use crate::coherent::{CaseTag, CoherentCase, PairData};
use crate::error::{Error, Result};
use crate::numeric::{ln_gamma, Scaled, SharedScale, SignedLog};
use crate::orthopoly::{jacobi_coeffs, jacobi_log_norm, JacobiParams};

/// Overflow-safe polynomial value `mantissa · 2^exponent`.
pub type ScaledPolyValue = Scaled;

/// Which construction produced a spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuildMethod {
    Generic,
    Specialized,
    Reference,
}

/// Symmetric tridiagonal `K̃_n`: diagonal `d_1..d_n`, squared off-diagonals `o_1..o_{n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceSpec {
    pub n: usize,
    pub diag: Vec<f64>,
    pub offdiag_sq: Vec<f64>,
    pub a1_constant: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub case: Option<CoherentCase>,
    pub method: BuildMethod,
    /// `(q⁽⁰⁾, e⁽⁰⁾)` formed from norm ratios in log space, when available.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub qd_start: Option<(Vec<f64>, Vec<f64>)>,
}

impl RecurrenceSpec {
    /// Spec from explicit entries.
    pub fn from_entries(diag: Vec<f64>, offdiag_sq: Vec<f64>) -> Result<RecurrenceSpec> {
        let n = diag.len();
        if n == 0 || offdiag_sq.len() + 1 != n {
            return Err(Error::InvalidParameters(format!(
                "need n >= 1 diagonal entries and n-1 off-diagonal entries (got {} and {})",
                n,
                offdiag_sq.len()
            )));
        }
        let spec = RecurrenceSpec {
            n,
            a1_constant: diag[0],
            diag,
            offdiag_sq,
            case: None,
            method: BuildMethod::Reference,
            qd_start: None,
        };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if let Some((i, v)) = self.diag.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Numerical(format!("diagonal entry {} is {v}", i + 1)));
        }
        if let Some((i, v)) = self.offdiag_sq.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Numerical(format!("squared off-diagonal {} is {v}", i + 1)));
        }
        Ok(())
    }

    /// `(lower, upper)` Gershgorin bounds of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let b: Vec<f64> = self.offdiag_sq.iter().map(|o| o.sqrt()).collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let r = if i > 0 { b[i - 1] } else { 0.0 } + if i + 1 < self.n { b[i] } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// LDLᵀ pivots of `K̃` (`q⁽⁰⁾` of the qd scheme) and the matching `e⁽⁰⁾`.
    pub fn qd_start_or_pivots(&self) -> (Vec<f64>, Vec<f64>) {
        if let Some((q, e)) = &self.qd_start {
            return (q.clone(), e.clone());
        }
        let mut q = Vec::with_capacity(self.n);
        let mut e = Vec::with_capacity(self.n.saturating_sub(1));
        q.push(self.diag[0]);
        for j in 1..self.n {
            let ej = self.offdiag_sq[j - 1] / q[j - 1];
            e.push(ej);
            q.push(self.diag[j] - ej);
        }
        (q, e)
    }

    /// Leading `m × m` block.
    pub fn truncate(&self, m: usize) -> RecurrenceSpec {
        let m = m.clamp(1, self.n);
        RecurrenceSpec {
            n: m,
            diag: self.diag[..m].to_vec(),
            offdiag_sq: self.offdiag_sq[..m - 1].to_vec(),
            a1_constant: self.a1_constant,
            case: self.case,
            method: self.method,
            qd_start: self.qd_start.as_ref().map(|(q, e)| (q[..m].to_vec(), e[..m - 1].to_vec())),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialises")
    }

    pub fn from_json(s: &str) -> Result<RecurrenceSpec> {
        let spec: RecurrenceSpec =
            serde_json::from_str(s).map_err(|e| Error::InvalidParameters(format!("bad spec JSON: {e}")))?;
        spec.check()?;
        Ok(spec)
    }
}

/// Spec assembled from `σ_j`, `k_j⁽⁰⁾`, `k_j⁽¹⁾` with every ratio formed in log space.
pub fn build_generic(case: &CoherentCase, n: usize) -> Result<RecurrenceSpec> {
    if n == 0 {
        return Err(Error::InvalidParameters("dimension n must be >= 1".into()));
    }
    let data = PairData::new(*case, n)?;
    build_generic_from(&data, n)
}

/// As [`build_generic`] but reusing precomputed pair data (`data.n_max >= n`).
pub fn build_generic_from(data: &PairData, n: usize) -> Result<RecurrenceSpec> {
    assert!(data.n_max >= n, "pair data too short");
    let lj = |j: usize| (j as f64).ln();
    let mut diag = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    let mut e = Vec::with_capacity(n.saturating_sub(1));
    for j in 1..=n {
        let t1 = (data.log_k0(j) - 2.0 * lj(j) - data.log_k1(j - 1)).exp();
        q.push(t1);
        let t2 = if j >= 2 {
            let v =
                (2.0 * data.sigma(j - 1).abs().ln() + data.log_k0(j - 1) - 2.0 * lj(j - 1) - data.log_k1(j - 1)).exp();
            e.push(v);
            v
        } else {
            0.0
        };
        diag.push(t1 + t2);
    }
    let offdiag_sq = (1..n)
        .map(|j| {
            (2.0 * data.sigma(j).abs().ln() + 2.0 * data.log_k0(j) - 4.0 * lj(j) - data.log_k1(j - 1) - data.log_k1(j))
                .exp()
        })
        .collect();
    let spec = RecurrenceSpec {
        n,
        a1_constant: diag[0],
        diag,
        offdiag_sq,
        case: Some(data.case),
        method: BuildMethod::Generic,
        qd_start: Some((q, e)),
    };
    spec.check()?;
    Ok(spec)
}

/// Spec from the per-case closed forms.
pub fn build_specialized(case: &CoherentCase, n: usize) -> Result<RecurrenceSpec> {
    if n == 0 {
        return Err(Error::InvalidParameters("dimension n must be >= 1".into()));
    }
    let (a, b, xi, m) = (case.alpha, case.beta, case.xi, case.mass);
    let mut diag = vec![0.0; n];
    // c[j] = C_j for j = 2..=n
    let mut c = vec![0.0; n + 1];
    match case.tag {
        CaseTag::LaguerreA => {
            diag[0] = a + 1.0 - xi + xi / (xi - a);
            for j in 2..=n {
                let jf = j as f64;
                diag[j - 1] = 2.0 - (xi - a) / jf;
                c[j] = 1.0 + a / (jf - 1.0);
            }
        }
        CaseTag::LaguerreB => {
            diag[0] = (1.0 + 2.0 * m) / (1.0 + m);
            for j in 2..=n {
                diag[j - 1] = 2.0;
                c[j] = 1.0;
            }
        }
        CaseTag::LaguerreC => {
            let data = PairData::new(*case, n)?;
            let t = data.moments.as_ref().expect("LaguerreC carries moments");
            let ratio = |i: usize, k: usize| t.get(i).div(t.get(k)).to_f64();
            diag[0] = (ln_gamma(a + 2.0) - t.get(0).ln_abs).exp();
            for j in 2..=n {
                let jf = j as f64;
                diag[j - 1] = -((jf - 1.0) * (jf + a) / jf * ratio(j - 2, j - 1) + ratio(j - 1, j - 2) / (jf - 1.0));
                c[j] = if j == 2 {
                    -(ln_gamma(a + 2.0) - 2.0 * t.get(0).ln_abs).exp() * t.get(1).to_f64()
                } else {
                    let num = t.get(j - 1).mul(t.get(j - 3));
                    let den = t.get(j - 2).mul(t.get(j - 2));
                    (jf + a - 1.0) * (jf - 2.0) / ((jf - 1.0) * (jf - 1.0)) * num.div(den).to_f64()
                };
            }
        }
        CaseTag::JacobiA => {
            let eps = case.epsilon();
            let s = a + b;
            let (b0, _) = jacobi_coeffs(a - 1.0, b - 1.0, 0);
            let (b1, c1) = jacobi_coeffs(a - 1.0, b - 1.0, 1);
            let r1 = (xi - b1) - c1 / (xi - b0);
            diag[0] = -eps * r1 / s;
            for j in 2..=n {
                let jf = j as f64;
                let u = 2.0 * jf + s;
                diag[j - 1] = -eps / (jf * (jf + s - 1.0)) * (xi - (b - a) * (s - 2.0) / ((u - 2.0) * u));
                c[j] = 4.0 * (jf + a - 1.0) * (jf + b - 1.0)
                    / ((jf - 1.0) * (jf + s - 1.0) * (u - 1.0) * (u - 2.0) * (u - 2.0) * (u - 3.0));
            }
        }
        CaseTag::JacobiB | CaseTag::JacobiC => {
            let g = case.gamma();
            let big_d = |j: f64| 2f64.powf(g) + j * m * (j - 1.0 + g);
            diag[0] = 2.0 / ((g + 1.0) * (g + 2.0)) * big_d(2.0) / big_d(1.0);
            for j in 2..=n {
                let jf = j as f64;
                let u = 2.0 * jf + g;
                diag[j - 1] = 2.0 / (u * (u - 1.0)) * big_d(jf + 1.0) / big_d(jf)
                    + 2.0 / ((u - 2.0) * (u - 1.0)) * big_d(jf - 1.0) / big_d(jf);
                c[j] = 4.0 / ((u - 1.0) * (u - 2.0) * (u - 2.0) * (u - 3.0));
            }
        }
        CaseTag::JacobiD => {
            let eps = case.epsilon();
            let s = a + b;
            let data = PairData::new(*case, n)?;
            let u = data.moments.as_ref().expect("JacobiD carries moments");
            let ratio = |i: usize, k: usize| u.get(i).div(u.get(k)).to_f64();
            let p = JacobiParams { alpha: a, beta: b };
            let up = JacobiParams { alpha: a + 1.0, beta: b + 1.0 };
            let ln_k1 = jacobi_log_norm(p, 1);
            diag[0] = (ln_k1 - u.get(0).ln_abs).exp();
            for j in 2..=n {
                let jf = j as f64;
                let w = 2.0 * jf + s;
                let first =
                    4.0 * (jf - 1.0) * (jf + a) * (jf + b) / (jf * (w - 1.0) * w * w * (w + 1.0)) * ratio(j - 2, j - 1);
                let second = ratio(j - 1, j - 2) / ((jf - 1.0) * (jf + s));
                diag[j - 1] = -eps * (first + second);
                c[j] = if j == 2 {
                    -eps * (2.0 * ln_k1 - jacobi_log_norm(up, 0) - 2.0 * u.get(0).ln_abs).exp() * u.get(1).to_f64()
                } else {
                    let num = u.get(j - 1).mul(u.get(j - 3));
                    let den = u.get(j - 2).mul(u.get(j - 2));
                    4.0 * (jf - 2.0) * (jf + a - 1.0) * (jf + b - 1.0)
                        / ((jf - 1.0) * (jf - 1.0) * (jf + s) * (w - 2.0) * (w - 2.0) * (w - 1.0) * (w - 3.0))
                        * num.div(den).to_f64()
                };
            }
        }
    }
    let spec = RecurrenceSpec {
        n,
        a1_constant: diag[0],
        diag,
        offdiag_sq: c[2..=n].to_vec(),
        case: Some(*case),
        method: BuildMethod::Specialized,
        qd_start: None,
    };
    spec.check()?;
    Ok(spec)
}

/// Reference recurrence of the classical Laguerre–Sonin self pair:
/// `d_1 = α + 1`, `d_j = 2 + α/j`, `o_j = 1 + α/j`.
pub fn classical_laguerre_self_pair(alpha: f64, n: usize) -> Result<RecurrenceSpec> {
    if !(alpha > -1.0) || n == 0 {
        return Err(Error::InvalidParameters(format!("self pair needs alpha > -1 and n >= 1 (got {alpha}, {n})")));
    }
    let mut diag: Vec<f64> = (1..=n).map(|j| 2.0 + alpha / j as f64).collect();
    diag[0] = alpha + 1.0;
    let off = (1..n).map(|j| 1.0 + alpha / j as f64).collect();
    RecurrenceSpec::from_entries(diag, off)
}

/// `A_n(λ)` and optionally its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnValue {
    pub value: ScaledPolyValue,
    pub first: Option<ScaledPolyValue>,
    pub second: Option<ScaledPolyValue>,
}

/// Evaluates `A_n`, `A'_n`, `A''_n` at `λ` by simultaneous recurrences sharing one exponent.
pub fn eval_an(spec: &RecurrenceSpec, lambda: f64, derivatives: usize) -> Result<AnValue> {
    if derivatives > 2 {
        return Err(Error::InvalidParameters("at most two derivatives".into()));
    }
    // state: [A_{k-1}, A_k, A'_{k-1}, A'_k, A''_{k-1}, A''_k]
    let mut s = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
    let mut scale = SharedScale::default();
    for k in 1..=spec.n {
        let t = lambda - spec.diag[k - 1];
        let o = if k >= 2 { spec.offdiag_sq[k - 2] } else { 0.0 };
        let a = t * s[1] - o * s[0];
        let da = s[1] + t * s[3] - o * s[2];
        let d2a = 2.0 * s[3] + t * s[5] - o * s[4];
        s = [s[1], a, s[3], da, s[5], d2a];
        scale.renorm(&mut s);
    }
    Ok(AnValue {
        value: scale.scaled(s[1]),
        first: (derivatives >= 1).then(|| scale.scaled(s[3])),
        second: (derivatives >= 2).then(|| scale.scaled(s[5])),
    })
}

/// `(A_n(0), A'_n(0))` as signed logs; `A_n(0) = (-1)^n Π q_j⁽⁰⁾`.
pub fn an_at_zero(spec: &RecurrenceSpec) -> Result<(SignedLog, SignedLog)> {
    let (q, _) = spec.qd_start_or_pivots();
    let mut ln = 0.0;
    let mut sign: i8 = if spec.n % 2 == 0 { 1 } else { -1 };
    for &v in &q {
        if v == 0.0 || !v.is_finite() {
            return Err(Error::Numerical(format!("zero pivot in A_n(0) product ({v})")));
        }
        if v < 0.0 {
            sign = -sign;
        }
        ln += v.abs().ln();
    }
    let d = eval_an(spec, 0.0, 1)?;
    Ok((SignedLog::new(sign, ln), d.first.expect("first derivative").to_signed_log()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rel_diff;

    #[test]
    fn generic_seed_is_norm_ratio() {
        let lb = CoherentCase::laguerre_b(1.0).unwrap();
        let s = build_generic(&lb, 1).unwrap();
        assert!((s.diag[0] - 1.5).abs() < 1e-15);
        assert!(s.offdiag_sq.is_empty());
        let sp = build_specialized(&lb, 1).unwrap();
        assert!((sp.a1_constant - 1.5).abs() < 1e-15);
    }

    #[test]
    fn laguerre_b_specialized_shape() {
        let s = build_specialized(&CoherentCase::laguerre_b(3.0).unwrap(), 5).unwrap();
        assert!((s.diag[0] - 7.0 / 4.0).abs() < 1e-15);
        assert!(s.diag[1..].iter().all(|&d| d == 2.0));
        assert!(s.offdiag_sq.iter().all(|&o| o == 1.0));
    }

    #[test]
    fn laguerre_a_generic_matches_specialized() {
        let c = CoherentCase::laguerre_a(1.0, -1.0).unwrap();
        let g = build_generic(&c, 4).unwrap();
        let s = build_specialized(&c, 4).unwrap();
        for j in 0..4 {
            assert!(rel_diff(g.diag[j], s.diag[j]) < 1e-12);
        }
        for j in 0..3 {
            assert!(rel_diff(g.offdiag_sq[j], s.offdiag_sq[j]) < 1e-12);
        }
    }

    #[test]
    fn laguerre_a_tends_to_self_pair() {
        let alpha = 1.0;
        let r = classical_laguerre_self_pair(alpha, 10).unwrap();
        let s = build_specialized(&CoherentCase::laguerre_a(alpha, -1e-9).unwrap(), 10).unwrap();
        for j in 0..10 {
            assert!((s.diag[j] - r.diag[j]).abs() < 1e-8);
        }
        for j in 0..9 {
            assert!((s.offdiag_sq[j] - r.offdiag_sq[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn laguerre_c_at_origin_is_self_pair() {
        let alpha = 0.5;
        let r = classical_laguerre_self_pair(alpha, 6).unwrap();
        let s = build_specialized(&CoherentCase::laguerre_c(alpha, 0.0, 0.0).unwrap(), 6).unwrap();
        for j in 0..6 {
            assert!(rel_diff(s.diag[j], r.diag[j]) < 1e-13);
        }
        for j in 0..5 {
            assert!(rel_diff(s.offdiag_sq[j], r.offdiag_sq[j]) < 1e-13);
        }
    }

    #[test]
    fn eval_an_small_cases() {
        let s = build_specialized(&CoherentCase::laguerre_b(0.0).unwrap(), 1).unwrap();
        assert_eq!(eval_an(&s, 1.0, 0).unwrap().value.to_f64(), 0.0);
        let s = build_specialized(&CoherentCase::laguerre_b(1.0).unwrap(), 20).unwrap();
        let v = eval_an(&s, 0.0, 0).unwrap().value.to_f64();
        assert!((v - 11.0).abs() < 1e-11);
    }

    #[test]
    fn an_at_zero_paths_agree() {
        let s = build_generic(&CoherentCase::laguerre_b(1.0).unwrap(), 20).unwrap();
        let (a, _) = an_at_zero(&s).unwrap();
        assert_eq!(a.sign, 1);
        assert!((a.to_f64() - 11.0).abs() < 1e-10);
        let s = build_specialized(&CoherentCase::laguerre_b(0.7).unwrap(), 1).unwrap();
        let (a, d) = an_at_zero(&s).unwrap();
        assert!((a.to_f64() + s.diag[0]).abs() < 1e-15);
        assert!((d.to_f64() - 1.0).abs() < 1e-15);
        let s = build_generic(&CoherentCase::jacobi_b(1.0, 0.0).unwrap(), 5).unwrap();
        let (a, _) = an_at_zero(&s).unwrap();
        let direct = eval_an(&s, 0.0, 0).unwrap().value.to_f64();
        assert!(rel_diff(a.to_f64(), direct) < 1e-10);
    }

    #[test]
    fn derivative_recurrences_match_finite_differences() {
        let s = build_generic(&CoherentCase::jacobi_a(1.0, 2.0, -1.5).unwrap(), 7).unwrap();
        let lam = 0.37;
        let h = 1e-5;
        let v = eval_an(&s, lam, 2).unwrap();
        let f = |l: f64| eval_an(&s, l, 0).unwrap().value.to_f64();
        let fd1 = (f(lam + h) - f(lam - h)) / (2.0 * h);
        let fd2 = (f(lam + h) - 2.0 * f(lam) + f(lam - h)) / (h * h);
        assert!(rel_diff(v.first.unwrap().to_f64(), fd1) < 1e-6);
        assert!(rel_diff(v.second.unwrap().to_f64(), fd2) < 1e-4);
    }

    #[test]
    fn scaled_evaluation_survives_large_n() {
        let s = build_specialized(&CoherentCase::laguerre_b(1.0).unwrap(), 10_000).unwrap();
        for &lam in &[0.0, 0.5, 1.7, 4.0] {
            let v = eval_an(&s, lam, 2).unwrap();
            assert!(v.value.mantissa.is_finite());
            assert!(v.second.unwrap().mantissa.is_finite());
        }
    }

    #[test]
    fn json_round_trip() {
        let s = build_generic(&CoherentCase::jacobi_d(0.5, 0.5, 1.0, 0.0).unwrap(), 4).unwrap();
        let back = RecurrenceSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(RecurrenceSpec::from_json("{\"n\":1}").is_err());
    }

    #[test]
    fn from_entries_validates() {
        assert!(RecurrenceSpec::from_entries(vec![1.0, 2.0], vec![]).is_err());
        assert!(RecurrenceSpec::from_entries(vec![1.0, 2.0], vec![-1.0]).is_err());
        assert!(RecurrenceSpec::from_entries(vec![1.0, 2.0], vec![0.5]).is_ok());
    }
}
