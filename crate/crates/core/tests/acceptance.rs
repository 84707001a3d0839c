//! Acceptance suite: one PASS/FAIL line per criterion.

use std::time::Instant;

use coherent_mb::functionals::moment_cross_check;
use coherent_mb::numeric::rel_diff;
use coherent_mb::recurrence::{build_generic, build_specialized, classical_laguerre_self_pair, RecurrenceSpec};
use coherent_mb::solver::{bounds_for_case, smallest_zero};
use coherent_mb::verify::{
    check_asymptotics, check_identities_seeded, jacobi_moment, limit_established, random_case, random_poly,
    InequalityChecker, EXTREMAL_TOL, IDENTITY_TOL, RATIO_TOL,
};
use coherent_mb::{CaseTag, CoherentCase, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Line {
    pass: bool,
    detail: String,
}

fn line(pass: bool, detail: String) -> Line {
    Line { pass, detail }
}

fn err_line(e: coherent_mb::Error) -> Line {
    line(false, format!("error: {e}"))
}

/// (M, n, x1, x̃1, μ, q2) as printed.
const TABLE: [(f64, usize, [f64; 4]); 16] = [
    (1.0, 20, [0.002095238, 0.019766736, 0.020393972, 0.029017408]),
    (1.0, 50, [0.000370766, 0.003519638, 0.003649401, 0.005391291]),
    (1.0, 100, [0.000096181, 0.000913322, 0.000948578, 0.001420806]),
    (1.0, 500, [0.000003968, 0.000037658, 0.000039164, 0.000059345]),
    (5.0, 20, [0.002233459, 0.021242255, 0.021922153, 0.031139285]),
    (5.0, 50, [0.000381719, 0.003629865, 0.003763805, 0.005558176]),
    (5.0, 100, [0.000097658, 0.000927797, 0.000963616, 0.001443177]),
    (5.0, 500, [0.000003980, 0.000037778, 0.000039289, 0.000059534]),
    (10.0, 20, [0.002252829, 0.021442114, 0.022128520, 0.031423693]),
    (10.0, 50, [0.000383158, 0.003644061, 0.003778527, 0.005579620]),
    (10.0, 100, [0.000097848, 0.000929632, 0.000965523, 0.001446012]),
    (10.0, 500, [0.000003982, 0.000037793, 0.000039305, 0.000059558]),
    (50.0, 20, [0.002268704, 0.021604487, 0.022296105, 0.031654366]),
    (50.0, 50, [0.000384322, 0.003655484, 0.003790372, 0.005596869]),
    (50.0, 100, [0.000098000, 0.000931105, 0.000967052, 0.001448286]),
    (50.0, 500, [0.000003983, 0.000037805, 0.000039317, 0.000059577]),
];

fn criterion_1() -> Line {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut literal = 0;
    for &(m, n, printed) in &TABLE {
        let r = match CoherentCase::laguerre_b(m).and_then(|c| bounds_for_case(&c, n, 1e-12, 2)) {
            Ok(r) => r,
            Err(e) => return err_line(e),
        };
        let got = [r.paper_closed_x1.unwrap_or(f64::NAN), r.laguerre_x1, r.mu.mid(), r.qd(2).unwrap_or(f64::NAN)];
        for (k, (&g, &p)) in got.iter().zip(&printed).enumerate() {
            if (g - p).abs() <= 1e-6 * p {
                literal += 1;
            }
            if !((g - p).abs() <= (1e-6 * p).max(1e-9)) {
                bad.push(format!("M={m} n={n} col={k}: {g} vs {p}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = bad.is_empty() && secs < 5.0;
    line(
        pass,
        format!(
            "64 cells, {} outside max(1e-6 rel, 1e-9 abs) [{literal}/64 within literal 1e-6 rel], {secs:.3}s{}",
            bad.len(),
            if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }
        ),
    )
}

fn draws(seed: u64, per_case: usize) -> Vec<CoherentCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CaseTag::ALL.iter().flat_map(|&t| (0..per_case).map(|_| random_case(&mut rng, t)).collect::<Vec<_>>()).collect()
}

fn criterion_2() -> Line {
    let mut checked = 0;
    let mut violations = Vec::new();
    for case in draws(2, 20) {
        for n in [2, 5, 10, 20, 50] {
            let r = match bounds_for_case(&case, n, 1e-12, 2) {
                Ok(r) => r,
                Err(e) => {
                    violations.push(format!("{case} n={n}: {e}"));
                    continue;
                }
            };
            checked += 1;
            let chain = [
                r.newton_x1,
                r.laguerre_x1,
                r.mu.lo,
                r.mu.hi,
                r.qd(2).unwrap_or(f64::NAN),
                r.qd(1).unwrap_or(f64::NAN),
                r.qd(0).unwrap_or(f64::NAN),
            ];
            if !chain.windows(2).all(|w| w[0] <= w[1]) {
                violations.push(format!("{case} n={n}: {chain:?}"));
            }
        }
    }
    line(
        violations.is_empty(),
        format!(
            "{checked} (case, n) checked, {} violations{}",
            violations.len(),
            violations.first().map(|v| format!("; first: {v}")).unwrap_or_default()
        ),
    )
}

/// `1/λ_max(L⁻ᵀL⁻¹)` with `K̃ = LLᵀ`; the largest eigenvalue of a dense
/// symmetric matrix is computed to full relative accuracy.
fn dense_smallest(spec: &RecurrenceSpec) -> f64 {
    let n = spec.n;
    let (q, e) = spec.qd_start_or_pivots();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        l[(i, i)] = q[i].sqrt();
        if i + 1 < n {
            l[(i + 1, i)] = e[i].sqrt();
        }
    }
    let li = l.solve_lower_triangular(&DMatrix::identity(n, n)).expect("L is nonsingular");
    let m = li.transpose() * &li;
    let top = SymmetricEigen::new(m).eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    1.0 / top
}

fn criterion_3() -> Line {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for case in draws(3, 10) {
        let spec = match build_generic(&case, 12) {
            Ok(s) => s,
            Err(e) => return line(false, format!("{case}: {e}")),
        };
        for n in 1..=12 {
            let s = spec.truncate(n);
            let mu = match smallest_zero(&s, 1e-14) {
                Ok(m) => m.mid(),
                Err(e) => return line(false, format!("{case} n={n}: {e}")),
            };
            worst = worst.max((mu - dense_smallest(&s)).abs() / mu);
            count += 1;
        }
    }
    line(worst <= 1e-10, format!("{count} matrices, max relative difference {worst:.2e} (limit 1e-10)"))
}

fn criterion_4() -> Line {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for case in draws(4, 10) {
        let (g, s) = match (build_generic(&case, 30), build_specialized(&case, 30)) {
            (Ok(g), Ok(s)) => (g, s),
            (Err(e), _) | (_, Err(e)) => return line(false, format!("{case}: {e}")),
        };
        let pairs = g.diag.iter().zip(&s.diag).chain(g.offdiag_sq.iter().zip(&s.offdiag_sq));
        for (a, b) in pairs {
            let d = rel_diff(*a, *b);
            if d > worst {
                worst = d;
                at = case.to_string();
            }
        }
    }
    line(worst <= 1e-10, format!("70 parameter sets at n=30, max entrywise relative difference {worst:.2e} ({at})"))
}

fn criterion_5() -> Line {
    let reps = [
        CoherentCase::laguerre_a(1.0, -1.0),
        CoherentCase::laguerre_b(1.0),
        CoherentCase::laguerre_c(0.5, -1.0, 1.0),
        CoherentCase::jacobi_a(1.0, 1.0, 2.0),
        CoherentCase::jacobi_b(1.5, 1.0),
        CoherentCase::jacobi_c(2.0, 0.5),
        CoherentCase::jacobi_d(0.5, 0.5, -2.0, 1.0),
    ];
    let mut cases: Vec<CoherentCase> = reps.into_iter().map(|c| c.unwrap()).collect();
    cases.extend(draws(5, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut max_ratio = f64::NEG_INFINITY;
    let mut max_gap: f64 = 0.0;
    let mut failures = Vec::new();
    let mut count = 0;
    for case in &cases {
        for n in 1..=20 {
            let chk = match InequalityChecker::new(case, n) {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!("{case} n={n}: {e}"));
                    continue;
                }
            };
            for _ in 0..200 {
                let r = chk.ratio(&random_poly(&mut rng, n));
                max_ratio = max_ratio.max(r);
                if r > 1.0 + RATIO_TOL {
                    failures.push(format!("{case} n={n}: ratio {r}"));
                }
            }
            match chk.extremal_ratio() {
                Ok(r) => {
                    max_gap = max_gap.max((1.0 - r).abs());
                    if !((1.0 - r).abs() <= EXTREMAL_TOL) {
                        failures.push(format!("{case} n={n}: extremal ratio {r}"));
                    }
                }
                Err(e) => failures.push(format!("{case} n={n}: {e}")),
            }
            count += 1;
        }
    }
    line(
        failures.is_empty(),
        format!(
            "{count} (case, n) x 200 trials, max ratio {max_ratio:.10}, max extremal gap {max_gap:.2e}, {} failures{}",
            failures.len(),
            failures.first().map(|v| format!("; first: {v}")).unwrap_or_default()
        ),
    )
}

fn criterion_6() -> Line {
    let run = || -> Result<(usize, usize, f64, String)> {
        let exact = check_identities_seeded(12, 6, 10)?;
        let mut failures = exact.failures;
        let mut checks = 0;
        let mut names = Vec::new();
        for s in &exact.suites {
            checks += s.checked;
            names.push(format!("{} {}/{}", s.name, s.checked - s.failures, s.checked));
        }
        let mut worst: f64 = 0.0;
        let mut real_checks = 0;
        for gamma in [std::f64::consts::SQRT_2, std::f64::consts::FRAC_PI_2, std::f64::consts::E, 7.3] {
            for i in 0..=10 {
                for j in 0..=i {
                    for eps in [1.0, -1.0] {
                        let (l, r) = jacobi_moment(i, j, gamma, eps)?;
                        worst = worst.max(rel_diff(l, r));
                    }
                    real_checks += 2;
                }
            }
        }
        checks += real_checks;
        if !(worst <= IDENTITY_TOL) {
            failures += 1;
        }
        names.push(format!("real-gamma quadrature {real_checks}"));
        Ok((checks, failures, worst, names.join(", ")))
    };
    match run() {
        Ok((checks, failures, worst, names)) => line(
            failures == 0,
            format!("{checks} checks, {failures} failures, max real-parameter error {worst:.2e} (limit {IDENTITY_TOL:e}): {names}"),
        ),
        Err(e) => err_line(e),
    }
}

fn criterion_7() -> Line {
    let run = || -> Result<Line> {
        let b = check_asymptotics(&CoherentCase::laguerre_b(1.0)?, &[100, 200, 500, 1000])?;
        let band = b.plateau_band.unwrap();
        let mut detail = format!("LaguerreB M=1 n^2 mu band {band:.4}");
        let mut pass = band <= 2.0;
        let reps = [
            CoherentCase::laguerre_a(1.0, -1.0)?,
            CoherentCase::laguerre_b(5.0)?,
            CoherentCase::laguerre_c(0.5, 0.0, 1.0)?,
            CoherentCase::laguerre_c(0.5, -1.0, 0.0)?,
            CoherentCase::laguerre_c(0.5, -1.0, 1.0)?,
            CoherentCase::jacobi_a(1.0, 1.0, 2.0)?,
            CoherentCase::jacobi_b(1.5, 1.0)?,
            CoherentCase::jacobi_c(2.0, 0.5)?,
            CoherentCase::jacobi_d(0.5, 0.5, 1.0, 0.0)?,
            CoherentCase::jacobi_d(0.5, 0.5, -2.0, 1.0)?,
        ];
        for c in reps {
            let r = check_asymptotics(&c, &[50, 2000])?;
            let ln_ratio = r.ln_mu[1].mid() - r.ln_mu[0].mid();
            let shown =
                if ln_ratio > -700.0 { format!("{:.3e}", ln_ratio.exp()) } else { format!("exp({ln_ratio:.1})") };
            if limit_established(&c) {
                pass &= ln_ratio < 0.1f64.ln();
                detail.push_str(&format!("; {c}: {shown}"));
            } else {
                detail.push_str(&format!("; {c}: {shown} (trend only)"));
            }
        }
        Ok(line(pass, detail))
    };
    run().unwrap_or_else(err_line)
}

fn criterion_8() -> Line {
    let run = || -> Result<Line> {
        let mut worst_c: f64 = 0.0;
        for alpha in [-0.5, 0.0, 0.5, 2.0] {
            let r = classical_laguerre_self_pair(alpha, 30)?;
            let c = CoherentCase::laguerre_c(alpha, 0.0, 0.0)?;
            for s in [build_specialized(&c, 30)?, build_generic(&c, 30)?] {
                for (a, b) in s.diag.iter().zip(&r.diag).chain(s.offdiag_sq.iter().zip(&r.offdiag_sq)) {
                    worst_c = worst_c.max(rel_diff(*a, *b));
                }
            }
        }
        let diff_at = |xi: f64| -> Result<f64> {
            let r = classical_laguerre_self_pair(1.0, 30)?;
            let s = build_specialized(&CoherentCase::laguerre_a(1.0, xi)?, 30)?;
            Ok(s.diag
                .iter()
                .zip(&r.diag)
                .chain(s.offdiag_sq.iter().zip(&r.offdiag_sq))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max))
        };
        let d6 = diff_at(-1e-6)?;
        let d5 = diff_at(-1e-5)?;
        let constant = d6 / 1e-6;
        let order = d6 / d5;
        let pass = worst_c <= 1e-13 && constant <= 10.0 && (0.05..=0.2).contains(&order);
        Ok(line(
            pass,
            format!(
                "LaguerreC(xi=0, M=0) vs self pair max rel diff {worst_c:.2e} (limit 1e-13); \
                 LaguerreA xi=-1e-6 max diff {d6:.2e} = |xi| x {constant:.3} (limit 10), diff ratio 1e-6/1e-5 = {order:.3}"
            ),
        ))
    };
    run().unwrap_or_else(err_line)
}

fn criterion_9() -> Line {
    let run = || -> Result<Line> {
        let start = Instant::now();
        let spec = build_generic(&CoherentCase::laguerre_b(1.0)?, 10_000)?;
        let mu = smallest_zero(&spec, 1e-10)?;
        let secs = start.elapsed().as_secs_f64();
        let finite = mu.lo.is_finite() && mu.hi.is_finite() && mu.lo > 0.0;
        let mut worst: f64 = 0.0;
        let mut cases = vec![
            CoherentCase::laguerre_c(0.5, -1.0, 0.0)?,
            CoherentCase::laguerre_c(0.0, -0.2, 1.0)?,
            CoherentCase::laguerre_c(1.5, 0.0, 2.0)?,
            CoherentCase::jacobi_d(0.5, 0.5, -2.0, 1.0)?,
            CoherentCase::jacobi_d(-0.5, 1.0, 1.2, 0.0)?,
            CoherentCase::jacobi_d(0.5, 0.5, 1.0, 0.0)?,
        ];
        cases.extend(draws(9, 3).into_iter().filter(|c| matches!(c.tag, CaseTag::LaguerreC | CaseTag::JacobiD)));
        for c in &cases {
            worst = worst.max(moment_cross_check(c, 40)?);
        }
        let pass = finite && secs < 1.0 && worst <= 1e-8;
        Ok(line(
            pass,
            format!(
                "n=10^4 mu in [{:.6e}, {:.6e}] in {secs:.3}s (limit 1s); moment cross-check over {} cases max rel {worst:.2e} (limit 1e-8)",
                mu.lo,
                mu.hi,
                cases.len()
            ),
        ))
    };
    run().unwrap_or_else(err_line)
}

fn main() {
    let criteria: [(&str, fn() -> Line); 9] = [
        ("reference table replication", criterion_1),
        ("bound ordering", criterion_2),
        ("dense eigen oracle", criterion_3),
        ("generic vs specialized recurrence", criterion_4),
        ("inequality verification", criterion_5),
        ("identity suites", criterion_6),
        ("asymptotics", criterion_7),
        ("cross-case consistency", criterion_8),
        ("robustness at scale", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let l = f();
        if !l.pass {
            failed += 1;
        }
        println!("{} criterion {} ({name}): {}", if l.pass { "PASS" } else { "FAIL" }, k + 1, l.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
