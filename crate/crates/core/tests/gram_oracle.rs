//! μ₁,ₙ from the Gram matrices of `c₀` and `c₁` on `P_1..P_n`, by quadrature.
//! Independent of `σ_n`, the `T_n` family and the moment sequences.

use coherent_mb::functionals::{Functional, Side};
use coherent_mb::recurrence::build_generic;
use coherent_mb::solver::smallest_zero;
use coherent_mb::{CoherentCase, PairData};
use nalgebra::{DMatrix, SymmetricEigen};

fn gram_mu(case: &CoherentCase, n: usize) -> f64 {
    let data = PairData::new(*case, n).unwrap();
    let c0 = Functional::for_case(case, Side::C0, 2 * n).unwrap();
    let c1 = Functional::for_case(case, Side::C1, 2 * n - 2).unwrap();
    let norm: Vec<f64> = (0..=n).map(|j| (0.5 * data.log_k0(j)).exp()).collect();
    let mut g0 = DMatrix::<f64>::zeros(n, n);
    let mut g1 = DMatrix::<f64>::zeros(n, n);
    for i in 1..=n {
        for j in i..=n {
            let v0 = c0.apply(|x| data.p_eval(i, x).0 * data.p_eval(j, x).0) / (norm[i] * norm[j]);
            let v1 = c1.apply(|x| data.p_eval(i, x).1 * data.p_eval(j, x).1) / (norm[i] * norm[j]);
            g0[(i - 1, j - 1)] = v0;
            g0[(j - 1, i - 1)] = v0;
            g1[(i - 1, j - 1)] = v1;
            g1[(j - 1, i - 1)] = v1;
        }
    }
    let l = g0.cholesky().expect("c0 Gram matrix is positive definite").l();
    let li = l.try_inverse().unwrap();
    let m = &li * g1 * li.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let top = SymmetricEigen::new(m).eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    1.0 / top
}

fn check(case: CoherentCase, ns: &[usize], tol: f64) {
    let n_max = *ns.iter().max().unwrap();
    let spec = build_generic(&case, n_max).unwrap();
    for &n in ns {
        let mu = smallest_zero(&spec.truncate(n), 1e-13).unwrap().mid();
        let g = gram_mu(&case, n);
        assert!((mu - g).abs() <= tol * g, "{case} n={n}: recurrence {mu} vs Gram {g}");
    }
}

#[test]
fn laguerre_cases() {
    check(CoherentCase::laguerre_a(1.0, -1.0).unwrap(), &[1, 2, 5, 10], 1e-8);
    check(CoherentCase::laguerre_b(1.0).unwrap(), &[1, 2, 5, 10], 1e-8);
    check(CoherentCase::laguerre_c(0.5, -1.0, 1.0).unwrap(), &[1, 2, 5, 10], 1e-8);
    check(CoherentCase::laguerre_c(0.5, 0.0, 2.0).unwrap(), &[1, 2, 5, 10], 1e-8);
}

#[test]
fn jacobi_cases() {
    check(CoherentCase::jacobi_a(1.0, 1.0, 2.0).unwrap(), &[1, 2, 5, 10], 1e-8);
    check(CoherentCase::jacobi_a(0.5, 2.0, -1.5).unwrap(), &[1, 2, 5, 10], 1e-8);
    check(CoherentCase::jacobi_b(1.5, 1.0).unwrap(), &[1, 2, 5, 10], 1e-8);
    check(CoherentCase::jacobi_c(2.0, 0.5).unwrap(), &[1, 2, 5, 10], 1e-8);
    check(CoherentCase::jacobi_d(0.5, 0.5, 1.0, 0.0).unwrap(), &[1, 2, 5, 10], 1e-8);
    check(CoherentCase::jacobi_d(0.5, 0.5, -2.0, 0.0).unwrap(), &[1, 2, 5, 10], 1e-8);
    check(CoherentCase::jacobi_d(0.5, 0.5, -2.0, 1.0).unwrap(), &[1, 2, 5, 10], 1e-8);
    check(CoherentCase::jacobi_d(1.2, 0.6, 3.2, 7.5).unwrap(), &[1, 2, 5, 10, 11], 1e-8);
}
