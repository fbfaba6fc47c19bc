use nlmg::assembly::{assemble, Kernel, ProblemSpec};
use nlmg::dense::{cholesky_solve, matvec};
use nlmg::spectral::{check_interlacing, coefficient_property_check, det_identity_check};
use nlmg::structured::{residual, PreparedOperator};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn fft_vs_dense(kernel: Kernel, intervals: usize, seed: u64) -> f64 {
    let spec = ProblemSpec::with_intervals(kernel, intervals).unwrap();
    let a = assemble(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<f64> = (0..a.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let fast = a.apply(&x).unwrap();
    let slow = matvec(&a.to_dense().unwrap(), &x);
    let diff: Vec<f64> = fast.iter().zip(&slow).map(|(p, q)| p - q).collect();
    max_abs(&diff) / max_abs(&slow)
}

#[test]
fn fft_matches_dense_at_awkward_sizes() {
    assert!(fft_vs_dense(Kernel::fractional(1.5).unwrap(), 258, 1) <= 1e-12);
    assert!(fft_vs_dense(Kernel::fractional(1.3).unwrap(), 128, 2) <= 1e-12);
    assert!(fft_vs_dense(Kernel::Constant, 256, 3) <= 1e-12);
}

#[test]
fn fft_matches_dense_up_to_4096() {
    for kernel in [Kernel::fractional(1.9).unwrap(), Kernel::Constant] {
        for n in [2, 3, 17, 1024, 4096] {
            assert!(fft_vs_dense(kernel, n, n as u64) <= 1e-12, "{kernel} N {n}");
        }
    }
}

#[test]
fn residual_of_dense_solution_is_small() {
    for kernel in [Kernel::fractional(1.5).unwrap(), Kernel::Constant] {
        let spec = ProblemSpec::new(kernel, 6).unwrap();
        let a = assemble(&spec).unwrap();
        let f = vec![1.0; a.n()];
        let x = cholesky_solve(&a.to_dense().unwrap(), &f).unwrap();
        let r = residual(&a, &x, &f).unwrap();
        assert!(max_abs(&r) <= 1e-10, "{kernel}");
        let prepared = PreparedOperator::new(a);
        assert_eq!(prepared.residual(&x, &f).unwrap(), r);
    }
}

#[test]
fn coefficient_properties_across_orders() {
    for alpha in [1.1, 1.3, 1.5, 1.7, 1.9] {
        let kernel = Kernel::fractional(alpha).unwrap();
        for n in [8, 64, 512] {
            let spec = ProblemSpec::with_intervals(kernel, n).unwrap();
            let report = coefficient_property_check(&assemble(&spec).unwrap(), kernel).unwrap();
            assert!(
                report.passed(),
                "alpha {alpha} N {n}: {:?}",
                report.violations
            );
            assert!(report.lambda_max < 2.0);
        }
    }
}

#[test]
fn constant_kernel_spectral_facts() {
    let mut n = 8;
    while n <= 512 {
        let r = check_interlacing(n).unwrap();
        assert!(r.passed(), "interlacing N {n}: {:?}", r.bound_violations);
        let g = det_identity_check(n).unwrap();
        assert!(g.passed(), "gap N {n}");
        n *= 2;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn operator_is_symmetric(alpha in 1.01f64..1.99, n in 2usize..80, seed in any::<u64>()) {
        let kernel = Kernel::fractional(alpha).unwrap();
        let a = assemble(&ProblemSpec::with_intervals(kernel, n).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..a.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..a.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ax = a.apply(&x).unwrap();
        let ay = a.apply(&y).unwrap();
        let lhs: f64 = ax.iter().zip(&y).map(|(p, q)| p * q).sum();
        let rhs: f64 = ay.iter().zip(&x).map(|(p, q)| p * q).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (lhs.abs() + rhs.abs() + 1.0));
        // positive definite: x^T A x > 0
        let energy: f64 = ax.iter().zip(&x).map(|(p, q)| p * q).sum();
        prop_assert!(energy > 0.0);
    }

    #[test]
    fn fft_matches_dense_random(alpha in 1.01f64..1.99, n in 2usize..300, seed in any::<u64>()) {
        prop_assert!(fft_vs_dense(Kernel::fractional(alpha).unwrap(), n, seed) <= 1e-12);
    }
}
