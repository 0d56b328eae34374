//! Independent reference computations for the special functions and the
//! squeezed-coherent amplitudes.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use qrabi::observables::mandel_q;
use qrabi::special::hermite_log_scaled;
use qrabi::squeezed::{amplitude, photon_number_distribution};
use qrabi::{ModelKind, SqueezeSpec};

/// `q^n H_n(p/q)` exactly, via the integer form of the three-term recurrence.
fn scaled_hermite(n: usize, p: i64, q: i64) -> BigInt {
    let (p, q2) = (BigInt::from(p), BigInt::from(q * q));
    let mut prev = BigInt::from(1);
    if n == 0 {
        return prev;
    }
    let mut cur = BigInt::from(2) * &p;
    for k in 1..n {
        let next = BigInt::from(2) * &p * &cur - BigInt::from(2 * k as i64) * &q2 * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(62);
    let top = (x.abs() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[test]
fn hermite_small_exact_value() {
    assert_eq!(
        scaled_hermite(10, 3, 2),
        BigInt::from(-85401) * BigInt::from(1024)
    );
    assert!((hermite_log_scaled(10, 1.5).to_f64() + 85401.0).abs() < 85401.0 * 1e-15);
}

#[test]
fn hermite_matches_exact_rational_recurrence() {
    // x = p / 4 covers |x| <= 20 on a quarter grid
    let mut worst = 0.0f64;
    for p in (-80..=80).step_by(3) {
        let x = p as f64 / 4.0;
        for n in [0, 1, 2, 5, 17, 40, 63, 100, 128, 151, 199, 200] {
            let exact = scaled_hermite(n, p, 4);
            let ours = hermite_log_scaled(n, x);
            if exact.is_zero() {
                assert!(ours.is_zero(), "H_{n}({x}) should vanish");
                continue;
            }
            let sign = if exact.is_negative() { -1 } else { 1 };
            assert_eq!(ours.sign(), sign, "sign of H_{n}({x})");
            let ln_exact = ln_big(&exact) - n as f64 * 4f64.ln();
            let rel = (ours.log_magnitude() - ln_exact).abs() / ln_exact.abs().max(1.0);
            worst = worst.max(rel);
            assert!(
                rel < 1e-12,
                "H_{n}({x}): {} vs {ln_exact}",
                ours.log_magnitude()
            );
        }
    }
    assert!(worst < 1e-12);
}

/// `D(alpha) S(r) |0>` by dense matrix exponentials in a truncated Fock space.
fn displaced_squeezed_vacuum(alpha: f64, r: f64, dim: usize) -> Vec<f64> {
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    let ad = a.transpose();
    let squeeze = ((&a * &a - &ad * &ad) * (0.5 * r)).exp();
    let displace = ((&ad - &a) * alpha).exp();
    let mut vac = nalgebra::DVector::<f64>::zeros(dim);
    vac[0] = 1.0;
    (displace * (squeeze * vac)).iter().copied().collect()
}

#[test]
fn amplitude_matches_operator_construction() {
    let reference = displaced_squeezed_vacuum(2.0, 0.5, 160);
    let spec = SqueezeSpec::new(2.0, 0.5).unwrap();
    assert!((reference[3] - 0.432_592_457_988_004_3).abs() < 1e-12);
    for (n, expected) in reference.iter().enumerate().take(40) {
        let ours = amplitude(n, &spec).unwrap();
        assert!(
            (ours - expected).abs() < 1e-12,
            "n={n}: {ours} vs {expected}"
        );
    }
}

#[test]
fn amplitude_matches_operator_construction_other_points() {
    for (alpha, r) in [(0.0, 0.8), (1.0, 0.1), (-1.5, 0.3), (3.0, 1e-6)] {
        let reference = displaced_squeezed_vacuum(alpha, r, 200);
        let spec = SqueezeSpec::new(alpha, r).unwrap();
        for (n, expected) in reference.iter().enumerate().take(50) {
            let ours = amplitude(n, &spec).unwrap();
            assert!(
                (ours - expected).abs() < 1e-11,
                "alpha={alpha} r={r} n={n}: {ours} vs {expected}"
            );
        }
    }
}

/// Mandel Q of squeezed vacuum from its closed-form even-n distribution.
fn squeezed_vacuum_q(r: f64) -> f64 {
    let t2 = r.tanh().powi(2);
    let (mut mean, mut second) = (0.0, 0.0);
    // P_{2m} = (2m)! / (2^m m!)^2 tanh^{2m} r / cosh r, built by ratios
    let mut p = 1.0 / r.cosh();
    for m in 0..4000u32 {
        let n = 2.0 * m as f64;
        mean += n * p;
        second += n * n * p;
        p *= t2 * (2 * m + 1) as f64 / (2 * m + 2) as f64;
    }
    (second - mean * mean - mean) / mean
}

#[test]
fn squeezed_vacuum_mandel_is_cosh_2r() {
    assert!((squeezed_vacuum_q(1.0) - 3.762_195_691_083_631_4).abs() < 1e-10);
    for r in [0.3, 1.0, 1.5] {
        // the heavy tail carries n^2 weight, so truncate tighter than the default
        let dist = photon_number_distribution(&SqueezeSpec::new(0.0, r).unwrap(), 1e-15).unwrap();
        let q = mandel_q(dist.probs(), ModelKind::Jc).unwrap().q;
        let expected = (2.0 * r).cosh();
        assert!((squeezed_vacuum_q(r) - expected).abs() < 1e-9 * expected);
        assert!(
            (q - expected).abs() < 1e-9 * expected,
            "r={r}: {q} vs {expected}"
        );
    }
}
