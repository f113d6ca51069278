use levy_bridge::markov_diag::*;
use levy_bridge::quantum::cauchy_rho_hat;
use levy_bridge::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn h_at_origin_and_evenness() {
    assert_eq!(h_ratio(0.0, 1.0, 2.0).unwrap(), 1.0);
    for &p in &[0.3, 1.7, 5.2, 11.0] {
        assert_eq!(h_ratio(p, 0.7, 1.9).unwrap(), h_ratio(-p, 0.7, 1.9).unwrap());
    }
    assert!(h_ratio(1.0, 2.0, 1.0).is_err());
    assert!(h_ratio(1.0, 1.0, 1.0).is_err());
    assert!(h_ratio(1.0, 0.0, 1.0).is_err());
}

#[test]
fn h_is_ratio_of_characteristic_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 64 {
        let s = rng.random_range(0.1..2.0);
        let t = s + rng.random_range(0.1..2.0);
        let p = rng.random_range(-6.0..6.0);
        let Ok(h) = h_ratio(p, s, t) else { continue };
        let lhs = cauchy_rho_hat(p, t).unwrap();
        let rhs = cauchy_rho_hat(p, s).unwrap() * h;
        assert!((lhs - rhs).abs() < 1e-12, "p={p} s={s} t={t}");
        checked += 1;
    }
}

#[test]
fn pole_is_signaled() {
    let z = denominator_zeros(1.0, 1).unwrap()[0];
    assert!((z - 3.0 * PI / 4.0).abs() < 1e-14);
    assert!(matches!(h_ratio(z, 1.0, 2.0), Err(Error::PoleProximity { .. })));
}

#[test]
fn zeros_annihilate_denominator() {
    for &s in &[0.3, 1.0, 2.5, 40.0] {
        let k = RatioKernel::new(s, s + 1.0).unwrap();
        for z in denominator_zeros(s, 10).unwrap() {
            assert!(k.denominator(z).abs() < 1e-12, "s={s} z={z}");
        }
    }
    let s = 1e4;
    let zs = denominator_zeros(s, 3).unwrap();
    for (n, z) in zs.iter().enumerate() {
        let asym = (2 * n + 1) as f64 * PI / 2.0 / s;
        assert!((z - asym).abs() / asym < 1e-4);
    }
    assert!(denominator_zeros(0.0, 3).is_err());
    assert!(denominator_zeros(1.0, 0).is_err());
}

#[test]
fn two_point_behaviour() {
    let near = two_point_violation(1e-6, 0.0, 1.0, 2.0).unwrap();
    assert!((near.m - 1.0).abs() < 1e-5 && near.det.abs() < 1e-5);
    let pole = two_point_violation(3.0 * PI / 4.0 - 1e-4, 0.0, 1.0, 2.0).unwrap();
    assert!(pole.is_violation());
    let far = two_point_violation(0.1, 0.0, 1.0, 2.0).unwrap();
    assert!(!far.is_violation(), "{far:?}");
    assert!(two_point_violation(1.0, 1.0, 1.0, 2.0).is_err());
}

#[test]
fn jacobi_eigenvalues() {
    let ev = symmetric_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2).unwrap();
    assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    let n = 6;
    let ones = vec![1.0; n * n];
    let ev = symmetric_eigenvalues(&ones, n).unwrap();
    assert!(ev[0].abs() < 1e-12 && (ev[n - 1] - n as f64).abs() < 1e-12);
    assert!(symmetric_eigenvalues(&[1.0, 2.0, 0.0, 1.0], 2).is_err());
    assert!(pd_matrix_min_eigenvalue(|_| Ok(1.0), &[0.0, 1.0, 2.5]).unwrap().abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn jacobi_trace_and_determinant(v in proptest::collection::vec(-3.0f64..3.0, 6)) {
        let a = [v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], v[5]];
        let ev = symmetric_eigenvalues(&a, 3).unwrap();
        let tr = v[0] + v[3] + v[5];
        let det = a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) + a[2] * (a[3] * a[7] - a[4] * a[6]);
        prop_assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-10);
        prop_assert!((ev.iter().product::<f64>() - det).abs() < 1e-9);
    }
}

#[test]
fn characteristic_multipliers_pass_random_pd_tests() {
    let m = random_pd_test(|p| Ok(1.0 / (1.0 + p.abs())), 8, 100, 10.0, 1).unwrap();
    assert!(m >= -1e-12, "{m}");
    for (i, &t) in [0.5, 1.0, 2.0].iter().enumerate() {
        let m = random_pd_test(|p| Ok(ground_multiplier(p, t)), 8, 100, 10.0, 10 + i as u64).unwrap();
        assert!(m >= -1e-10, "t={t}: {m}");
    }
}

#[test]
fn witness_for_unit_times() {
    let w = find_nonmarkov_witness(1.0, 2.0).unwrap();
    let p = w.witness;
    assert!(((p.p1 - p.p2).abs() - 3.0 * PI / 4.0).abs() < 1e-3);
    assert!(p.m.abs() > 10.0);
    assert!(p.min_eigenvalue < 0.0);
    assert!(w.skipped_zeros.is_empty());
    // the ratio kernel also fails a multi-point test containing the witness pair
    let k = RatioKernel::new(1.0, 2.0).unwrap();
    let ev = pd_matrix_min_eigenvalue(|d| k.eval(d), &[0.0, p.p1, 0.4]).unwrap();
    assert!(ev < 0.0);
}

#[test]
fn witness_exists_for_other_times() {
    let w = find_nonmarkov_witness(0.5, 1.7).unwrap();
    assert!(w.witness.m.abs() > 1.0 && w.witness.min_eigenvalue < 0.0);
    assert!(find_nonmarkov_witness(1.0, 1.0).is_err());
}

#[test]
fn degenerate_zeros_are_skipped() {
    // choose t so the numerator vanishes at the first denominator zero of s = 1
    let z = 3.0 * PI / 4.0;
    let g = |t: f64| (t * z).cos() + (t * z).sin() / t;
    let (mut lo, mut hi) = (1.2, 2.5);
    assert!(g(lo) * g(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let w = find_nonmarkov_witness(1.0, t).unwrap();
    assert_eq!(w.skipped_zeros, vec![0]);
    assert_eq!(w.witness.zero_index, 1);
    assert!(w.witness.m.abs() > 1.0);
}

#[test]
fn witness_modulus_grows_toward_pole() {
    let v = witness_stability(1.0, 2.0, 0, 1e-3, 4).unwrap();
    for w in v.windows(2) {
        assert!(w[1] > w[0], "{v:?}");
    }
}

#[test]
fn profile_skips_poles() {
    let pr = h_profile(1.0, 2.0, 0.0, 10.0, 501).unwrap();
    assert!(!pr.is_empty());
    assert!(pr.iter().all(|(_, h)| h.is_finite()));
    assert_eq!(pr[0], (0.0, 1.0));
}
