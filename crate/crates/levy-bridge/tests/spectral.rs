use levy_bridge::bridge::{free_packet, GaussianParams};
use levy_bridge::quantum::cauchy_closed_form_state;
use levy_bridge::spectral::*;
use num_complex::Complex64;
use proptest::prelude::*;

const KINDS: [NoiseKind; 3] = [NoiseKind::Gaussian { d: 0.5 }, NoiseKind::Cauchy, NoiseKind::Relativistic { m: 1.0 }];

fn bump(g: Grid1D) -> RealField {
    RealField::from_fn(g, |x| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()).unwrap()
}

fn plane_wave(g: Grid1D, k: usize) -> (f64, ComplexField) {
    let p0 = k as f64 * g.dp();
    (p0, ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, p0 * (x - g.x_min))).unwrap())
}

#[test]
fn exponent_values() {
    assert_eq!(exponent_eval(NoiseKind::Cauchy, 2.0), 2.0);
    assert_eq!(exponent_eval(NoiseKind::Relativistic { m: 1.0 }, 0.0), 0.0);
    assert!((exponent_eval(NoiseKind::Relativistic { m: 1.0 }, 1.0) - 0.41421356).abs() < 1e-8);
    for kind in KINDS {
        for &p in &[0.3, 2.0, 17.0] {
            assert_eq!(exponent_eval(kind, p), exponent_eval(kind, -p));
            assert!(exponent_eval(kind, p) >= 0.0);
        }
    }
}

#[test]
fn grid_validation() {
    assert!(Grid1D::new(0.0, 1.0, 12).is_err());
    assert!(Grid1D::new(0.0, 1.0, 8).is_err());
    assert!(Grid1D::new(1.0, 0.0, 64).is_err());
    let g = Grid1D::new(-1.0, 1.0, 64).unwrap();
    assert!((g.dx() - 2.0 / 64.0).abs() < 1e-15);
    let f = g.freqs();
    assert!(f.iter().all(|&p| p >= -std::f64::consts::PI / g.dx() && p < std::f64::consts::PI / g.dx()));
}

#[test]
fn zero_time_is_identity() {
    let g = Grid1D::symmetric(20.0, 256).unwrap();
    let f = bump(g);
    for kind in KINDS {
        assert_eq!(apply_semigroup(&f, kind, 0.0).unwrap(), f);
        let c = f.to_complex();
        assert_eq!(apply_unitary(&c, kind, 0.0).unwrap(), c);
    }
    assert!(apply_semigroup(&f, NoiseKind::Cauchy, -1.0).is_err());
}

#[test]
fn parseval() {
    let g = Grid1D::symmetric(30.0, 1024).unwrap();
    let f = bump(g).to_complex();
    let fhat = fourier_transform(&f);
    let norm_hat: f64 = fhat.iter().map(|(_, v)| v.norm_sqr()).sum::<f64>() * g.dp();
    assert!((norm_hat.sqrt() - f.norm_l2()).abs() < 1e-12);
    let back = inverse_fourier_transform(&g, &fhat).unwrap();
    assert!(back.max_abs_diff(&f) < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn unitary_preserves_norm(seed in proptest::collection::vec(-1.0f64..1.0, 32), s in -5.0f64..5.0, k in 0usize..3) {
        let g = Grid1D::symmetric(10.0, 256).unwrap();
        let f = ComplexField::from_fn(g, |x| {
            seed.iter().enumerate().map(|(i, &c)| Complex64::from_polar(c, 0.3 * i as f64 * x)).sum::<Complex64>()
                * (-x * x / 8.0).exp()
        }).unwrap();
        let out = apply_unitary(&f, KINDS[k], s).unwrap();
        prop_assert!((out.norm_l2() - f.norm_l2()).abs() <= 1e-12 * f.norm_l2());
    }
}

#[test]
fn semigroup_law_and_mass() {
    let g = Grid1D::symmetric(50.0, 1024).unwrap();
    let f = bump(g);
    let m0 = f.integral();
    for kind in KINDS {
        for &t1 in &[0.1, 0.5, 1.0] {
            for &t2 in &[0.1, 0.5, 1.0] {
                let a = apply_semigroup(&apply_semigroup(&f, kind, t1).unwrap(), kind, t2).unwrap();
                let b = apply_semigroup(&f, kind, t1 + t2).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-10);
                assert!((b.integral() - m0).abs() <= 1e-10 * m0);
            }
        }
    }
}

#[test]
fn generator_is_first_order_limit_of_semigroup() {
    let g = Grid1D::symmetric(50.0, 1024).unwrap();
    let f = bump(g);
    for kind in KINDS {
        let hf = apply_generator_spectral_real(&f, kind).unwrap();
        let err = |h: f64| {
            let s = apply_semigroup(&f, kind, h).unwrap();
            let fd = RealField { grid: g, samples: f.samples.iter().zip(&s.samples).map(|(a, b)| (a - b) / h).collect() };
            fd.max_abs_diff(&hf)
        };
        let order = (err(1e-2) / err(1e-3)).log10();
        assert!(order >= 0.9, "{kind:?}: {order}");
    }
}

#[test]
fn generator_eigenfunctions_and_constants() {
    let g = Grid1D::symmetric(20.0, 512).unwrap();
    let (p0, w) = plane_wave(g, 7);
    let hw = apply_generator_spectral(&w, NoiseKind::Cauchy).unwrap();
    assert!(hw.max_abs_diff(&w.scale(Complex64::new(p0, 0.0))) < 1e-12);
    let ones = ComplexField::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
    for kind in KINDS {
        assert!(apply_generator_spectral(&ones, kind).unwrap().max_abs() < 1e-13);
    }
    let nw = newton_wigner_map(&w, 1.0).unwrap();
    assert!(nw.max_abs_diff(&w.scale(Complex64::new((p0 * p0 + 1.0).powf(0.25), 0.0))) < 1e-12);
    let zero = ComplexField::from_fn(g, |_| Complex64::new(0.0, 0.0)).unwrap();
    assert_eq!(newton_wigner_map(&zero, 2.0).unwrap().max_abs(), 0.0);
}

#[test]
fn levy_quadrature_matches_spectral_generator() {
    let g = Grid1D::symmetric(40.0, 2048).unwrap();
    let f = bump(g).to_complex();
    let spec = apply_generator_spectral(&f, NoiseKind::Cauchy).unwrap();
    let mut prev = f64::INFINITY;
    // strictly decreasing until the ~3e-9 roundoff floor is reached
    for &eps in &[0.4, 0.2, 0.1, 1e-2, 1e-3, 1e-4] {
        let e = apply_generator_levy(&f, NoiseKind::Cauchy, eps).unwrap().max_abs_diff(&spec);
        assert!(e < prev || e < 1e-8, "eps={eps}: {e} vs {prev}");
        prev = e;
    }
    assert!(prev <= 1e-3, "{prev}");
    let rel = NoiseKind::Relativistic { m: 1.0 };
    let e = apply_generator_levy(&f, rel, 1e-4).unwrap().max_abs_diff(&apply_generator_spectral(&f, rel).unwrap());
    assert!(e <= 1e-4, "relativistic {e}");
}

#[test]
fn levy_quadrature_on_plane_wave_and_constant() {
    let g = Grid1D::symmetric(20.0, 512).unwrap();
    let (p0, w) = plane_wave(g, 5);
    let hw = apply_generator_levy(&w, NoiseKind::Cauchy, 1e-4).unwrap();
    assert!(hw.max_abs_diff(&w.scale(Complex64::new(p0, 0.0))) <= 1e-3 * p0);
    let ones = ComplexField::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
    assert!(apply_generator_levy(&ones, NoiseKind::Cauchy, 1e-3).unwrap().max_abs() < 1e-12);
    assert!(apply_generator_levy(&ones, NoiseKind::Gaussian { d: 1.0 }, 1e-3).is_err());
    assert!(apply_generator_levy(&ones, NoiseKind::Cauchy, 0.0).is_err());
}

#[test]
fn unitary_evolution_matches_cauchy_closed_form() {
    let g = Grid1D::default_cauchy();
    let psi0 = ComplexField::from_fn(g, |x| cauchy_closed_form_state(x, 0.0)).unwrap();
    for &t in &[0.25, 0.5, 1.0, 2.0] {
        let out = apply_unitary(&psi0, NoiseKind::Cauchy, t).unwrap();
        let exact = ComplexField::from_fn(g, |x| cauchy_closed_form_state(x, t)).unwrap();
        let e = out.max_abs_diff(&exact);
        assert!(e <= 1e-4, "t={t}: {e}");
    }
}

#[test]
fn unitary_evolution_matches_free_gaussian_packet() {
    let g = Grid1D::symmetric(40.0, 1024).unwrap();
    let p = GaussianParams::NELSON;
    let psi0 = ComplexField::from_fn(g, |x| free_packet(x, 0.0, p).unwrap()).unwrap();
    for &t in &[0.5, 1.0, 2.0] {
        let out = apply_unitary(&psi0, NoiseKind::Gaussian { d: p.d }, t).unwrap();
        let exact = ComplexField::from_fn(g, |x| free_packet(x, t, p).unwrap()).unwrap();
        assert!(out.max_abs_diff(&exact) <= 1e-6, "t={t}");
    }
}

#[test]
fn newton_wigner_commutes_and_normalizes() {
    let g = Grid1D::default_relativistic();
    let m = 1.0;
    let phi = ComplexField::from_fn(g, |x| Complex64::from_polar((-x * x / 2.0).exp(), 0.7 * x)).unwrap();
    let kind = NoiseKind::Relativistic { m };
    let a = newton_wigner_map(&apply_unitary(&phi, kind, 0.8).unwrap(), m).unwrap();
    let b = apply_unitary(&newton_wigner_map(&phi, m).unwrap(), kind, 0.8).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-10);
    // ½(φ, φ) = 1 gives ‖NW φ‖₂ = 1
    let kg = klein_gordon_product(&phi, &phi, m);
    assert!(kg.im.abs() < 1e-12 && kg.re > 0.0);
    let normalized = phi.scale(Complex64::new((2.0 / kg.re).sqrt(), 0.0));
    let kg1 = klein_gordon_product(&normalized, &normalized, m);
    assert!((0.5 * kg1.re - 1.0).abs() < 1e-12);
    let nw = newton_wigner_map(&normalized, m).unwrap();
    assert!((nw.norm_l2() - 1.0).abs() < 1e-10);
    assert!(newton_wigner_map(&phi, 0.0).is_err());
}
