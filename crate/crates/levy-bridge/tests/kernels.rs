use levy_bridge::kernels::*;
use levy_bridge::quad::{integrate, integrate_to_inf};
use levy_bridge::spectral::{apply_semigroup, Grid1D, RealField};
use levy_bridge::special::bessel_k_asymptotic;
use std::f64::consts::PI;

fn k1_integral_oracle(z: f64) -> f64 {
    let umax = (745.0 / z).max(1.0001).acosh() + 1.0;
    integrate(|u: f64| (-z * u.cosh()).exp() * u.cosh(), 0.0, umax, 1e-300, 1e-14).0
}

#[test]
fn k1_small_argument_limit() {
    let z = 1e-6;
    assert!((z * bessel_k1(z).unwrap() - 1.0).abs() < 1e-5);
}

#[test]
fn k1_matches_integral_at_one() {
    assert!((bessel_k1(1.0).unwrap() - k1_integral_oracle(1.0)).abs() < 1e-9);
}

#[test]
fn k1_matches_asymptotic_at_ten() {
    let a = bessel_k_asymptotic(1.0, 10.0);
    assert!(((bessel_k1(10.0).unwrap() - a) / a).abs() < 1e-8);
}

#[test]
fn k1_fifty_log_spaced_points() {
    for i in 0..50 {
        let z = 10f64.powf(-3.0 + 5.0 * i as f64 / 49.0);
        let exact = k1_integral_oracle(z);
        let v = bessel_k1(z).unwrap();
        assert!(((v - exact) / exact).abs() < 1e-10, "z = {z}: {v} vs {exact}");
    }
}

fn kinds() -> [KernelKind; 3] {
    [KernelKind::Heat { d: 1.0 }, KernelKind::CauchySemigroup, KernelKind::RelativisticSemigroup { m: 1.0 }]
}

#[test]
fn kernels_positive_and_normalized() {
    for kind in kinds() {
        for &tau in &[0.25, 1.0, 3.0] {
            for &y in &[-2.0, 0.0, 5.0] {
                let f = |x: f64| kernel_eval(kind, y, 0.0, x, tau).unwrap();
                let right = integrate_to_inf(f, y, 1e-13, 1e-12);
                let left = integrate_to_inf(|u| f(2.0 * y - u), y, 1e-13, 1e-12);
                assert!((left + right - 1.0).abs() < 1e-6, "{kind:?} tau={tau}");
                for i in -20..=20 {
                    assert!(f(y + 0.7 * i as f64) > 0.0);
                }
            }
        }
    }
}

#[test]
fn kernel_is_homogeneous() {
    for kind in kinds() {
        let a = kernel_eval(kind, 1.0, 0.5, 2.5, 1.5).unwrap();
        let b = kernel_eval(kind, 0.0, 0.0, 1.5, 1.0).unwrap();
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn chapman_kolmogorov_targets() {
    let r = chapman_kolmogorov_residual(KernelKind::CauchySemigroup, 0.0, 0.5, 1.0, &Grid1D::default_cauchy()).unwrap();
    assert!(r <= 1e-6, "cauchy {r}");
    let g = Grid1D::default_relativistic();
    let r = chapman_kolmogorov_residual(KernelKind::Heat { d: 1.0 }, 0.0, 1.0, 2.0, &g).unwrap();
    assert!(r <= 1e-8, "heat {r}");
    let r = chapman_kolmogorov_residual(KernelKind::RelativisticSemigroup { m: 1.0 }, 0.0, 0.5, 1.0, &g).unwrap();
    assert!(r <= 1e-5, "relativistic {r}");
    assert!(chapman_kolmogorov_residual(KernelKind::CauchySemigroup, 0.0, 1.0, 0.5, &g).is_err());
}

fn delta(grid: Grid1D) -> RealField {
    let mut f = RealField::zeros(grid);
    f.samples[grid.index_of(0.0).unwrap()] = 1.0 / grid.dx();
    f
}

// Poisson kernel summed over images of period L.
fn periodic_cauchy(x: f64, t: f64, len: f64) -> f64 {
    let a = 2.0 * PI * t / len;
    let b = 2.0 * PI * x / len;
    a.sinh() / (len * (a.cosh() - b.cos()))
}

#[test]
fn cauchy_semigroup_of_delta_matches_periodic_kernel() {
    let g = Grid1D::symmetric(200.0, 4096).unwrap();
    let out = apply_semigroup(&delta(g), levy_bridge::NoiseKind::Cauchy, 1.0).unwrap();
    let exact = RealField::from_fn(g, |x| periodic_cauchy(x, 1.0, g.length())).unwrap();
    assert!(out.l1_diff(&exact) <= 1e-3);
    assert!(out.max_abs_diff(&exact) < 1e-12);
}

#[test]
fn cauchy_semigroup_of_delta_matches_whole_line_kernel_on_wide_grid() {
    let g = Grid1D::symmetric(800.0, 16384).unwrap();
    let out = apply_semigroup(&delta(g), levy_bridge::NoiseKind::Cauchy, 1.0).unwrap();
    let exact = kernel_field(KernelKind::CauchySemigroup, 1.0, &g).unwrap();
    assert!(out.l1_diff(&exact) <= 1e-3, "{}", out.l1_diff(&exact));
}

#[test]
fn relativistic_semigroup_of_delta_matches_kernel() {
    let g = Grid1D::default_relativistic();
    let kind = KernelKind::RelativisticSemigroup { m: 1.0 };
    let out = apply_semigroup(&delta(g), kind.noise(), 1.0).unwrap();
    let exact = kernel_field(kind, 1.0, &g).unwrap();
    assert!(out.l1_diff(&exact) <= 1e-3);
    assert!(out.max_abs_diff(&exact) < 1e-8);
}

#[test]
fn bernstein_symmetry_normalization_closed_form() {
    let p = BernsteinParams { alpha0: 1.0, d: 1.0 };
    let g = Grid1D::symmetric(20.0, 2048).unwrap();
    for x in g.xs() {
        let a = bernstein_density(x, 0.3, p).unwrap();
        let b = bernstein_density(x, -0.3, p).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((a - bernstein_closed_form(x, 0.3, p)).abs() < 1e-10);
    }
    for &t in &[0.0, 0.4, -0.4] {
        let f = RealField::from_fn(g, |x| bernstein_density(x, t, p).unwrap()).unwrap();
        assert!((f.integral() - 1.0).abs() < 1e-8);
    }
    assert!(bernstein_density(0.0, 1.0, p).is_err());
}

#[test]
fn g_table_is_even_positive_normalized_and_matches_oracle() {
    let table = GTable::new();
    let g = Grid1D::symmetric(400.0, 1 << 16).unwrap();
    let f = table.sample(&g);
    let x_hi = 400.0 - 0.5 * g.dx();
    let x_lo = 400.0 + 0.5 * g.dx();
    let tail = |x: f64| (1.0 / x - 2.0 / x.powi(3)) / PI;
    let mass = f.integral() + tail(x_lo) + tail(x_hi);
    assert!((mass - 1.0).abs() < 1e-4, "mass {mass}");
    assert!(f.samples.iter().all(|&v| v > 0.0));
    for &x in &[1e-3, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0, 390.0, 500.0] {
        assert_eq!(table.eval(x), table.eval(-x));
        let o = g_closed_form_oracle(x).unwrap();
        assert!((table.eval(x) - o).abs() < 1e-6 * o.abs().max(1.0), "x={x}");
    }
}

fn rho57(x: f64, s: f64) -> f64 {
    let r0 = |y: f64| (2.0 / PI) / (1.0 + y * y).powi(2);
    (1.0 + s * s) * (r0(x + s) * r0(x - s)).sqrt()
}

#[test]
fn transition_kernel_positive_and_moments() {
    let g = Grid1D::symmetric(400.0, 1 << 17).unwrap();
    for &t in &[0.5, 1.0, 2.0] {
        let k = UnitaryTransitionKernel::new(t).unwrap();
        let f = k.sample(&g);
        assert!(f.samples.iter().all(|&v| v > 0.0), "t={t}");
        let (m0, m1, m2) = k.moments(&g);
        assert!((m0 - 1.0).abs() < 1e-4, "t={t} mass {m0}");
        assert!(m1.abs() < 1e-6, "t={t} mean {m1}");
        assert!((m2 - t * t).abs() < 1e-3 * t * t, "t={t} second {m2}");
        assert!(k.eval(t).is_err());
        assert!(k.eval(-t).is_err());
    }
}

#[test]
fn transition_kernel_transports_initial_density() {
    let g = Grid1D::symmetric(40.0, 4096).unwrap();
    let h = g.dx();
    let n = g.n;
    let r0: Vec<f64> = g.xs().iter().map(|&y| rho57(y, 0.0)).collect();
    for &t in &[0.5, 1.0, 2.0] {
        let k = UnitaryTransitionKernel::new(t).unwrap();
        let p: Vec<f64> = (0..2 * n - 1).map(|i| k.sample_cell((i as f64 - (n as f64 - 1.0)) * h, h)).collect();
        let mut l1 = 0.0;
        for j in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += p[j + n - 1 - i] * r0[i];
            }
            l1 += (acc * h - rho57(g.x(j), t)).abs() * h;
        }
        assert!(l1 <= 1e-3, "t={t} L1 {l1}");
    }
}
