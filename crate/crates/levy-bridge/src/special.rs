//! Special functions: modified Bessel K0/K1 and the sine/cosine integrals.

use crate::error::{invalid, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_CROSSOVER: f64 = 2.0;

/// Modified Bessel function of the second kind, order one.
pub fn bessel_k1(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return invalid(format!("bessel_k1 needs z > 0, got {z}"));
    }
    Ok(if z < SERIES_CROSSOVER {
        k01_series(z).1
    } else {
        k01_steed(z).1
    })
}

/// Modified Bessel function of the second kind, order zero.
pub fn bessel_k0(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return invalid(format!("bessel_k0 needs z > 0, got {z}"));
    }
    Ok(if z < SERIES_CROSSOVER {
        k01_series(z).0
    } else {
        k01_steed(z).0
    })
}

/// z·K1(z) for z ≥ 0, continuous at 0 with value 1.
pub fn z_k1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else if z.is_infinite() {
        0.0
    } else if z > 745.0 {
        0.0
    } else {
        z * bessel_k1(z.abs()).unwrap_or(0.0)
    }
}

// Ascending series for small argument, (K0, K1).
fn k01_series(z: f64) -> (f64, f64) {
    let q = 0.25 * z * z;
    let lz = (0.5 * z).ln();
    let mut term0 = 1.0; // q^k / (k!)^2
    let mut term1 = 1.0; // q^k / (k! (k+1)!)
    let mut harm = 0.0; // H_k
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 0usize;
    loop {
        let psi1 = -EULER_GAMMA + harm;
        let psi2 = psi1 + 1.0 / (k as f64 + 1.0);
        i0 += term0;
        i1 += term1;
        s0 += harm * term0;
        s1 += (psi1 + psi2) * term1;
        k += 1;
        let kf = k as f64;
        term0 *= q / (kf * kf);
        term1 *= q / (kf * (kf + 1.0));
        harm += 1.0 / kf;
        if term0 < 1e-18 * i0 && k > 2 {
            break;
        }
    }
    let k0 = -(lz + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / z + lz * (0.5 * z * i1) - 0.25 * z * s1;
    (k0, k1)
}

// Steed's continued fraction (Temme's CF2) for z ≥ 2, (K0, K1).
fn k01_steed(z: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * z)).sqrt() * (-z).exp() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    (k0, k1)
}

/// Large-argument asymptotic expansion of K_ν(z), summed until terms stop decreasing.
pub fn bessel_k_asymptotic(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let next = term * (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * z);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    (PI / (2.0 * z)).sqrt() * (-z).exp() * sum
}

/// Sine and cosine integrals (Si(x), Ci(x)) for x > 0.
pub fn sici(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return invalid(format!("sici needs x > 0, got {x}"));
    }
    if x < 2.0 {
        let x2 = x * x;
        let mut si = 0.0;
        let mut ci = 0.0;
        let mut pow = x; // x^(2k+1)/(2k+1)! with sign
        let mut k = 0usize;
        loop {
            let sterm = pow / (2 * k + 1) as f64;
            si += sterm;
            // cosine term uses x^(2k+2)/(2k+2)!
            let cpow = -pow * x / (2 * k + 2) as f64;
            ci += cpow / (2 * k + 2) as f64;
            pow *= -x2 / (((2 * k + 2) * (2 * k + 3)) as f64);
            k += 1;
            if pow.abs() < 1e-18 {
                break;
            }
        }
        Ok((si, EULER_GAMMA + x.ln() + ci))
    } else {
        // Lentz evaluation of E1(ix).
        let tiny = 1e-300;
        let mut b = Complex64::new(1.0, x);
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        for i in 2..100_000 {
            let a = -((i - 1) * (i - 1)) as f64;
            b += Complex64::new(2.0, 0.0);
            d = Complex64::new(1.0, 0.0) / (d * a + b);
            c = b + Complex64::new(a, 0.0) / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        h *= Complex64::new(x.cos(), -x.sin());
        Ok((0.5 * PI + h.im, -h.re))
    }
}
