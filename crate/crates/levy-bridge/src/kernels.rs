//! Closed-form semigroup kernels, the unitary Cauchy transition kernel and
//! kernel consistency checks.

use crate::error::{invalid, Error, Result};
use crate::quad::integrate_pts;
use crate::spectral::{idft, Grid1D, NoiseKind, RealField};
use crate::special::{bessel_k0, z_k1};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub use crate::special::bessel_k1;

/// Transition kernels k(y,s,x,t) = k_{t−s}(x−y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    Heat {
        #[serde(rename = "D")]
        d: f64,
    },
    CauchySemigroup,
    RelativisticSemigroup { m: f64 },
}

impl KernelKind {
    pub fn validate(&self) -> Result<()> {
        self.noise().validate()
    }

    /// The noise whose semigroup this kernel represents.
    pub fn noise(&self) -> NoiseKind {
        match *self {
            KernelKind::Heat { d } => NoiseKind::Gaussian { d },
            KernelKind::CauchySemigroup => NoiseKind::Cauchy,
            KernelKind::RelativisticSemigroup { m } => NoiseKind::Relativistic { m },
        }
    }

    pub fn from_noise(kind: NoiseKind) -> Self {
        match kind {
            NoiseKind::Gaussian { d } => KernelKind::Heat { d },
            NoiseKind::Cauchy => KernelKind::CauchySemigroup,
            NoiseKind::Relativistic { m } => KernelKind::RelativisticSemigroup { m },
        }
    }

    /// k_τ(r) for τ > 0 (unchecked).
    pub fn density(&self, r: f64, tau: f64) -> f64 {
        match *self {
            KernelKind::Heat { d } => (-(r * r) / (4.0 * d * tau)).exp() / (4.0 * PI * d * tau).sqrt(),
            KernelKind::CauchySemigroup => tau / (PI * (tau * tau + r * r)),
            KernelKind::RelativisticSemigroup { m } => {
                let rho = (r * r + tau * tau).sqrt();
                let z = m * rho;
                // m τ e^{mτ} K1(mρ)/(πρ) = τ e^{m(τ−ρ)} · [e^{z} z K1(z)] / (π ρ²)
                let scaled = if z < 2.0 { z_k1(z) * z.exp() } else { scaled_zk1(z) };
                tau * (m * (tau - rho)).exp() * scaled / (PI * rho * rho)
            }
        }
    }
}

// e^{z}·z·K1(z) for z ≥ 2 without underflow.
fn scaled_zk1(z: f64) -> f64 {
    if z < 700.0 {
        z_k1(z) * z.exp()
    } else {
        // leading asymptotic terms are ample at this size
        let mu = 4.0;
        z * (PI / (2.0 * z)).sqrt() * (1.0 + (mu - 1.0) / (8.0 * z) + (mu - 1.0) * (mu - 9.0) / (128.0 * z * z))
    }
}

/// Kernel k(y,s,x,t).
pub fn kernel_eval(kind: KernelKind, y: f64, s: f64, x: f64, t: f64) -> Result<f64> {
    kind.validate()?;
    if !(t > s) {
        return invalid(format!("kernel needs t > s, got s = {s}, t = {t}"));
    }
    Ok(kind.density(x - y, t - s))
}

/// Kernel k_τ(0, x) sampled on a grid.
pub fn kernel_field(kind: KernelKind, tau: f64, grid: &Grid1D) -> Result<RealField> {
    kernel_eval(kind, 0.0, 0.0, 0.0, tau)?;
    RealField::from_fn(*grid, |x| kind.density(x, tau))
}

/// max_x |k(0,s,x,t) − ∫k(0,s,z,u)k(z,u,x,t)dz| with z and x on the grid.
/// Homogeneity reduces general (y, x) pairs to y = 0.
pub fn chapman_kolmogorov_residual(kind: KernelKind, s: f64, u: f64, t: f64, grid: &Grid1D) -> Result<f64> {
    kind.validate()?;
    if !(s < u && u < t) {
        return invalid(format!("need s < u < t, got {s}, {u}, {t}"));
    }
    let n = grid.n;
    let dx = grid.dx();
    // tables over offsets d = (i − (n−1))·dx
    let first: Vec<f64> = grid.xs().iter().map(|&z| kind.density(z, u - s)).collect();
    let second: Vec<f64> = (0..2 * n - 1).map(|i| kind.density((i as f64 - (n as f64 - 1.0)) * dx, t - u)).collect();
    let mut worst: f64 = 0.0;
    for jx in 0..n {
        let x = grid.x(jx);
        let mut acc = 0.0;
        for (jz, &a) in first.iter().enumerate() {
            acc += a * second[jx + n - 1 - jz];
        }
        let direct = kind.density(x, t - s);
        worst = worst.max((direct - acc * dx).abs());
    }
    Ok(worst)
}

/// Parameters of the Bernstein (Gaussian bridge) density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernsteinParams {
    pub alpha0: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

/// ρ̄(x,t) = k̄(0,−α₀,x,t)·k̄(x,t,0,α₀)/k̄(0,−α₀,0,α₀) with the heat kernel.
pub fn bernstein_density(x: f64, t: f64, params: BernsteinParams) -> Result<f64> {
    let BernsteinParams { alpha0, d } = params;
    if !(alpha0 > 0.0 && d > 0.0) {
        return invalid("alpha0 and D must be positive");
    }
    if !(t.abs() < alpha0) {
        return invalid(format!("need |t| < alpha0, got t = {t}"));
    }
    let k = KernelKind::Heat { d };
    Ok(k.density(x, t + alpha0) * k.density(-x, alpha0 - t) / k.density(0.0, 2.0 * alpha0))
}

/// Closed form [α²/π(α⁴−4D²t²)]^{1/2} exp[−α²x²/(α⁴−4D²t²)] with α² = 2Dα₀.
pub fn bernstein_closed_form(x: f64, t: f64, params: BernsteinParams) -> f64 {
    let a2 = 2.0 * params.d * params.alpha0;
    let den = a2 * a2 - 4.0 * params.d * params.d * t * t;
    (a2 / (PI * den)).sqrt() * (-a2 * x * x / den).exp()
}

const G_LOG2_N: u32 = 20;
const G_CUTOFF: f64 = 2000.0;

/// Tabulated g(x) = (1/2π)∫e^{ipx}/(1+|p|)dp by FFT inversion.
///
/// The table holds the smooth remainder after removing K0(|x|)/π − e^{−|x|}/2,
/// whose transforms are 1/√(1+p²) and −1/(1+p²). The periodic images of the
/// x⁻²/π tail are subtracted analytically; beyond a quarter period the
/// large-|x| expansion (1/π)(x⁻² − 6x⁻⁴ + 120x⁻⁶ − 5040x⁻⁸) is used.
#[derive(Debug, Clone)]
pub struct GTable {
    x_min: f64,
    dx: f64,
    remainder: Vec<f64>,
    far: f64,
}

// (π/L)cot(πy/L) − 1/y, smooth through y = 0.
fn image_cot(y: f64, len: f64) -> f64 {
    let k = PI / len;
    let z = k * y;
    if z.abs() < 1e-3 {
        let z2 = z * z;
        -k * z * (1.0 / 3.0 + z2 / 45.0 + 2.0 * z2 * z2 / 945.0)
    } else {
        k / z.tan() - 1.0 / y
    }
}

// Σ_{k≠0} 1/(π(y+kL)²).
fn image_tail(y: f64, len: f64) -> f64 {
    let k = PI / len;
    let z = k * y;
    if z.abs() < 1e-3 {
        let z2 = z * z;
        k * k * (1.0 / 3.0 + z2 / 15.0 + 2.0 * z2 * z2 / 189.0) / PI
    } else {
        (k * k / (z.sin() * z.sin()) - 1.0 / (y * y)) / PI
    }
}

// Box average over [y−t, y+t] of image_tail.
fn image_tail_box(y: f64, t: f64, len: f64) -> f64 {
    (image_cot(y - t, len) - image_cot(y + t, len)) / (2.0 * t * PI)
}

const NEAR_CELLS: f64 = 32.0;

fn fft_inverse_real(n: usize, dq: f64, x_min: f64, spectrum: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    for (k, v) in spec.iter_mut().enumerate() {
        let kk = if k < n / 2 { k as i64 } else { k as i64 - n as i64 };
        let q = kk as f64 * dq;
        *v = Complex64::from_polar(spectrum(q), q * x_min);
    }
    let out = idft(&spec);
    let c = n as f64 * dq / (2.0 * PI);
    out.iter().map(|v| v.re * c).collect()
}

fn cubic_interp(table: &[f64], x_min: f64, dx: f64, x: f64) -> f64 {
    let u = (x - x_min) / dx;
    let i = u.floor() as isize;
    let f = u - i as f64;
    let n = table.len() as isize;
    let at = |k: isize| table[k.clamp(0, n - 1) as usize];
    let (a, b, c, d) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    // four-point Lagrange
    let w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
    let w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    let w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
    let w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
    w0 * a + w1 * b + w2 * c + w3 * d
}

fn g_asymptotic(x: f64) -> f64 {
    let u = 1.0 / (x * x);
    u * (1.0 - 6.0 * u + 120.0 * u * u - 5040.0 * u * u * u) / PI
}

// Antiderivative of g_asymptotic for x > 0.
fn g_asymptotic_primitive(x: f64) -> f64 {
    let u = 1.0 / x;
    let u2 = u * u;
    (-u + 2.0 * u * u2 - 24.0 * u * u2 * u2 + 720.0 * u * u2 * u2 * u2) / PI
}

impl GTable {
    pub fn new() -> Self {
        Self::with_resolution(1 << G_LOG2_N, G_CUTOFF)
    }

    /// Table with n points and momentum cutoff |p| ≤ cutoff.
    pub fn with_resolution(n: usize, cutoff: f64) -> Self {
        let dx = PI / cutoff;
        let dq = 2.0 * PI / (n as f64 * dx);
        let x_min = -0.5 * n as f64 * dx;
        let len = n as f64 * dx;
        let mut remainder = fft_inverse_real(n, dq, x_min, |q| {
            let a = q.abs();
            1.0 / (1.0 + a) - 1.0 / (1.0 + q * q).sqrt() + 1.0 / (1.0 + q * q)
        });
        for (i, r) in remainder.iter_mut().enumerate() {
            *r -= image_tail(x_min + i as f64 * dx, len);
        }
        Self { x_min, dx, remainder, far: 0.25 * len }
    }

    /// Half-width beyond which the asymptotic expansion is used.
    pub fn far_field(&self) -> f64 {
        self.far
    }

    pub fn spacing(&self) -> f64 {
        self.dx
    }

    /// g(x); diverges logarithmically at 0.
    pub fn eval(&self, x: f64) -> f64 {
        let a = x.abs();
        if a >= self.far {
            return g_asymptotic(a);
        }
        let r = cubic_interp(&self.remainder, self.x_min, self.dx, a);
        let sing = if a == 0.0 { f64::INFINITY } else { bessel_k0(a).unwrap() / PI };
        sing - 0.5 * (-a).exp() + r
    }

    /// Cell average of g over [a, b].
    pub fn average(&self, a: f64, b: f64) -> f64 {
        integrate_pts(|y| if y == 0.0 { 0.0 } else { self.eval(y) }, a, b, &[0.0], 1e-13, 1e-11) / (b - a)
    }

    /// g sampled on a grid; cells within a few widths of the origin are cell-averaged.
    pub fn sample(&self, grid: &Grid1D) -> RealField {
        let h = grid.dx();
        let samples = grid
            .xs()
            .into_iter()
            .map(|x| if x.abs() < NEAR_CELLS * h { self.average(x - 0.5 * h, x + 0.5 * h) } else { self.eval(x) })
            .collect();
        RealField { grid: *grid, samples }
    }
}

impl Default for GTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Oracle g(x) = −(1/π)[cos x·Ci(x) + sin x·(Si(x) − π/2)] for x ≠ 0.
pub fn g_closed_form_oracle(x: f64) -> Result<f64> {
    let a = x.abs();
    let (si, ci) = crate::special::sici(a)?;
    Ok(-(a.cos() * ci + a.sin() * (si - 0.5 * PI)) / PI)
}

/// The transition kernel p(x,t) = ½[g(x+t)+g(x−t)] + χ_{[−t,t]}(x)/2t − (g⋆χ_{[−t,t]})(x)/2t.
///
/// The box average (g⋆χ)/2t is tabulated by FFT inversion of sinc(tp)/(1+|p|).
#[derive(Debug, Clone)]
pub struct UnitaryTransitionKernel {
    pub t: f64,
    g: GTable,
    box_avg: Vec<f64>,
}

impl UnitaryTransitionKernel {
    pub fn new(t: f64) -> Result<Self> {
        Self::with_table(t, GTable::new())
    }

    pub fn with_table(t: f64, g: GTable) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return invalid(format!("transition kernel needs t > 0, got {t}"));
        }
        let n = g.remainder.len();
        let dq = 2.0 * PI / (n as f64 * g.dx);
        let len = n as f64 * g.dx;
        let mut box_avg = fft_inverse_real(n, dq, g.x_min, |q| {
            let s = if q == 0.0 { 1.0 } else { (t * q).sin() / (t * q) };
            s / (1.0 + q.abs())
        });
        for (i, b) in box_avg.iter_mut().enumerate() {
            *b -= image_tail_box(g.x_min + i as f64 * g.dx, t, len);
        }
        if g.far <= 2.0 * t {
            return invalid("time too large for the g table");
        }
        Ok(Self { t, g, box_avg })
    }

    pub fn g_table(&self) -> &GTable {
        &self.g
    }

    fn box_average(&self, x: f64) -> f64 {
        let a = x.abs();
        if a >= self.g.far {
            let t = self.t;
            return (g_asymptotic_primitive(a + t) - g_asymptotic_primitive(a - t)) / (2.0 * t);
        }
        cubic_interp(&self.box_avg, self.g.x_min, self.g.dx, a)
    }

    fn eval_unchecked(&self, x: f64) -> f64 {
        let t = self.t;
        let chi = if x.abs() < t { 1.0 / (2.0 * t) } else { 0.0 };
        0.5 * (self.g.eval(x + t) + self.g.eval(x - t)) + chi - self.box_average(x)
    }

    /// p(x,t); errors at the singular points x = ±t.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if x.abs() == self.t {
            return Err(Error::SingularPoint(x));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Average of p over [a, b] by adaptive quadrature split at ±t.
    pub fn cell_average(&self, a: f64, b: f64) -> f64 {
        let t = self.t;
        integrate_pts(
            |y| if y.abs() == t { 0.0 } else { self.eval_unchecked(y) },
            a,
            b,
            &[-t, t],
            1e-13,
            1e-11,
        ) / (b - a)
    }

    /// p at x; cells of width h within a few widths of a singular point are cell-averaged.
    pub fn sample_cell(&self, x: f64, h: f64) -> f64 {
        let t = self.t;
        if (x.abs() - t).abs() < NEAR_CELLS * h {
            self.cell_average(x - 0.5 * h, x + 0.5 * h)
        } else {
            self.eval_unchecked(x)
        }
    }

    pub fn sample(&self, grid: &Grid1D) -> RealField {
        let h = grid.dx();
        RealField { grid: *grid, samples: grid.xs().into_iter().map(|x| self.sample_cell(x, h)).collect() }
    }

    /// (mass, mean, second moment) from the sampled window plus the analytic
    /// x⁻⁴ tail beyond the window for the second moment.
    pub fn moments(&self, grid: &Grid1D) -> (f64, f64, f64) {
        let f = self.sample(grid);
        let h = grid.dx();
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (x, p) in grid.xs().iter().zip(&f.samples) {
            m0 += p;
            m1 += x * p;
            m2 += x * x * p;
        }
        let t = self.t;
        let tail = |x: f64| (2.0 * t * t / x + (4.0 * t.powi(4) - 40.0 * t * t) / (3.0 * x.powi(3))) / PI;
        let tail0 = |x: f64| (2.0 * t * t / (3.0 * x.powi(3))) / PI;
        // window edges sit half a cell outside the first/last sample
        let lo = -(grid.x_min - 0.5 * h);
        let hi = grid.x(grid.n - 1) + 0.5 * h;
        (m0 * h + tail0(lo) + tail0(hi), m1 * h, m2 * h + tail(lo) + tail(hi))
    }
}

/// Single evaluation of p(x,t); builds the tables each call.
pub fn cauchy_unitary_transition(x: f64, t: f64) -> Result<f64> {
    UnitaryTransitionKernel::new(t)?.eval(x)
}
