//! Uniform periodic grids, sampled fields, characteristic exponents and
//! Fourier-multiplier operators (semigroups, unitary groups, generators).

use crate::error::{invalid, Error, Result};
use crate::levy_quad::PairQuadrature;
use crate::special::bessel_k1;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

/// Uniform periodic grid x_j = x_min + j·dx, j = 0..n−1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n = {n} must be a power of two >= 16")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidGrid(format!("bad domain [{x_min}, {x_max}]")));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Symmetric domain [−half_width, half_width].
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    /// Default grid for Cauchy experiments.
    pub fn default_cauchy() -> Self {
        Self { x_min: -400.0, x_max: 400.0, n: 8192 }
    }

    /// Default grid for relativistic experiments with m ≥ 1.
    pub fn default_relativistic() -> Self {
        Self { x_min: -100.0, x_max: 100.0, n: 4096 }
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI / self.length()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Frequency of DFT bin k, in [−π/dx, π/dx).
    pub fn freq(&self, k: usize) -> f64 {
        let kk = if k < self.n / 2 { k as i64 } else { k as i64 - self.n as i64 };
        kk as f64 * self.dp()
    }

    /// Frequencies in DFT (unshifted) order.
    pub fn freqs(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.freq(k)).collect()
    }

    /// Index of the grid point nearest to x, if inside the domain.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let j = ((x - self.x_min) / self.dx()).round();
        if j >= 0.0 && (j as usize) < self.n {
            Some(j as usize)
        } else {
            None
        }
    }
}

/// Real samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    pub grid: Grid1D,
    pub samples: Vec<f64>,
}

/// Complex samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: Grid1D,
    pub samples: Vec<Complex64>,
}

impl RealField {
    pub fn new(grid: Grid1D, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n {
            return invalid(format!("expected {} samples, got {}", grid.n, samples.len()));
        }
        if let Some(j) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(j));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.xs().into_iter().map(f).collect())
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, samples: vec![0.0; grid.n] }
    }

    /// Trapezoid integral on the periodic grid.
    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid,
            samples: self.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &RealField) -> f64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn l1_diff(&self, other: &RealField) -> f64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).abs()).sum::<f64>() * self.grid.dx()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField { grid: self.grid, samples: self.samples.iter().map(|&v| f(v)).collect() }
    }
}

impl ComplexField {
    pub fn new(grid: Grid1D, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.n {
            return invalid(format!("expected {} samples, got {}", grid.n, samples.len()));
        }
        if let Some(j) = samples.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(j));
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.xs().into_iter().map(f).collect())
    }

    pub fn integral(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() * self.grid.dx()
    }

    pub fn norm_l2(&self) -> f64 {
        (self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn abs_sq(&self) -> RealField {
        RealField { grid: self.grid, samples: self.samples.iter().map(|v| v.norm_sqr()).collect() }
    }

    pub fn re(&self) -> RealField {
        RealField { grid: self.grid, samples: self.samples.iter().map(|v| v.re).collect() }
    }

    pub fn im(&self) -> RealField {
        RealField { grid: self.grid, samples: self.samples.iter().map(|v| v.im).collect() }
    }

    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> ComplexField {
        ComplexField { grid: self.grid, samples: self.samples.iter().map(|v| v * c).collect() }
    }
}

/// The infinitely divisible law driving the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseKind {
    Gaussian {
        #[serde(rename = "D")]
        d: f64,
    },
    Cauchy,
    Relativistic { m: f64 },
}

impl NoiseKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseKind::Gaussian { d } if !(d > 0.0 && d.is_finite()) => invalid(format!("D must be positive, got {d}")),
            NoiseKind::Relativistic { m } if !(m > 0.0 && m.is_finite()) => invalid(format!("m must be positive, got {m}")),
            _ => Ok(()),
        }
    }

    /// Characteristic exponent F(p).
    pub fn exponent(&self, p: f64) -> f64 {
        match *self {
            NoiseKind::Gaussian { d } => d * p * p,
            NoiseKind::Cauchy => p.abs(),
            // √(p²+m²) − m written to avoid cancellation at small p
            NoiseKind::Relativistic { m } => p * p / ((p * p + m * m).sqrt() + m),
        }
    }

    pub fn is_pure_jump(&self) -> bool {
        !matches!(self, NoiseKind::Gaussian { .. })
    }

    /// Lévy density ν(y) for the pure-jump kinds.
    pub fn levy_density(&self, y: f64) -> Result<f64> {
        if y == 0.0 || !y.is_finite() {
            return invalid(format!("levy density undefined at y = {y}"));
        }
        match *self {
            NoiseKind::Gaussian { .. } => invalid("the Gaussian kind has no Levy measure"),
            NoiseKind::Cauchy => Ok(1.0 / (PI * y * y)),
            NoiseKind::Relativistic { m } => {
                let z = m * y.abs();
                if z > 700.0 {
                    Ok(0.0)
                } else {
                    Ok(m / (PI * y.abs()) * bessel_k1(z)?)
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Gaussian { .. } => "gaussian",
            NoiseKind::Cauchy => "cauchy",
            NoiseKind::Relativistic { .. } => "relativistic",
        }
    }
}

/// Characteristic exponent F(p).
pub fn exponent_eval(kind: NoiseKind, p: f64) -> f64 {
    kind.exponent(p)
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn fft_plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

/// Raw forward DFT of the samples (no normalization).
pub(crate) fn dft(samples: &[Complex64]) -> Vec<Complex64> {
    let (fwd, _) = fft_plans(samples.len());
    let mut buf = samples.to_vec();
    fwd.process(&mut buf);
    buf
}

/// Inverse DFT including the 1/n factor.
pub(crate) fn idft(spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = spectrum.len();
    let (_, inv) = fft_plans(n);
    let mut buf = spectrum.to_vec();
    inv.process(&mut buf);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= s);
    buf
}

/// Apply the Fourier multiplier m(p) to complex samples on `grid`.
pub fn apply_multiplier(grid: &Grid1D, samples: &[Complex64], m: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    let mut spec = dft(samples);
    for (k, v) in spec.iter_mut().enumerate() {
        *v *= m(grid.freq(k));
    }
    idft(&spec)
}

fn apply_real_multiplier(field: &RealField, m: impl Fn(f64) -> f64) -> RealField {
    let c: Vec<Complex64> = field.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let out = apply_multiplier(&field.grid, &c, |p| Complex64::new(m(p), 0.0));
    RealField { grid: field.grid, samples: out.into_iter().map(|v| v.re).collect() }
}

/// Unitary continuous Fourier transform approximated on the grid:
/// f̂(p) = (1/√(2π)) ∫ e^{−ipx} f(x) dx. Returns (p, f̂(p)) in ascending p.
pub fn fourier_transform(field: &ComplexField) -> Vec<(f64, Complex64)> {
    let g = field.grid;
    let spec = dft(&field.samples);
    let c = g.dx() / (2.0 * PI).sqrt();
    let mut out: Vec<(f64, Complex64)> = spec
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let p = g.freq(k);
            (p, v * Complex64::from_polar(c, -p * g.x_min))
        })
        .collect();
    let half = g.n / 2;
    out.rotate_left(half);
    out
}

/// Inverse of [`fourier_transform`]; input in ascending-p order.
pub fn inverse_fourier_transform(grid: &Grid1D, spectrum: &[(f64, Complex64)]) -> Result<ComplexField> {
    if spectrum.len() != grid.n {
        return invalid("spectrum length does not match grid");
    }
    let c = grid.dx() / (2.0 * PI).sqrt();
    let mut spec = vec![Complex64::new(0.0, 0.0); grid.n];
    for (i, &(p, v)) in spectrum.iter().enumerate() {
        let k = (i + grid.n / 2) % grid.n;
        spec[k] = v / Complex64::from_polar(c, -p * grid.x_min);
    }
    ComplexField::new(*grid, idft(&spec))
}

/// exp(−tH) applied spectrally.
pub fn apply_semigroup(field: &RealField, kind: NoiseKind, t: f64) -> Result<RealField> {
    kind.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return invalid(format!("semigroup time must be >= 0, got {t}"));
    }
    if t == 0.0 {
        return Ok(field.clone());
    }
    Ok(apply_real_multiplier(field, |p| (-t * kind.exponent(p)).exp()))
}

/// exp(−isH) applied spectrally.
pub fn apply_unitary(field: &ComplexField, kind: NoiseKind, s: f64) -> Result<ComplexField> {
    kind.validate()?;
    if !s.is_finite() {
        return invalid("unitary time must be finite");
    }
    if s == 0.0 {
        return Ok(field.clone());
    }
    let out = apply_multiplier(&field.grid, &field.samples, |p| Complex64::from_polar(1.0, -s * kind.exponent(p)));
    Ok(ComplexField { grid: field.grid, samples: out })
}

/// Hf = (F(p) f̂)^∨. Aliasing caveat: accurate only for fields resolved by the grid.
pub fn apply_generator_spectral(field: &ComplexField, kind: NoiseKind) -> Result<ComplexField> {
    kind.validate()?;
    let out = apply_multiplier(&field.grid, &field.samples, |p| Complex64::new(kind.exponent(p), 0.0));
    Ok(ComplexField { grid: field.grid, samples: out })
}

/// Real-field variant of [`apply_generator_spectral`].
pub fn apply_generator_spectral_real(field: &RealField, kind: NoiseKind) -> Result<RealField> {
    kind.validate()?;
    Ok(apply_real_multiplier(field, |p| kind.exponent(p)))
}

/// Spectral derivative of the given order.
pub fn spectral_derivative(field: &ComplexField, order: u32) -> ComplexField {
    let i = Complex64::new(0.0, 1.0);
    let out = apply_multiplier(&field.grid, &field.samples, |p| (i * p).powu(order));
    ComplexField { grid: field.grid, samples: out }
}

/// Real-field spectral derivative.
pub fn spectral_derivative_real(field: &RealField, order: u32) -> RealField {
    let c = spectral_derivative(&field.to_complex(), order);
    c.re()
}

/// Spectral translation: returns samples of f(x + y).
pub fn spectral_shift(field: &ComplexField, y: f64) -> ComplexField {
    let out = apply_multiplier(&field.grid, &field.samples, |p| Complex64::from_polar(1.0, p * y));
    ComplexField { grid: field.grid, samples: out }
}

/// Lévy–Khintchine quadrature of Hf with jumps |y| > eps plus the second-order
/// small-jump correction −(f″/2)∫_{|y|≤eps} y² ν(dy).
pub fn apply_generator_levy(field: &ComplexField, kind: NoiseKind, eps: f64) -> Result<ComplexField> {
    kind.validate()?;
    if !kind.is_pure_jump() {
        return invalid("levy quadrature needs a pure-jump kind");
    }
    if !(eps > 0.0) {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    let quad = PairQuadrature::new(&field.grid, kind, eps)?;
    let integral = quad.integrate(&[field], |_, at, plus, minus, _| plus[0] + minus[0] - at[0] * 2.0);
    let f2 = spectral_derivative(field, 2);
    let samples = integral
        .iter()
        .zip(&f2.samples)
        .map(|(i, d2)| -(*i) - d2 * (0.5 * quad.small_jump_moment()))
        .collect();
    Ok(ComplexField { grid: field.grid, samples })
}

/// Newton–Wigner multiplier (p² + m²)^{1/4}.
pub fn newton_wigner_map(field: &ComplexField, m: f64) -> Result<ComplexField> {
    if !(m > 0.0) {
        return invalid(format!("m must be positive, got {m}"));
    }
    let out = apply_multiplier(&field.grid, &field.samples, |p| Complex64::new((p * p + m * m).sqrt().sqrt(), 0.0));
    Ok(ComplexField { grid: field.grid, samples: out })
}

/// Klein–Gordon scalar product (φ₁, φ₂) = ∫[φ̄₁ Kφ₂ + (Kφ̄₁)φ₂] dx with K = √(−Δ+m²),
/// evaluated in momentum space as ∫ 2√(p²+m²) conj(φ̂₁) φ̂₂ dp.
pub fn klein_gordon_product(a: &ComplexField, b: &ComplexField, m: f64) -> Complex64 {
    let fa = fourier_transform(a);
    let fb = fourier_transform(b);
    let dp = a.grid.dp();
    fa.iter()
        .zip(&fb)
        .map(|((p, u), (_, v))| u.conj() * v * (2.0 * (p * p + m * m).sqrt()))
        .sum::<Complex64>()
        * dp
}
