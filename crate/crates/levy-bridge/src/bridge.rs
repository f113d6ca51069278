//! Schrödinger marginal system: iterative proportional fitting for the factors
//! f, g of the joint density f(x)k(x,t₁,y,t₂)g(y), propagated θ, θ*, interpolating
//! densities and bridge transition densities. Also the Gaussian closed forms
//! (free packet, Nelson transition, Madelung exponents, imaginary-time pair).

use crate::error::{invalid, Error, Result};
use crate::kernels::{BernsteinParams, KernelKind};
use crate::spectral::{dft, idft, spectral_derivative_real, Grid1D, RealField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Marginal values at or below this are treated as outside the support.
pub const SUPPORT_FLOOR: f64 = 1e-300;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Largest n for which the kernel matrix is stored densely by default.
pub const DENSE_LIMIT: usize = 4096;

/// Reference kernel of a bridge problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reference", rename_all = "snake_case")]
pub enum ReferenceKernel {
    /// Homogeneous semigroup kernel k_{t−s}(x−y).
    Semigroup { kernel: KernelKind },
    /// Feynman–Kac kernel k = p·Θ(y,s)/Θ(x,t) with p the Markov transition of the
    /// Gaussian Nelson diffusion (α² = 2, D = 1); its generator carries the Madelung potential Q.
    NelsonFeynmanKac,
}

impl ReferenceKernel {
    pub fn validate(&self) -> Result<()> {
        match self {
            ReferenceKernel::Semigroup { kernel } => kernel.validate(),
            ReferenceKernel::NelsonFeynmanKac => Ok(()),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self, ReferenceKernel::Semigroup { .. })
    }

    /// k(y,s,x,t) for t > s (unchecked).
    pub fn eval(&self, y: f64, s: f64, x: f64, t: f64) -> f64 {
        match self {
            ReferenceKernel::Semigroup { kernel } => kernel.density(x - y, t - s),
            ReferenceKernel::NelsonFeynmanKac => {
                let (ry, sy) = madelung_exponents(y, s);
                let (rx, sx) = madelung_exponents(x, t);
                nelson_markov_transition(y, s, x, t) * (ry + sy - rx - sx).exp()
            }
        }
    }
}

/// Boundary treatment of the discretized kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Kernel evaluated at x − y on the window; mass leaving the window is lost.
    #[default]
    Open,
    /// Minimum-image distance on the periodic grid.
    Periodic,
}

/// How the kernel matrix is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelBackend {
    #[default]
    Auto,
    Dense,
    Fft,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeProblem {
    pub rho1: RealField,
    pub rho2: RealField,
    pub t1: f64,
    pub t2: f64,
    pub kernel: ReferenceKernel,
    pub boundary: Boundary,
    pub backend: KernelBackend,
}

impl BridgeProblem {
    pub fn new(rho1: RealField, rho2: RealField, t1: f64, t2: f64, kernel: ReferenceKernel) -> Result<Self> {
        let p = Self { rho1, rho2, t1, t2, kernel, boundary: Boundary::Open, backend: KernelBackend::Auto };
        p.validate()?;
        Ok(p)
    }

    /// Same as [`BridgeProblem::new`] after rescaling both marginals to unit mass.
    pub fn normalized(rho1: RealField, rho2: RealField, t1: f64, t2: f64, kernel: ReferenceKernel) -> Result<Self> {
        let unit = |r: RealField| {
            let m = r.integral();
            if !(m > 0.0) {
                return Err(Error::DegenerateMarginal("marginal has no mass".into()));
            }
            Ok(r.map(|v| v / m))
        };
        Self::new(unit(rho1)?, unit(rho2)?, t1, t2, kernel)
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_backend(mut self, backend: KernelBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn grid(&self) -> Grid1D {
        self.rho1.grid
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if !(self.t1 < self.t2) {
            return invalid(format!("need t1 < t2, got {} and {}", self.t1, self.t2));
        }
        if self.rho1.grid != self.rho2.grid {
            return invalid("marginals must share a grid");
        }
        for (name, r) in [("rho1", &self.rho1), ("rho2", &self.rho2)] {
            if r.samples.iter().any(|&v| v < 0.0) {
                return Err(Error::DegenerateMarginal(format!("{name} has negative values")));
            }
            let m = r.integral();
            if (m - 1.0).abs() > 1e-8 {
                return Err(Error::DegenerateMarginal(format!("{name} integrates to {m}")));
            }
        }
        Ok(())
    }

    fn operator(&self, s: f64, t: f64) -> Result<KernelOp> {
        KernelOp::build(&self.kernel, self.grid(), s, t, self.boundary, self.backend)
    }
}

/// Discretized kernel (K v)_i = Σ_j k(x_i,s,x_j,t) v_j dx.
enum KernelOp {
    Dense { n: usize, a: Vec<f64> },
    Circulant { n: usize, spec: Vec<Complex64>, spec_t: Vec<Complex64> },
}

impl KernelOp {
    fn build(kernel: &ReferenceKernel, grid: Grid1D, s: f64, t: f64, boundary: Boundary, backend: KernelBackend) -> Result<Self> {
        let n = grid.n;
        let h = grid.dx();
        let len = grid.length();
        let fft = match backend {
            KernelBackend::Auto => n > DENSE_LIMIT && kernel.is_homogeneous(),
            KernelBackend::Dense => false,
            KernelBackend::Fft => true,
        };
        if fft && !kernel.is_homogeneous() {
            return invalid("FFT kernel application needs a homogeneous kernel");
        }
        let dist = |d: f64| match boundary {
            Boundary::Open => d,
            Boundary::Periodic => d - len * (d / len).round(),
        };
        if !fft {
            let xs = grid.xs();
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let v = match kernel {
                        ReferenceKernel::Semigroup { kernel } => kernel.density(dist(xs[j] - xs[i]), t - s),
                        _ => kernel.eval(xs[i], s, xs[j], t),
                    };
                    a[i * n + j] = v * h;
                }
            }
            return Ok(KernelOp::Dense { n, a });
        }
        let ReferenceKernel::Semigroup { kernel } = kernel else { unreachable!() };
        // c[m] = k(x_i, x_i + m h); (Kv)_i = Σ_j c[j−i] v_j
        let padded = boundary == Boundary::Open;
        let size = if padded { 2 * n } else { n };
        let mut c = vec![Complex64::new(0.0, 0.0); size];
        let mut c_rev = vec![Complex64::new(0.0, 0.0); size];
        let half = (n as i64) - 1;
        let range: Vec<i64> = if padded { (-half..=half).collect() } else { (0..n as i64).collect() };
        for m in range {
            let v = kernel.density(dist(m as f64 * h), t - s) * h;
            let k = m.rem_euclid(size as i64) as usize;
            c[k] = Complex64::new(v, 0.0);
            c_rev[(size - k) % size] = Complex64::new(v, 0.0);
        }
        Ok(KernelOp::Circulant { n, spec: dft(&c_rev), spec_t: dft(&c) })
    }

    fn apply_circ(n: usize, spec: &[Complex64], v: &[f64]) -> Vec<f64> {
        let size = spec.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); size];
        for (b, x) in buf.iter_mut().zip(v) {
            *b = Complex64::new(*x, 0.0);
        }
        let f = dft(&buf);
        let prod: Vec<Complex64> = f.iter().zip(spec).map(|(a, b)| a * b).collect();
        let out = idft(&prod);
        out[..n].iter().map(|z| z.re).collect()
    }

    /// Σ_j K_ij v_j.
    fn apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            KernelOp::Dense { n, a } => (0..*n).map(|i| a[i * n..(i + 1) * n].iter().zip(v).map(|(k, x)| k * x).sum()).collect(),
            KernelOp::Circulant { n, spec, .. } => Self::apply_circ(*n, spec, v),
        }
    }

    /// Σ_i K_ij v_i.
    fn apply_t(&self, v: &[f64]) -> Vec<f64> {
        match self {
            KernelOp::Dense { n, a } => {
                let mut out = vec![0.0; *n];
                for (i, &vi) in v.iter().enumerate() {
                    if vi == 0.0 {
                        continue;
                    }
                    for (o, k) in out.iter_mut().zip(&a[i * n..(i + 1) * n]) {
                        *o += k * vi;
                    }
                }
                out
            }
            KernelOp::Circulant { n, spec_t, .. } => Self::apply_circ(*n, spec_t, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeSolution {
    pub f: RealField,
    pub g: RealField,
    pub residual: f64,
    pub iterations: usize,
    /// Marginal residual after each sweep.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaPair {
    pub theta: RealField,
    pub theta_star: RealField,
    pub t: f64,
}

impl ThetaPair {
    /// Interpolating density θθ*.
    pub fn density(&self) -> RealField {
        RealField {
            grid: self.theta.grid,
            samples: self.theta.samples.iter().zip(&self.theta_star.samples).map(|(a, b)| a * b).collect(),
        }
    }
}

fn ratio(num: &[f64], den: &[f64], which: &str) -> Result<Vec<f64>> {
    num.iter()
        .zip(den)
        .enumerate()
        .map(|(j, (&r, &d))| {
            if r <= SUPPORT_FLOOR {
                Ok(0.0)
            } else if d > 0.0 && d.is_finite() && (r / d).is_finite() {
                Ok(r / d)
            } else {
                Err(Error::DegenerateMarginal(format!("{which}: kernel image vanishes at index {j}")))
            }
        })
        .collect()
}

fn l1(a: &[f64], w: &[f64], target: &[f64], h: f64) -> f64 {
    a.iter().zip(w).zip(target).map(|((a, w), t)| (a * w - t).abs()).sum::<f64>() * h
}

/// Iterative proportional fitting g ← ρ₂ ⊘ (Kᵀf), f ← ρ₁ ⊘ (Kg).
pub fn solve_marginal_system(problem: &BridgeProblem, tol: f64, max_iter: usize) -> Result<BridgeSolution> {
    problem.validate()?;
    if !(tol > 0.0) || max_iter == 0 {
        return invalid("tol must be positive and max_iter at least 1");
    }
    let grid = problem.grid();
    let h = grid.dx();
    let k = problem.operator(problem.t1, problem.t2)?;
    let rho1 = &problem.rho1.samples;
    let rho2 = &problem.rho2.samples;
    let mut f: Vec<f64> = rho1.iter().map(|&r| if r > SUPPORT_FLOOR { 1.0 } else { 0.0 }).collect();
    let mut g = ratio(rho2, &k.apply_t(&f), "rho2")?;
    f = ratio(rho1, &k.apply(&g), "rho1")?;
    let mut history = Vec::new();
    let mut iterations = 1;
    loop {
        let ktf = k.apply_t(&f);
        let r = l1(&g, &ktf, rho2, h);
        history.push(r);
        if r <= tol {
            break;
        }
        if !r.is_finite() || iterations >= max_iter {
            return Err(Error::NonConvergence { iterations, residual: r });
        }
        g = ratio(rho2, &ktf, "rho2")?;
        f = ratio(rho1, &k.apply(&g), "rho1")?;
        iterations += 1;
    }
    let r1 = l1(&f, &k.apply(&g), rho1, h);
    let residual = history.last().copied().unwrap_or(0.0).max(r1);
    let c = f.iter().sum::<f64>() * h;
    f.iter_mut().for_each(|v| *v /= c);
    g.iter_mut().for_each(|v| *v *= c);
    Ok(BridgeSolution { f: RealField::new(grid, f)?, g: RealField::new(grid, g)?, residual, iterations, history })
}

impl BridgeSolution {
    /// θ*(·,t) = ∫f(z)k(z,t₁,·,t)dz and θ(·,t) = ∫k(·,t,z,t₂)g(z)dz on the grid.
    pub fn propagate_thetas(&self, problem: &BridgeProblem, t: f64) -> Result<ThetaPair> {
        if !(t >= problem.t1 && t <= problem.t2) {
            return invalid(format!("t = {t} outside [{}, {}]", problem.t1, problem.t2));
        }
        let grid = self.f.grid;
        let theta_star = if t == problem.t1 {
            self.f.clone()
        } else {
            RealField::new(grid, problem.operator(problem.t1, t)?.apply_t(&self.f.samples))?
        };
        let theta = if t == problem.t2 {
            self.g.clone()
        } else {
            RealField::new(grid, problem.operator(t, problem.t2)?.apply(&self.g.samples))?
        };
        Ok(ThetaPair { theta, theta_star, t })
    }

    /// θ(y,s) at an arbitrary point; at s = t₂ the point must be a grid node.
    pub fn theta_at(&self, problem: &BridgeProblem, y: f64, s: f64) -> Result<f64> {
        if !(s >= problem.t1 && s <= problem.t2) {
            return invalid(format!("s = {s} outside [{}, {}]", problem.t1, problem.t2));
        }
        let grid = self.g.grid;
        if s == problem.t2 {
            return match grid.index_of(y) {
                Some(j) if (grid.x(j) - y).abs() < 1e-9 * grid.dx() => Ok(self.g.samples[j]),
                _ => invalid(format!("theta at the terminal time needs a grid point, got {y}")),
            };
        }
        let h = grid.dx();
        Ok(grid.xs().iter().zip(&self.g.samples).map(|(&z, &gz)| problem.kernel.eval(y, s, z, problem.t2) * gz).sum::<f64>() * h)
    }

    /// p(y,s,x,t) = k(y,s,x,t)θ(x,t)/θ(y,s).
    pub fn transition_density(&self, problem: &BridgeProblem, y: f64, s: f64, x: f64, t: f64) -> Result<f64> {
        if !(problem.t1 <= s && s < t && t <= problem.t2) {
            return invalid(format!("need t1 <= s < t <= t2, got s = {s}, t = {t}"));
        }
        let den = self.theta_at(problem, y, s)?;
        if !(den > 0.0) {
            return Err(Error::DegenerateMarginal(format!("theta vanishes at y = {y}")));
        }
        Ok(problem.kernel.eval(y, s, x, t) * self.theta_at(problem, x, t)? / den)
    }

    /// The transition density p(y,s,·,t) on the grid.
    pub fn transition_row(&self, problem: &BridgeProblem, y: f64, s: f64, t: f64) -> Result<RealField> {
        if !(problem.t1 <= s && s < t && t <= problem.t2) {
            return invalid(format!("need t1 <= s < t <= t2, got s = {s}, t = {t}"));
        }
        let den = self.theta_at(problem, y, s)?;
        if !(den > 0.0) {
            return Err(Error::DegenerateMarginal(format!("theta vanishes at y = {y}")));
        }
        let th = self.propagate_thetas(problem, t)?.theta;
        let grid = th.grid;
        RealField::new(grid, grid.xs().iter().zip(&th.samples).map(|(&x, &v)| problem.kernel.eval(y, s, x, t) * v / den).collect())
    }

    /// Row-major grid matrix P_ij = p(x_i,s,x_j,t); rows where θ(x_i,s) vanishes are zero.
    pub fn transition_matrix(&self, problem: &BridgeProblem, s: f64, t: f64) -> Result<Vec<f64>> {
        if !(problem.t1 <= s && s < t && t <= problem.t2) {
            return invalid(format!("need t1 <= s < t <= t2, got s = {s}, t = {t}"));
        }
        let from = self.propagate_thetas(problem, s)?.theta;
        let to = self.propagate_thetas(problem, t)?.theta;
        let grid = from.grid;
        let xs = grid.xs();
        let n = grid.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let den = from.samples[i];
            if !(den > 0.0) {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = problem.kernel.eval(xs[i], s, xs[j], t) * to.samples[j] / den;
            }
        }
        Ok(out)
    }
}

/// Parameters α², D of the Gaussian reference family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub alpha2: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

impl GaussianParams {
    /// α² = 2, D = 1.
    pub const NELSON: GaussianParams = GaussianParams { alpha2: 2.0, d: 1.0 };

    fn check(&self) -> Result<()> {
        if !(self.alpha2 > 0.0 && self.d > 0.0) {
            return invalid("alpha2 and D must be positive");
        }
        Ok(())
    }

    /// Half-width α²/2D of the imaginary-time interval.
    pub fn half_interval(&self) -> f64 {
        self.alpha2 / (2.0 * self.d)
    }

    pub fn bernstein(&self) -> BernsteinParams {
        BernsteinParams { alpha0: self.half_interval(), d: self.d }
    }
}

/// Initial packet (πα²)^{−1/4} exp(−x²/2α²).
pub fn gaussian_packet0(x: f64, p: GaussianParams) -> f64 {
    (PI * p.alpha2).powf(-0.25) * (-x * x / (2.0 * p.alpha2)).exp()
}

/// Free Schrödinger evolution i∂ₜψ = −DΔψ of the initial packet:
/// (α²/π)^{1/4}(α² + 2iDt)^{−1/2} exp[−x²/2(α² + 2iDt)].
pub fn free_packet(x: f64, t: f64, p: GaussianParams) -> Result<Complex64> {
    p.check()?;
    let w = Complex64::new(p.alpha2, 2.0 * p.d * t);
    Ok((p.alpha2 / PI).powf(0.25) * w.powf(-0.5) * (-(x * x) / (2.0 * w)).exp())
}

/// |ψ(x,t)|² of the free packet: α[π(α⁴+4D²t²)]^{−1/2} exp[−x²α²/(α⁴+4D²t²)].
pub fn free_density(x: f64, t: f64, p: GaussianParams) -> Result<f64> {
    p.check()?;
    let a2 = p.alpha2;
    let den = a2 * a2 + 4.0 * p.d * p.d * t * t;
    Ok(a2.sqrt() / (PI * den).sqrt() * (-x * x * a2 / den).exp())
}

/// c(s,t) = [((1−t)² + 2s)/(1+s²)]^{1/2}.
pub fn nelson_c(s: f64, t: f64) -> f64 {
    (((1.0 - t) * (1.0 - t) + 2.0 * s) / (1.0 + s * s)).sqrt()
}

fn nelson_transition_unchecked(y: f64, s: f64, x: f64, t: f64) -> f64 {
    let tau = t - s;
    let d = x - nelson_c(s, t) * y;
    (-(d * d) / (4.0 * tau)).exp() / (4.0 * PI * tau).sqrt()
}

/// Nelson transition density for α² = 2, D = 1:
/// [4π(t−s)]^{−1/2} exp[−(x − c y)²/4(t−s)], taken verbatim.
pub fn nelson_transition(y: f64, s: f64, x: f64, t: f64) -> Result<f64> {
    if !(t > s) {
        return invalid(format!("need t > s, got s = {s}, t = {t}"));
    }
    if (1.0 - t) * (1.0 - t) + 2.0 * s < 0.0 {
        return invalid("c(s,t) is not real for these times");
    }
    Ok(nelson_transition_unchecked(y, s, x, t))
}

/// Markov transition of dX = 2∂ₓlnΘ dt + √2 dW for the α² = 2, D = 1 packet:
/// mean Φ y and variance (1+t²)(1 − e^{−2Δ}), Φ = √((1+t²)/(1+s²)) e^{−Δ}, Δ = arctan t − arctan s.
pub fn nelson_markov_transition(y: f64, s: f64, x: f64, t: f64) -> f64 {
    let delta = t.atan() - s.atan();
    let phi = ((1.0 + t * t) / (1.0 + s * s)).sqrt() * (-delta).exp();
    let var = (1.0 + t * t) * -(-2.0 * delta).exp_m1();
    let d = x - phi * y;
    (-(d * d) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// One-time-slice transition from 0: (4πDt)^{−1/2}exp[−(x − (1 − 2Dt/α²)y)²/4Dt].
pub fn free_transition_from_zero(y: f64, x: f64, t: f64, p: GaussianParams) -> Result<f64> {
    p.check()?;
    if !(t > 0.0) {
        return invalid("need t > 0");
    }
    let d = x - (1.0 - 2.0 * p.d * t / p.alpha2) * y;
    Ok((-(d * d) / (4.0 * p.d * t)).exp() / (4.0 * PI * p.d * t).sqrt())
}

/// Density [2π(1+t²)]^{−1/2} exp[−x²/2(1+t²)] of the α² = 2, D = 1 packet.
pub fn nelson_density(x: f64, t: f64) -> f64 {
    let v = 1.0 + t * t;
    (-(x * x) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
}

/// Madelung exponents (R, S) of the α² = 2, D = 1 packet.
pub fn madelung_exponents(x: f64, t: f64) -> (f64, f64) {
    let v = 1.0 + t * t;
    let r = -0.25 * (2.0 * PI * v).ln() - x * x / (4.0 * v);
    let s = 0.25 * x * x * t / v - 0.5 * t.atan();
    (r, s)
}

fn check_imaginary_time(t: f64, p: GaussianParams) -> Result<()> {
    p.check()?;
    if !(t.abs() < p.half_interval()) {
        return invalid(format!("need |t| < alpha2/(2D) = {}, got {t}", p.half_interval()));
    }
    Ok(())
}

/// θ*(x,t) = ψ(x,−it) = (α²/π)^{1/4}(α² + 2Dt)^{−1/2} exp[−x²/2(α² + 2Dt)].
pub fn theta_star_forward(x: f64, t: f64, p: GaussianParams) -> Result<f64> {
    check_imaginary_time(t, p)?;
    let w = p.alpha2 + 2.0 * p.d * t;
    Ok((p.alpha2 / PI).powf(0.25) / w.sqrt() * (-x * x / (2.0 * w)).exp())
}

/// θ(x,t) = (α²/π)^{1/4}(α² − 2Dt)^{−1/2} exp[−x²/2(α² − 2Dt)].
pub fn theta_backward(x: f64, t: f64, p: GaussianParams) -> Result<f64> {
    check_imaginary_time(t, p)?;
    let w = p.alpha2 - 2.0 * p.d * t;
    Ok((p.alpha2 / PI).powf(0.25) / w.sqrt() * (-x * x / (2.0 * w)).exp())
}

/// ρ̄ = θθ* = [α²/π(α⁴ − 4D²t²)]^{1/2} exp[−α²x²/(α⁴ − 4D²t²)].
pub fn conditional_density(x: f64, t: f64, p: GaussianParams) -> Result<f64> {
    check_imaginary_time(t, p)?;
    let a2 = p.alpha2;
    let den = a2 * a2 - 4.0 * p.d * p.d * t * t;
    Ok((a2 / (PI * den)).sqrt() * (-a2 * x * x / den).exp())
}

/// Bernstein transport p(y,s,x,t) = k̄(y,s,x,t)θ(x,t)/θ(y,s) with
/// θ(x,t) ∝ k̄(x,t,0,α₀).
pub fn bernstein_transition(y: f64, s: f64, x: f64, t: f64, params: BernsteinParams) -> Result<f64> {
    let BernsteinParams { alpha0, d } = params;
    if !(alpha0 > 0.0 && d > 0.0) {
        return invalid("alpha0 and D must be positive");
    }
    if !(s < t && -alpha0 < s && t < alpha0) {
        return invalid(format!("need -alpha0 < s < t < alpha0, got s = {s}, t = {t}"));
    }
    let k = KernelKind::Heat { d };
    Ok(k.density(x - y, t - s) * k.density(x, alpha0 - t) / k.density(y, alpha0 - s))
}

/// Residuals of ∂ₜΘ = −ΔΘ + QΘ and ∂ₜΘ* = ΔΘ* − QΘ* (α² = 2, D = 1) with
/// Q = 2Δρ^{1/2}/ρ^{1/2}, spectral Δ and central time differences.
/// Returns (max |res Θ|, max |res Θ*|) over points where ρ^{1/2} ≥ floor·max ρ^{1/2}.
pub fn adjoint_pair_residual(grid: &Grid1D, t: f64, dt: f64, floor: f64) -> Result<(f64, f64)> {
    if !(dt > 0.0) {
        return invalid("dt must be positive");
    }
    let field = |f: &dyn Fn(f64) -> f64| RealField::from_fn(*grid, f);
    let theta = |tt: f64| field(&|x| {
        let (r, s) = madelung_exponents(x, tt);
        (r + s).exp()
    });
    let theta_s = |tt: f64| field(&|x| {
        let (r, s) = madelung_exponents(x, tt);
        (r - s).exp()
    });
    let th = theta(t)?;
    let ts = theta_s(t)?;
    let (thp, thm) = (theta(t + dt)?, theta(t - dt)?);
    let (tsp, tsm) = (theta_s(t + dt)?, theta_s(t - dt)?);
    let amp = field(&|x| madelung_exponents(x, t).0.exp())?;
    let lap_amp = spectral_derivative_real(&amp, 2);
    let lap_th = spectral_derivative_real(&th, 2);
    let lap_ts = spectral_derivative_real(&ts, 2);
    let top = amp.samples.iter().cloned().fold(0.0, f64::max);
    let mut worst = (0.0f64, 0.0f64);
    for j in 0..grid.n {
        if amp.samples[j] < floor * top {
            continue;
        }
        let q = 2.0 * lap_amp.samples[j] / amp.samples[j];
        let d_th = (thp.samples[j] - thm.samples[j]) / (2.0 * dt);
        let d_ts = (tsp.samples[j] - tsm.samples[j]) / (2.0 * dt);
        worst.0 = worst.0.max((d_th - (-lap_th.samples[j] + q * th.samples[j])).abs());
        worst.1 = worst.1.max((d_ts - (lap_ts.samples[j] - q * ts.samples[j])).abs());
    }
    Ok(worst)
}

/// Entropic coupling covariance of two centred Gaussians (variances a, b)
/// under a heat reference of variance 2D(t₂−t₁): c = (√(ε² + 4ab) − ε)/2.
pub fn gaussian_bridge_covariance(a: f64, b: f64, d: f64, tau: f64) -> f64 {
    let eps = 2.0 * d * tau;
    0.5 * ((eps * eps + 4.0 * a * b).sqrt() - eps)
}

/// Variance at t of the heat-reference bridge between N(0,a) at t₁ and N(0,b) at t₂.
pub fn gaussian_bridge_variance(a: f64, b: f64, d: f64, t1: f64, t2: f64, t: f64) -> f64 {
    let tau = t2 - t1;
    let u = (t - t1) / tau;
    let c = gaussian_bridge_covariance(a, b, d, tau);
    (1.0 - u) * (1.0 - u) * a + u * u * b + 2.0 * u * (1.0 - u) * c + 2.0 * d * tau * u * (1.0 - u)
}
