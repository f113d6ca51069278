//! Pseudodifferential Schrödinger dynamics iψₜ = Hψ: the explicit Cauchy state,
//! Madelung exponents and their evolution residuals, quantum potential,
//! inverse (Sturm–Liouville) potential and second-order wave-equation residuals.

use crate::error::{invalid, Error, Result};
use crate::levy_quad::PairQuadrature;
use crate::spectral::{
    apply_generator_spectral_real, apply_semigroup, apply_unitary, spectral_derivative,
    spectral_derivative_real, ComplexField, Grid1D, NoiseKind, RealField,
};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// |ψ| or ρ^{1/2} at or below this is treated as a node.
pub const NODAL_THRESHOLD: f64 = 1e-12;

/// Initial state f(x) = √(2/π)/(1+x²).
pub fn cauchy_initial(x: f64) -> f64 {
    (2.0 / PI).sqrt() / (1.0 + x * x)
}

/// ρ₀(x) = f(x)² = (2/π)/(1+x²)².
pub fn cauchy_initial_density(x: f64) -> f64 {
    let f = cauchy_initial(x);
    f * f
}

/// ψ(x,s) = ½[f(x+s)+f(x−s)] + (i/2)[(x−s)f(x−s) − (x+s)f(x+s)] for H = |∇|.
pub fn cauchy_closed_form_state(x: f64, s: f64) -> Complex64 {
    let (a, b) = (x + s, x - s);
    let (fa, fb) = (cauchy_initial(a), cauchy_initial(b));
    Complex64::new(0.5 * (fa + fb), 0.5 * (b * fb - a * fa))
}

/// ρ(x,s) = (1+s²)√(ρ₀(x+s)ρ₀(x−s)).
pub fn cauchy_density(x: f64, s: f64) -> f64 {
    (1.0 + s * s) * (cauchy_initial_density(x + s) * cauchy_initial_density(x - s)).sqrt()
}

/// [Re ψ − Im ψ/t]/√(2π), which equals ρ(x,t) for t ≠ 0.
pub fn cauchy_density_linear(x: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return invalid("linear density form needs t != 0");
    }
    let psi = cauchy_closed_form_state(x, t);
    Ok((psi.re - psi.im / t) / (2.0 * PI).sqrt())
}

/// ψ(·,s) of the closed form on a grid.
pub fn cauchy_state_field(grid: &Grid1D, s: f64) -> ComplexField {
    ComplexField { grid: *grid, samples: grid.xs().iter().map(|&x| cauchy_closed_form_state(x, s)).collect() }
}

/// cos(t|p|) + sin(t|p|)/t, with the t → 0 limit 1 + |p|.
pub fn time_bracket(p: f64, t: f64) -> f64 {
    let a = p.abs();
    if t == 0.0 {
        return 1.0 + a;
    }
    (t * a).cos() + (t * a).sin() / t
}

/// ρ̂₀(p) = (1+|p|)e^{−|p|}/√(2π).
pub fn cauchy_rho_hat0(p: f64) -> f64 {
    (1.0 + p.abs()) * (-p.abs()).exp() / (2.0 * PI).sqrt()
}

/// ρ̂(p,t) = e^{−|p|}[cos(t|p|) + sin(t|p|)/t]/√(2π).
pub fn cauchy_rho_hat(p: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return invalid(format!("need t > 0, got {t}"));
    }
    Ok((-p.abs()).exp() * time_bracket(p, t) / (2.0 * PI).sqrt())
}

/// Residuals of ρ̂(p,t) = ρ̂₀(p)·bracket(t)/(1+|p|) and ρ̂(p,t) = ρ̂(p,s)·bracket(t)/bracket(s).
pub fn rho_hat_ratio_residuals(p: f64, s: f64, t: f64) -> Result<(f64, f64)> {
    if !(0.0 < s && s < t) {
        return invalid(format!("need 0 < s < t, got {s}, {t}"));
    }
    let rt = cauchy_rho_hat(p, t)?;
    let from0 = cauchy_rho_hat0(p) * time_bracket(p, t) / (1.0 + p.abs());
    let den = time_bracket(p, s);
    if den.abs() < 1e-12 {
        return Err(Error::PoleProximity { p, denominator: den });
    }
    let froms = cauchy_rho_hat(p, s)? * time_bracket(p, t) / den;
    Ok(((rt - from0).abs(), (rt - froms).abs()))
}

/// ∫e^{ipx}ρ(x)dx/√(2π) by trapezoid quadrature (real part; ρ even).
pub fn numerical_char_fn(rho: &RealField, p: f64) -> Complex64 {
    let h = rho.grid.dx();
    rho.grid.xs().iter().zip(&rho.samples).map(|(&x, &r)| Complex64::from_polar(r, p * x)).sum::<Complex64>() * h
        / (2.0 * PI).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MadelungPair {
    pub r: RealField,
    /// Unwrapped phase.
    pub s: RealField,
}

impl MadelungPair {
    pub fn to_psi(&self) -> ComplexField {
        ComplexField {
            grid: self.r.grid,
            samples: self.r.samples.iter().zip(&self.s.samples).map(|(&r, &s)| Complex64::from_polar(r.exp(), s)).collect(),
        }
    }
}

/// Adds ±2π whenever consecutive phases jump by more than π.
pub fn unwrap_phase(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &v in raw {
        if let Some(p) = prev {
            let d = v + offset - p;
            if d > PI {
                offset -= 2.0 * PI * ((d + PI) / (2.0 * PI)).floor();
            } else if d < -PI {
                offset += 2.0 * PI * ((-d + PI) / (2.0 * PI)).floor();
            }
        }
        let u = v + offset;
        out.push(u);
        prev = Some(u);
    }
    out
}

/// R = ln|ψ|, S = unwrapped arg ψ.
pub fn madelung_decompose(psi: &ComplexField) -> Result<MadelungPair> {
    let grid = psi.grid;
    if let Some(j) = psi.samples.iter().position(|z| z.norm() <= NODAL_THRESHOLD) {
        return Err(Error::NodalRegion { x: grid.x(j), modulus: psi.samples[j].norm() });
    }
    let r = psi.samples.iter().map(|z| z.norm().ln()).collect();
    let raw: Vec<f64> = psi.samples.iter().map(|z| z.arg()).collect();
    Ok(MadelungPair { r: RealField::new(grid, r)?, s: RealField::new(grid, unwrap_phase(&raw))? })
}

/// Values with a validity mask; entries at nodes are 0 and flagged invalid.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardedField {
    pub values: RealField,
    pub valid: Vec<bool>,
}

impl GuardedField {
    /// max |values − other| over valid points with |x| ≤ half_width.
    pub fn max_abs_diff_within(&self, other: impl Fn(f64) -> f64, half_width: f64) -> f64 {
        let g = self.values.grid;
        (0..g.n)
            .filter(|&j| self.valid[j] && g.x(j).abs() <= half_width)
            .map(|j| (self.values.samples[j] - other(g.x(j))).abs())
            .fold(0.0, f64::max)
    }
}

/// Q = Hρ^{1/2}/ρ^{1/2}.
pub type QuantumPotentialField = GuardedField;

fn guarded_quotient(num: &RealField, den: &RealField, fill: f64) -> GuardedField {
    let valid: Vec<bool> = den.samples.iter().map(|&d| d > NODAL_THRESHOLD).collect();
    let samples = num.samples.iter().zip(&den.samples).zip(&valid).map(|((n, d), &ok)| if ok { n / d } else { fill }).collect();
    GuardedField { values: RealField { grid: num.grid, samples }, valid }
}

/// Q = (Hρ^{1/2})/ρ^{1/2} with H applied spectrally. For H = −DΔ this is
/// −DΔρ^{1/2}/ρ^{1/2}; the adjoint-pair potential 2DΔρ^{1/2}/ρ^{1/2} equals −2Q.
pub fn quantum_potential(rho_sqrt: &RealField, kind: NoiseKind) -> Result<QuantumPotentialField> {
    kind.validate()?;
    let h = apply_generator_spectral_real(rho_sqrt, kind)?;
    Ok(guarded_quotient(&h, rho_sqrt, 0.0))
}

/// V = E − Hρ^{1/2}/ρ^{1/2}, the potential making ρ^{1/2} a stationary state of H + V.
pub fn sturm_liouville_potential(rho: &RealField, kind: NoiseKind, e: f64) -> Result<GuardedField> {
    if rho.samples.iter().any(|&v| v < 0.0) {
        return invalid("density must be nonnegative");
    }
    let amp = rho.map(f64::sqrt);
    let q = quantum_potential(&amp, kind)?;
    let samples = q.values.samples.iter().zip(&q.valid).map(|(&v, &ok)| if ok { e - v } else { e }).collect();
    Ok(GuardedField { values: RealField { grid: rho.grid, samples }, valid: q.valid })
}

/// max over valid points of |Hρ^{1/2} − [2Q + V − E]ρ^{1/2}|.
pub fn stationary_residual(rho: &RealField, kind: NoiseKind, potential: &RealField, e: f64) -> Result<f64> {
    let amp = rho.map(f64::sqrt);
    let h = apply_generator_spectral_real(&amp, kind)?;
    let q = quantum_potential(&amp, kind)?;
    Ok((0..rho.grid.n)
        .filter(|&j| q.valid[j])
        .map(|j| (h.samples[j] - (2.0 * q.values.samples[j] + potential.samples[j] - e) * amp.samples[j]).abs())
        .fold(0.0, f64::max))
}

/// Right-hand sides of the Madelung equations for i∂ₜψ = (H + V)ψ, all divided so
/// that the Θ lines are logarithmic derivatives ∂ₜ ln Θ and ∂ₜ ln Θ*.
#[derive(Debug, Clone)]
pub struct MadelungRhs {
    /// HS − ∫[e^{R_xy} sin S_xy − S_xy]dν.
    pub r_t: Vec<f64>,
    /// −HR + ∫[e^{R_xy} cos S_xy − 1 − R_xy]dν − V.
    pub s_t: Vec<f64>,
    /// −Q + ∫e^{R_xy}[cos S_xy − 1]dν − V.
    pub s_t_via_q: Vec<f64>,
    /// HΘ/Θ − 2Q − V + ∫e^{R_xy}(−sin S_xy + cos S_xy + e^{S_xy} − 2)dν.
    pub ln_theta_t: Vec<f64>,
    /// −HΘ*/Θ* + 2Q + V − ∫e^{R_xy}(sin S_xy + cos S_xy + e^{−S_xy} − 2)dν.
    pub ln_theta_star_t: Vec<f64>,
    /// Q = HR − ∫(e^{R_xy} − 1 − R_xy)dν.
    pub q: Vec<f64>,
}

/// Evaluates [`MadelungRhs`] with jumps |y| > eps by symmetric-pair quadrature and
/// the second-order small-jump correction for each nonlinear integrand.
pub fn madelung_rhs(psi: &ComplexField, kind: NoiseKind, eps: f64, potential: Option<&RealField>) -> Result<MadelungRhs> {
    let grid = psi.grid;
    let n = grid.n;
    if let Some(v) = potential {
        if v.grid != grid {
            return invalid("potential grid differs from state grid");
        }
    }
    let pair = madelung_decompose(psi)?;
    let quad = PairQuadrature::new(&grid, kind, eps)?;
    let m2 = quad.small_jump_moment();
    let d1 = spectral_derivative(psi, 1);
    let d2 = spectral_derivative(psi, 2);
    let s_field = pair.s.to_complex();
    let s0 = &pair.s.samples;
    let ints = quad.integrate_n::<10, _>(&[psi, &s_field], |j, at, plus, minus, info| {
        let mut acc = [0.0; 10];
        for side in [plus, minus] {
            let w = side[0] / at[0];
            let a = w.norm().ln();
            let b = if info.on_grid { side[1].re - s0[j] } else { w.arg() };
            let ea = a.exp();
            let (sb, cb) = b.sin_cos();
            acc[0] += a;
            acc[1] += b;
            acc[2] += ea * sb - b;
            acc[3] += ea * cb - 1.0 - a;
            acc[4] += ea - 1.0 - a;
            acc[5] += ea * (cb - 1.0);
            acc[6] += ea * (-sb + cb + b.exp() - 2.0);
            acc[7] += ea * (sb + cb + (-b).exp() - 2.0);
            acc[8] += (a + b).exp() - 1.0;
            acc[9] += (a - b).exp() - 1.0;
        }
        acc
    });
    let mut out = MadelungRhs {
        r_t: vec![0.0; n],
        s_t: vec![0.0; n],
        s_t_via_q: vec![0.0; n],
        ln_theta_t: vec![0.0; n],
        ln_theta_star_t: vec![0.0; n],
        q: vec![0.0; n],
    };
    for j in 0..n {
        let z = psi.samples[j];
        let l1 = d1.samples[j] / z;
        let l2 = d2.samples[j] / z - l1 * l1;
        let (r1, s1, r2, s2) = (l1.re, l1.im, l2.re, l2.im);
        let v = potential.map_or(0.0, |p| p.samples[j]);
        let i = ints[j];
        let hr = -i[0] - 0.5 * m2 * r2;
        let hs = -i[1] - 0.5 * m2 * s2;
        let q = hr - (i[4] + 0.5 * m2 * r1 * r1);
        let h_theta = -i[8] - 0.5 * m2 * (r2 + s2 + (r1 + s1).powi(2));
        let h_theta_star = -i[9] - 0.5 * m2 * (r2 - s2 + (r1 - s1).powi(2));
        out.r_t[j] = hs - (i[2] + m2 * r1 * s1);
        out.s_t[j] = -hr + i[3] + 0.5 * m2 * (r1 * r1 - s1 * s1) - v;
        out.s_t_via_q[j] = -q + i[5] - 0.5 * m2 * s1 * s1 - v;
        out.ln_theta_t[j] = h_theta - 2.0 * q - v + i[6];
        out.ln_theta_star_t[j] = -h_theta_star + 2.0 * q + v - i[7];
        out.q[j] = q;
    }
    Ok(out)
}

/// Max abs residuals of the Madelung evolution equations at the central snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MadelungResiduals {
    pub amplitude: f64,
    pub phase: f64,
    pub phase_via_q: f64,
    pub theta: f64,
    pub theta_star: f64,
    /// Mean finite-difference ∂ₜS over the window.
    pub mean_phase_rate: f64,
}

impl MadelungResiduals {
    pub fn max(&self) -> f64 {
        [self.amplitude, self.phase, self.phase_via_q, self.theta, self.theta_star].into_iter().fold(0.0, f64::max)
    }
}

/// Compares finite-difference ∂ₜR, ∂ₜS, ∂ₜ ln Θ, ∂ₜ ln Θ* at the central snapshot
/// (5-point stencil when available, else 3-point) with [`madelung_rhs`], over
/// |x| ≤ window (whole grid when `None`). Snapshots must come from i∂ₜψ = (H + V)ψ.
pub fn madelung_evolution_residual(
    times: &[f64],
    snapshots: &[ComplexField],
    kind: NoiseKind,
    eps: f64,
    potential: Option<&RealField>,
    window: Option<f64>,
) -> Result<MadelungResiduals> {
    if times.len() != snapshots.len() {
        return invalid("times and snapshots differ in length");
    }
    if snapshots.len() < 3 {
        return invalid(format!("need at least 3 snapshots, got {}", snapshots.len()));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0)) {
        return invalid("snapshot times must be increasing and equally spaced");
    }
    let c = snapshots.len() / 2;
    let (lo, stencil): (usize, &[f64]) = if snapshots.len() >= 5 {
        (c - 2, &[1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0])
    } else {
        (c - 1, &[-0.5, 0.0, 0.5])
    };
    let used = &snapshots[lo..lo + stencil.len()];
    let grid = snapshots[c].grid;
    if snapshots.iter().any(|s| s.grid != grid) {
        return invalid("snapshots on different grids");
    }
    let center = &snapshots[c];
    // R and S at each time, with S continued from the central branch
    let mut r_t = vec![0.0; grid.n];
    let mut s_t = vec![0.0; grid.n];
    for (snap, &w) in used.iter().zip(stencil) {
        if w == 0.0 {
            continue;
        }
        for j in 0..grid.n {
            let ratio = snap.samples[j] / center.samples[j];
            if snap.samples[j].norm() <= NODAL_THRESHOLD {
                return Err(Error::NodalRegion { x: grid.x(j), modulus: snap.samples[j].norm() });
            }
            r_t[j] += w * ratio.norm().ln() / dt;
            s_t[j] += w * ratio.arg() / dt;
        }
    }
    let rhs = madelung_rhs(center, kind, eps, potential)?;
    let half = window.unwrap_or(f64::INFINITY);
    let idx: Vec<usize> = (0..grid.n).filter(|&j| grid.x(j).abs() <= half).collect();
    if idx.is_empty() {
        return invalid("empty residual window");
    }
    let maxdiff = |lhs: &dyn Fn(usize) -> f64, rhs: &[f64]| idx.iter().map(|&j| (lhs(j) - rhs[j]).abs()).fold(0.0, f64::max);
    Ok(MadelungResiduals {
        amplitude: maxdiff(&|j| r_t[j], &rhs.r_t),
        phase: maxdiff(&|j| s_t[j], &rhs.s_t),
        phase_via_q: maxdiff(&|j| s_t[j], &rhs.s_t_via_q),
        theta: maxdiff(&|j| r_t[j] + s_t[j], &rhs.ln_theta_t),
        theta_star: maxdiff(&|j| r_t[j] - s_t[j], &rhs.ln_theta_star_t),
        mean_phase_rate: idx.iter().map(|&j| s_t[j]).sum::<f64>() / idx.len() as f64,
    })
}

/// max |He^Φ − e^Φ[HΦ − ∫(e^{Φ_xy} − 1 − Φ_xy)dν]| with He^Φ spectral and the
/// right side by pair quadrature (jumps |y| > eps, second-order correction).
pub fn exponential_action_residual(phi: &RealField, kind: NoiseKind, eps: f64) -> Result<f64> {
    let grid = phi.grid;
    let quad = PairQuadrature::new(&grid, kind, eps)?;
    let m2 = quad.small_jump_moment();
    let e = phi.map(f64::exp);
    let lhs = apply_generator_spectral_real(&e, kind)?;
    let h_phi = apply_generator_spectral_real(phi, kind)?;
    let d1 = spectral_derivative_real(phi, 1);
    let ints = quad.integrate_n::<1, _>(&[&phi.to_complex()], |_, at, plus, minus, _| {
        let a = plus[0].re - at[0].re;
        let b = minus[0].re - at[0].re;
        [a.exp() - 1.0 - a + b.exp() - 1.0 - b]
    });
    Ok((0..grid.n)
        .map(|j| {
            let corr = ints[j][0] + 0.5 * m2 * d1.samples[j] * d1.samples[j];
            (lhs.samples[j] - e.samples[j] * (h_phi.samples[j] - corr)).abs()
        })
        .fold(0.0, f64::max))
}

/// Second-order wave-equation check for the Cauchy or relativistic group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveResidual {
    pub absolute: f64,
    /// Absolute residual over ‖Δψ‖∞ (+ m²‖ψ‖∞ for the relativistic case).
    pub relative: f64,
}

fn second_time_difference<T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>>(
    minus: &[T],
    at: &[T],
    plus: &[T],
    dt: f64,
) -> Vec<T> {
    minus.iter().zip(at).zip(plus).map(|((&a, &b), &c)| (a + c - b * 2.0) * (1.0 / (dt * dt))).collect()
}

fn mass_of(kind: NoiseKind) -> Result<f64> {
    match kind {
        NoiseKind::Cauchy => Ok(0.0),
        NoiseKind::Relativistic { m } => Ok(m),
        NoiseKind::Gaussian { .. } => invalid("wave equation needs the Cauchy or relativistic kind"),
    }
}

/// ψ(t) = e^{−itH}ψ₀; checks ψ̃ₜₜ − Δψ̃ + m²ψ̃ = 0 for ψ̃ = ψe^{−imt} (m = 0 for Cauchy).
pub fn wave_equation_residual(psi0: &ComplexField, kind: NoiseKind, t: f64, dt: f64) -> Result<WaveResidual> {
    let m = mass_of(kind)?;
    if !(dt > 0.0) {
        return invalid(format!("dt must be positive, got {dt}"));
    }
    let tilde = |s: f64| -> Result<Vec<Complex64>> {
        let p = apply_unitary(psi0, kind, s)?;
        let ph = Complex64::from_polar(1.0, -m * s);
        Ok(p.samples.iter().map(|z| z * ph).collect())
    };
    let (a, b, c) = (tilde(t - dt)?, tilde(t)?, tilde(t + dt)?);
    let tt = second_time_difference(&a, &b, &c, dt);
    let at = ComplexField { grid: psi0.grid, samples: b };
    let lap = spectral_derivative(&at, 2);
    let scale = lap.max_abs() + m * m * at.max_abs();
    let absolute = (0..at.grid.n)
        .map(|j| (tt[j] - lap.samples[j] + at.samples[j] * (m * m)).norm())
        .fold(0.0, f64::max);
    Ok(WaveResidual { absolute, relative: absolute / scale })
}

/// ρ̄(t) = e^{−tH}ρ₀; checks (∂ₜ² + Δ − m²)ρ̃ = 0 for ρ̃ = ρ̄e^{−mt} (m = 0 for Cauchy).
pub fn euclidean_wave_residual(rho0: &RealField, kind: NoiseKind, t: f64, dt: f64) -> Result<WaveResidual> {
    let m = mass_of(kind)?;
    if !(dt > 0.0) || t - dt < 0.0 {
        return invalid("need dt > 0 and t >= dt");
    }
    let tilde = |s: f64| -> Result<Vec<f64>> {
        let p = apply_semigroup(rho0, kind, s)?;
        Ok(p.samples.iter().map(|v| v * (-m * s).exp()).collect())
    };
    let (a, b, c) = (tilde(t - dt)?, tilde(t)?, tilde(t + dt)?);
    let tt = second_time_difference(&a, &b, &c, dt);
    let at = RealField { grid: rho0.grid, samples: b };
    let lap = spectral_derivative_real(&at, 2);
    let lap_max = lap.samples.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let at_max = at.samples.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let absolute =
        (0..at.grid.n).map(|j| (tt[j] + lap.samples[j] - m * m * at.samples[j]).abs()).fold(0.0, f64::max);
    Ok(WaveResidual { absolute, relative: absolute / (lap_max + m * m * at_max) })
}
