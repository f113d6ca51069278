//! Lévy measures, eps-truncated compound-Poisson simulation of the free noise,
//! truncated characteristic exponents and the jump-rate functionals of the
//! ground and quantum Fokker–Planck forms.

use crate::error::{invalid, Error, Result};
use crate::kernels::{kernel_eval, KernelKind};
use crate::quad::{integrate_pts, integrate_to_inf};
use crate::quantum::NODAL_THRESHOLD;
use crate::spectral::{Grid1D, NoiseKind, RealField};
use crate::special::{sici, z_k1};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const MIN_PATHS: usize = 10_000;
const TOL_ABS: f64 = 1e-12;
const TOL_REL: f64 = 1e-10;

/// Lévy density ν(y) of a pure-jump kind.
pub fn levy_density(kind: NoiseKind, y: f64) -> Result<f64> {
    kind.levy_density(y)
}

/// Which jump signs are retained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    #[default]
    Both,
    Positive,
    Negative,
}

impl Support {
    fn sides(self) -> f64 {
        match self {
            Support::Both => 2.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedLevy {
    pub kind: NoiseKind,
    pub eps: f64,
    /// ∫ dν over the retained jumps.
    pub lambda_eps: f64,
    /// Compensator ∫ y/(1+y²) dν over the retained jumps.
    pub b_eps: f64,
    pub support: Support,
}

// ∫_eps^∞ g(σy) ν(σy) dy for σ = ±1.
fn one_sided_tail(kind: NoiseKind, eps: f64, sign: f64, g: impl Fn(f64) -> f64) -> f64 {
    let nu = |y: f64| kind.levy_density(sign * y).unwrap_or(0.0) * g(sign * y);
    match kind {
        NoiseKind::Relativistic { m } => {
            let top = eps + 60.0 / m;
            let pts: Vec<f64> = (1..40).map(|k| eps * 1.5f64.powi(k)).filter(|&y| y < top).collect();
            integrate_pts(nu, eps, top, &pts, TOL_ABS, TOL_REL)
        }
        _ => integrate_to_inf(nu, eps, TOL_ABS, TOL_REL),
    }
}

impl TruncatedLevy {
    pub fn new(kind: NoiseKind, eps: f64) -> Result<Self> {
        Self::with_support(kind, eps, Support::Both)
    }

    pub fn with_support(kind: NoiseKind, eps: f64, support: Support) -> Result<Self> {
        kind.validate()?;
        if !kind.is_pure_jump() {
            return invalid("truncated Levy measure needs a pure-jump kind");
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return invalid(format!("eps must be positive, got {eps}"));
        }
        let half = match kind {
            NoiseKind::Cauchy => 1.0 / (PI * eps),
            _ => one_sided_tail(kind, eps, 1.0, |_| 1.0),
        };
        let comp = |sign: f64| one_sided_tail(kind, eps, sign, |y| y / (1.0 + y * y));
        let b_eps = match support {
            Support::Both => comp(1.0) + comp(-1.0),
            Support::Positive => comp(1.0),
            Support::Negative => comp(-1.0),
        };
        Ok(Self { kind, eps, lambda_eps: support.sides() * half, b_eps, support })
    }

    /// Rate of jumps with size in [lo, hi] (both inside the retained support).
    pub fn band_rate(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo < hi) {
            return invalid("need lo < hi");
        }
        let keep = |y: f64| match self.support {
            Support::Both => y.abs() > self.eps,
            Support::Positive => y > self.eps,
            Support::Negative => y < -self.eps,
        };
        let mut pts = vec![self.eps, -self.eps];
        pts.retain(|p| *p > lo && *p < hi);
        Ok(integrate_pts(
            |y| if keep(y) { self.kind.levy_density(y).unwrap_or(0.0) } else { 0.0 },
            lo,
            hi,
            &pts,
            TOL_ABS,
            TOL_REL,
        ))
    }

    fn sample_size(&self, rng: &mut ChaCha8Rng) -> f64 {
        loop {
            let u = 1.0 - rng.random::<f64>();
            let mag = self.eps / u;
            if let NoiseKind::Relativistic { m } = self.kind {
                // Cauchy tail envelope: ν_rel/ν_cauchy = z K₁(z) ≤ 1
                if rng.random::<f64>() >= z_k1(m * mag) {
                    continue;
                }
            }
            return match self.support {
                Support::Both => {
                    if rng.random::<bool>() {
                        mag
                    } else {
                        -mag
                    }
                }
                Support::Positive => mag,
                Support::Negative => -mag,
            };
        }
    }
}

/// φ_eps(p) = ∫_{|y|>eps}(e^{ipy} − 1)dν(y) for the two-sided measure.
pub fn truncated_exponent(kind: NoiseKind, eps: f64, p: f64) -> Result<Complex64> {
    let levy = TruncatedLevy::new(kind, eps)?;
    Ok(levy.exponent(p))
}

impl TruncatedLevy {
    /// ∫(e^{ipy} − 1)dν over the retained jumps.
    pub fn exponent(&self, p: f64) -> Complex64 {
        if p == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let side = |sign: f64| self.half_exponent(sign * p);
        match self.support {
            Support::Both => side(1.0) + side(-1.0),
            Support::Positive => side(1.0),
            Support::Negative => side(-1.0),
        }
    }

    // ∫_eps^∞ (e^{ipy} − 1) ν(y) dy
    fn half_exponent(&self, p: f64) -> Complex64 {
        let eps = self.eps;
        match self.kind {
            NoiseKind::Cauchy => {
                let a = p.abs();
                let (si, ci) = sici(a * eps).unwrap_or((0.0, 0.0));
                let re = (((a * eps).cos() - 1.0) / eps - a * (PI / 2.0 - si)) / PI;
                let im = p.signum() * ((a * eps).sin() / eps - a * ci) / PI;
                Complex64::new(re, im)
            }
            _ => Complex64::new(
                oscillatory_tail(self.kind, eps, p, |v| v.cos() - 1.0),
                oscillatory_tail(self.kind, eps, p, f64::sin),
            ),
        }
    }
}

// ∫_eps^top g(p y) ν(y) dy for the exponentially decaying measure, with breakpoints
// on the oscillation scale.
fn oscillatory_tail(kind: NoiseKind, eps: f64, p: f64, g: impl Fn(f64) -> f64) -> f64 {
    let top = match kind {
        NoiseKind::Relativistic { m } => eps + 60.0 / m,
        _ => unreachable!("closed form used for the Cauchy measure"),
    };
    let step = (PI / p.abs()).min(1.0);
    let mut pts: Vec<f64> = (1..40).map(|k| eps * 1.5f64.powi(k)).filter(|&y| y < top.min(1.0)).collect();
    let mut y = 1.0;
    while y < top {
        pts.push(y);
        y += step;
    }
    integrate_pts(|y| kind.levy_density(y).unwrap_or(0.0) * g(p * y), eps, top, &pts, TOL_ABS, TOL_REL)
}

/// Discrete Poisson spectrum: atoms y_j with rates λ_j and drifts b_j.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PoissonSpec {
    pub lambdas: Vec<f64>,
    pub sizes: Vec<f64>,
    pub shifts: Vec<f64>,
}

/// exp[Σ_j (ip b_j + λ_j(e^{ip y_j} − 1))].
pub fn poisson_char_fn(spec: &PoissonSpec, p: f64) -> Result<Complex64> {
    if spec.lambdas.len() != spec.sizes.len() || spec.shifts.len() != spec.lambdas.len() {
        return invalid("spec vectors differ in length");
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for ((&l, &y), &b) in spec.lambdas.iter().zip(&spec.sizes).zip(&spec.shifts) {
        acc += Complex64::new(0.0, p * b) + l * (Complex64::from_polar(1.0, p * y) - 1.0);
    }
    Ok(acc.exp())
}

impl PoissonSpec {
    /// Atoms at the ν-weighted centres of `per_decade` log cells per decade on
    /// eps < |y| < y_max, both signs; rates are the exact cell masses.
    pub fn discretize(kind: NoiseKind, eps: f64, y_max: f64, per_decade: usize) -> Result<Self> {
        if !(eps > 0.0 && y_max > eps) || per_decade == 0 {
            return invalid("need 0 < eps < y_max and per_decade >= 1");
        }
        let cells = ((y_max / eps).log10() * per_decade as f64).ceil() as usize;
        let r = (y_max / eps).powf(1.0 / cells as f64);
        let mut spec = PoissonSpec::default();
        let nu = |y: f64| kind.levy_density(y).unwrap_or(0.0);
        for k in 0..cells {
            let (a, b) = (eps * r.powi(k as i32), eps * r.powi(k as i32 + 1));
            let mass = integrate_pts(nu, a, b, &[], TOL_ABS, TOL_REL);
            let first = integrate_pts(|y| y * nu(y), a, b, &[], TOL_ABS, TOL_REL);
            let c = first / mass;
            for sign in [1.0, -1.0] {
                spec.lambdas.push(mass);
                spec.sizes.push(sign * c);
                spec.shifts.push(0.0);
            }
        }
        Ok(spec)
    }

    /// Adds the compensator drifts −λ_j y_j/(1+y_j²).
    pub fn compensated(mut self) -> Self {
        for ((b, &l), &y) in self.shifts.iter_mut().zip(&self.lambdas).zip(&self.sizes) {
            *b = -l * y / (1.0 + y * y);
        }
        self
    }
}

/// Band-limited exponent 2∫_{eps}^{y_max}(cos py − 1)dν.
pub fn band_exponent(kind: NoiseKind, eps: f64, y_max: f64, p: f64) -> f64 {
    let step = if p == 0.0 { 1.0 } else { (PI / p.abs()).min(1.0) };
    let mut pts: Vec<f64> = (1..60).map(|k| eps * 1.5f64.powi(k)).filter(|&y| y < y_max.min(1.0)).collect();
    let mut y = 1.0;
    while y < y_max {
        pts.push(y);
        y += step;
    }
    2.0 * integrate_pts(|y| kind.levy_density(y).unwrap_or(0.0) * ((p * y).cos() - 1.0), eps, y_max, &pts, TOL_ABS, TOL_REL)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpPath {
    pub start: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub jump_times: Vec<f64>,
    pub jump_sizes: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl JumpPath {
    pub fn position(&self, t: f64) -> f64 {
        let k = self.jump_times.partition_point(|&s| s <= t);
        self.start + self.jump_sizes[..k].iter().sum::<f64>()
    }
}

/// Path on (0, T] from substream `stream` of the ChaCha8 generator seeded with `seed`.
pub fn sample_path_indexed(levy: &TruncatedLevy, horizon: f64, seed: u64, stream: u64) -> Result<JumpPath> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return invalid(format!("T must be positive, got {horizon}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let gap = Exp::new(levy.lambda_eps).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let (mut times, mut sizes) = (Vec::new(), Vec::new());
    let mut t = gap.sample(&mut rng);
    while t <= horizon {
        times.push(t);
        sizes.push(levy.sample_size(&mut rng));
        t += gap.sample(&mut rng);
    }
    Ok(JumpPath { start: 0.0, horizon, jump_times: times, jump_sizes: sizes, seed, stream })
}

pub fn sample_path(levy: &TruncatedLevy, horizon: f64, seed: u64) -> Result<JumpPath> {
    sample_path_indexed(levy, horizon, seed, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Simulation {
    pub times: Vec<f64>,
    /// positions[k][i]: path i at times[k].
    pub positions: Vec<Vec<f64>>,
    pub jump_counts: Vec<u64>,
    /// Jumps per path with size in the requested band.
    pub band_counts: Vec<u64>,
    /// Counts of |jump| in decade bins [eps·10^k, eps·10^{k+1}), last bin open.
    pub size_decades: Vec<u64>,
}

pub const SIZE_DECADES: usize = 8;

/// Simulates `n_paths` paths (path i uses substream i) and records positions at `times`.
pub fn simulate(
    levy: &TruncatedLevy,
    horizon: f64,
    n_paths: usize,
    seed: u64,
    times: &[f64],
    band: Option<(f64, f64)>,
) -> Result<Simulation> {
    if times.iter().any(|&t| !(0.0..=horizon).contains(&t)) {
        return invalid("observation times must lie in [0, T]");
    }
    let per_path: Vec<(Vec<f64>, u64, u64, [u64; SIZE_DECADES])> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let path = sample_path_indexed(levy, horizon, seed, i)?;
            let pos = times.iter().map(|&t| path.position(t)).collect();
            let in_band = band.map_or(0, |(lo, hi)| path.jump_sizes.iter().filter(|&&y| y >= lo && y <= hi).count() as u64);
            let mut dec = [0u64; SIZE_DECADES];
            for y in &path.jump_sizes {
                let k = ((y.abs() / levy.eps).log10().floor().max(0.0) as usize).min(SIZE_DECADES - 1);
                dec[k] += 1;
            }
            Ok((pos, path.jump_sizes.len() as u64, in_band, dec))
        })
        .collect::<Result<_>>()?;
    let mut positions = vec![Vec::with_capacity(n_paths); times.len()];
    let mut size_decades = vec![0u64; SIZE_DECADES];
    let (mut jump_counts, mut band_counts) = (Vec::with_capacity(n_paths), Vec::with_capacity(n_paths));
    for (pos, n, b, dec) in per_path {
        for (k, x) in pos.into_iter().enumerate() {
            positions[k].push(x);
        }
        jump_counts.push(n);
        band_counts.push(b);
        for (a, d) in size_decades.iter_mut().zip(dec) {
            *a += d;
        }
    }
    Ok(Simulation { times: times.to_vec(), positions, jump_counts, band_counts, size_decades })
}

/// Sample mean and standard error.
pub fn mean_and_se(v: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = v.into_iter().collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalReport {
    #[serde(rename = "L1_error")]
    pub l1_error: f64,
    #[serde(skip)]
    pub histogram: RealField,
    pub charfn_p: Vec<f64>,
    pub charfn_empirical: Vec<(f64, f64)>,
    pub charfn_analytic: Vec<f64>,
    pub charfn_max_dev: f64,
    pub n_samples: usize,
}

/// 32 char-fn sample points p = 0.25, 0.5, …, 8.
pub fn default_charfn_points() -> Vec<f64> {
    (1..=32).map(|k| 0.25 * k as f64).collect()
}

/// Histogram of X(t) (cells centred on grid points) vs the ε → 0 kernel in L¹ over
/// the grid, and empirical vs exp(tφ_eps(p)) characteristic function.
pub fn empirical_vs_analytic(positions: &[f64], t: f64, levy: &TruncatedLevy, grid: &Grid1D, p_values: &[f64]) -> Result<EmpiricalReport> {
    if positions.len() < MIN_PATHS {
        return Err(Error::InsufficientSamples { got: positions.len(), needed: MIN_PATHS });
    }
    if !(t > 0.0) {
        return invalid("need t > 0");
    }
    let n = positions.len();
    let h = grid.dx();
    let mut counts = vec![0u64; grid.n];
    for &x in positions {
        let k = ((x - grid.x_min) / h + 0.5).floor();
        if k >= 0.0 && (k as usize) < grid.n {
            counts[k as usize] += 1;
        }
    }
    let hist = RealField { grid: *grid, samples: counts.iter().map(|&c| c as f64 / (n as f64 * h)).collect() };
    let kk = KernelKind::from_noise(levy.kind);
    let exact = RealField::from_fn(*grid, |x| kernel_eval(kk, 0.0, 0.0, x, t).unwrap_or(0.0))?;
    let l1_error = hist.l1_diff(&exact);
    let mut emp = Vec::with_capacity(p_values.len());
    let mut ana = Vec::with_capacity(p_values.len());
    let mut dev: f64 = 0.0;
    for &p in p_values {
        let z: Complex64 = positions.iter().map(|&x| Complex64::from_polar(1.0, p * x)).sum::<Complex64>() / n as f64;
        let a = (t * levy.exponent(p)).exp();
        dev = dev.max((z - a).norm());
        emp.push((z.re, z.im));
        ana.push(a.re);
    }
    Ok(EmpiricalReport {
        l1_error,
        histogram: hist,
        charfn_p: p_values.to_vec(),
        charfn_empirical: emp,
        charfn_analytic: ana,
        charfn_max_dev: dev,
        n_samples: n,
    })
}

/// Closed interval A = [a, b].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BorelInterval {
    pub a: f64,
    pub b: f64,
}

impl BorelInterval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return invalid(format!("need a < b, got [{a}, {b}]"));
        }
        Ok(Self { a, b })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

/// State entering the jump rate at a fixed time.
#[derive(Clone, Copy)]
pub enum RateField<'a> {
    /// θ(x): weight θ(x+y)/θ(x).
    Ground(&'a (dyn Fn(f64) -> f64 + Sync)),
    /// ψ(x): weight |ψ(x+y)/ψ(x)| + Im[ψ(x+y)/ψ(x)].
    Quantum(&'a (dyn Fn(f64) -> Complex64 + Sync)),
    /// ψ(x): weight Im[ψ(x+y)/ψ(x)] only (not sign-definite).
    QuantumRaw(&'a (dyn Fn(f64) -> Complex64 + Sync)),
}

impl RateField<'_> {
    fn weight(&self, x: f64) -> Result<Box<dyn Fn(f64) -> f64 + '_>> {
        match *self {
            RateField::Ground(th) => {
                let t0 = th(x);
                if !(t0.abs() > NODAL_THRESHOLD) {
                    return Err(Error::NodalRegion { x, modulus: t0.abs() });
                }
                Ok(Box::new(move |y| th(x + y) / t0))
            }
            RateField::Quantum(psi) | RateField::QuantumRaw(psi) => {
                let p0 = psi(x);
                if !(p0.norm() > NODAL_THRESHOLD) {
                    return Err(Error::NodalRegion { x, modulus: p0.norm() });
                }
                let raw = matches!(self, RateField::QuantumRaw(_));
                Ok(Box::new(move |y| {
                    let r = psi(x + y) / p0;
                    if raw {
                        r.im
                    } else {
                        r.norm() + r.im
                    }
                }))
            }
        }
    }
}

fn integrate_nu(kind: NoiseKind, w: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let f = |y: f64| w(y) * kind.levy_density(y).unwrap_or(0.0);
    if hi.is_infinite() {
        // lo > 0 here: both callers clip at ±eps
        let split = lo + 4.0 * lo.max(1.0);
        return integrate_pts(f, lo, split, &geometric_points(lo, split), TOL_ABS, TOL_REL)
            + integrate_to_inf(f, split, TOL_ABS, TOL_REL);
    }
    if lo.is_infinite() {
        return integrate_nu(kind, &|y| w(-y), -hi, f64::INFINITY);
    }
    integrate_pts(f, lo, hi, &geometric_points(lo, hi), TOL_ABS, TOL_REL)
}

// points clustering toward the end closest to the origin, where ν is largest
fn geometric_points(lo: f64, hi: f64) -> Vec<f64> {
    let near = if lo.abs() < hi.abs() { lo } else { hi };
    let far = if lo.abs() < hi.abs() { hi } else { lo };
    if near == 0.0 || near.signum() != far.signum() {
        return Vec::new();
    }
    (1..30).map(|k| near * 1.5f64.powi(k)).filter(|y| y.abs() < far.abs()).collect()
}

/// q(x,t,A) = ∫_{|y|>eps} w(x,y)[χ_A(x+y) − χ_A(x)]dν(y), split at y = a−x, b−x, ±eps.
pub fn jump_rate_q(field: RateField<'_>, kind: NoiseKind, x: f64, set: BorelInterval, eps: f64) -> Result<f64> {
    kind.validate()?;
    if !kind.is_pure_jump() {
        return invalid("jump rates need a pure-jump kind");
    }
    if !(eps > 0.0) {
        return invalid(format!("eps must be positive, got {eps}"));
    }
    let w = field.weight(x)?;
    let (lo, hi) = (set.a - x, set.b - x);
    if !set.contains(x) {
        Ok(integrate_nu(kind, &*w, lo, hi.min(-eps)) + integrate_nu(kind, &*w, lo.max(eps), hi))
    } else {
        Ok(-integrate_nu(kind, &*w, f64::NEG_INFINITY, lo.min(-eps)) - integrate_nu(kind, &*w, hi.max(eps), f64::INFINITY))
    }
}

/// Time-dependent state for the Fokker–Planck check.
#[derive(Clone, Copy)]
pub enum Evolution<'a> {
    /// ρ̄ = θθ* from the semigroup pair.
    Ground { theta: &'a (dyn Fn(f64, f64) -> f64 + Sync), theta_star: &'a (dyn Fn(f64, f64) -> f64 + Sync) },
    /// ρ = |ψ|² from unitary evolution.
    Quantum { psi: &'a (dyn Fn(f64, f64) -> Complex64 + Sync) },
}

impl Evolution<'_> {
    pub fn density(&self, x: f64, t: f64) -> f64 {
        match *self {
            Evolution::Ground { theta, theta_star } => theta(x, t) * theta_star(x, t),
            Evolution::Quantum { psi } => psi(x, t).norm_sqr(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FokkerPlanckResidual {
    pub eps: f64,
    /// d/dt ∫_A ρ dx by central difference.
    pub lhs: f64,
    /// ∫ q(x,t,A) ρ(x,t) dx.
    pub rhs: f64,
    pub residual: f64,
}

pub const FP_DT: f64 = 1e-3;

/// |d/dt ∫_A ρ − ∫ q ρ dx| at time t, x-integration over [x_lo, x_hi].
pub fn fokker_planck_residual(
    evolution: Evolution<'_>,
    kind: NoiseKind,
    set: BorelInterval,
    eps: f64,
    t: f64,
    x_range: (f64, f64),
) -> Result<FokkerPlanckResidual> {
    let (x_lo, x_hi) = x_range;
    if !(x_lo < set.a && set.b < x_hi) {
        return invalid("x range must contain A");
    }
    let mass = |s: f64| integrate_pts(|x| evolution.density(x, s), set.a, set.b, &[], 1e-13, 1e-12);
    let lhs = (mass(t + FP_DT) - mass(t - FP_DT)) / (2.0 * FP_DT);
    let breaks: Vec<f64> = [set.a - eps, set.a, set.a + eps, set.b - eps, set.b, set.b + eps]
        .into_iter()
        .filter(|&p| p > x_lo && p < x_hi)
        .collect();
    // coarse panels for the outer integral; q is evaluated by adaptive inner quadrature
    let mut pts = breaks.clone();
    let span = x_hi - x_lo;
    for k in 1..200 {
        pts.push(x_lo + span * k as f64 / 200.0);
    }
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let mut edges = vec![x_lo];
    edges.extend(pts.iter().copied().filter(|&p| p > x_lo && p < x_hi));
    edges.push(x_hi);
    let (gx, gw) = crate::quad::gauss_legendre(12);
    let nodes: Vec<(f64, f64)> = edges
        .windows(2)
        .flat_map(|e| {
            let (c, r) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            gx.iter().zip(&gw).map(move |(x, w)| (c + r * x, w * r)).collect::<Vec<_>>()
        })
        .collect();
    let rhs: f64 = nodes
        .par_iter()
        .map(|&(x, w)| -> Result<f64> {
            let rho = evolution.density(x, t);
            if rho == 0.0 {
                return Ok(0.0);
            }
            let q = match evolution {
                Evolution::Ground { theta, .. } => {
                    let f = move |u: f64| theta(u, t);
                    jump_rate_q(RateField::Ground(&f), kind, x, set, eps)?
                }
                Evolution::Quantum { psi } => {
                    let f = move |u: f64| psi(u, t);
                    jump_rate_q(RateField::Quantum(&f), kind, x, set, eps)?
                }
            };
            Ok(w * q * rho)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    Ok(FokkerPlanckResidual { eps, lhs, rhs, residual: (lhs - rhs).abs() })
}
