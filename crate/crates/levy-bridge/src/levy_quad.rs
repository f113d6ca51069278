//! Symmetric-pair quadrature for jump integrals ∫_{eps<|y|<L/2} [u(x+y), u(x−y)] ν(dy)
//! on a periodic grid. Jumps shorter than a few cells use spectral translation at
//! Gauss–Legendre nodes; longer jumps use exact grid rolls with Gregory end weights.
//! The Lévy density is periodized so the quadrature matches the spectral operator.

use crate::error::{invalid, Result};
use crate::quad::{gauss_legendre, integrate};
use crate::spectral::{dft, idft, ComplexField, Grid1D, NoiseKind};
use crate::special::z_k1;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Where a quadrature node's shifted samples came from.
#[derive(Debug, Clone, Copy)]
pub struct ShiftInfo {
    pub y: f64,
    /// True when the shift is an integer number of cells (exact roll).
    pub on_grid: bool,
}

#[derive(Debug, Clone)]
pub struct PairQuadrature {
    grid: Grid1D,
    spectral_nodes: Vec<(f64, f64)>,
    grid_nodes: Vec<(usize, f64)>,
    m2: f64,
}

/// Lévy density summed over periodic images of the domain.
pub fn periodic_levy_density(kind: NoiseKind, y: f64, length: f64) -> f64 {
    match kind {
        NoiseKind::Cauchy => {
            let s = (PI * y / length).sin();
            PI / (length * length * s * s)
        }
        _ => {
            let mut v = 0.0;
            for k in -2i32..=2 {
                let yy = y + k as f64 * length;
                if yy != 0.0 {
                    v += kind.levy_density(yy).unwrap_or(0.0);
                }
            }
            v
        }
    }
}

/// Two-sided second moment ∫_{|y|≤eps} y² ν(dy) of the whole-line measure.
pub fn small_jump_second_moment(kind: NoiseKind, eps: f64) -> Result<f64> {
    match kind {
        NoiseKind::Cauchy => Ok(2.0 * eps / PI),
        NoiseKind::Relativistic { m } => {
            let (v, _) = integrate(z_k1, 0.0, m * eps, 1e-300, 1e-14);
            Ok(2.0 * v / (PI * m * m))
        }
        NoiseKind::Gaussian { .. } => invalid("no Levy measure for the Gaussian kind"),
    }
}

impl PairQuadrature {
    pub fn new(grid: &Grid1D, kind: NoiseKind, eps: f64) -> Result<Self> {
        kind.validate()?;
        if !kind.is_pure_jump() {
            return invalid("pair quadrature needs a pure-jump kind");
        }
        if !(eps > 0.0) {
            return invalid(format!("eps must be positive, got {eps}"));
        }
        let dx = grid.dx();
        let len = grid.length();
        let m0 = (eps / dx).ceil() as usize + 8;
        if m0 + 8 > grid.n / 2 {
            return invalid("eps too large for this grid");
        }
        let y0 = m0 as f64 * dx;
        let (gx, gw) = gauss_legendre(10);
        let mut spectral_nodes = Vec::new();
        let mut a = eps;
        while a < y0 {
            let b = (2.0 * a).min(a + dx).min(y0);
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            for (x, w) in gx.iter().zip(&gw) {
                let y = c + h * x;
                spectral_nodes.push((y, w * h * periodic_levy_density(kind, y, len)));
            }
            a = b;
        }
        let last = grid.n / 2;
        let mut grid_nodes = Vec::with_capacity(last - m0 + 1);
        for k in m0..=last {
            let off = k - m0;
            let gw = match off {
                0 => 3.0 / 8.0,
                1 => 7.0 / 6.0,
                2 => 23.0 / 24.0,
                _ => 1.0,
            };
            let gw = if k == last { 0.5 } else { gw };
            let w = gw * dx * periodic_levy_density(kind, k as f64 * dx, len);
            if w > 0.0 {
                grid_nodes.push((k, w));
            }
        }
        Ok(Self { grid: *grid, spectral_nodes, grid_nodes, m2: small_jump_second_moment(kind, eps)? })
    }

    /// ∫_{|y|≤eps} y² ν(dy).
    pub fn small_jump_moment(&self) -> f64 {
        self.m2
    }

    /// Σ_nodes w(y)·pair(j, u(x_j), u(x_j+y), u(x_j−y), info) for every grid index j,
    /// i.e. ∫_{eps}^{L/2} pair(y) ν(y) dy. `pair` receives the values of all inputs.
    pub fn integrate<F>(&self, inputs: &[&ComplexField], pair: F) -> Vec<Complex64>
    where
        F: Fn(usize, &[Complex64], &[Complex64], &[Complex64], ShiftInfo) -> Complex64 + Sync,
    {
        self.integrate_n::<2, _>(inputs, |j, at, plus, minus, info| {
            let v = pair(j, at, plus, minus, info);
            [v.re, v.im]
        })
        .into_iter()
        .map(|[re, im]| Complex64::new(re, im))
        .collect()
    }

    /// Several real pair integrals at once; same node set as [`PairQuadrature::integrate`].
    pub fn integrate_n<const K: usize, F>(&self, inputs: &[&ComplexField], pair: F) -> Vec<[f64; K]>
    where
        F: Fn(usize, &[Complex64], &[Complex64], &[Complex64], ShiftInfo) -> [f64; K] + Sync,
    {
        let n = self.grid.n;
        let ni = inputs.len();
        let spectra: Vec<Vec<Complex64>> = inputs.iter().map(|f| dft(&f.samples)).collect();
        let freqs = self.grid.freqs();
        // shifted[node][input] = (plus, minus)
        let shifted: Vec<Vec<(Vec<Complex64>, Vec<Complex64>)>> = self
            .spectral_nodes
            .par_iter()
            .map(|&(y, _)| {
                spectra
                    .iter()
                    .map(|spec| {
                        let plus: Vec<Complex64> =
                            spec.iter().zip(&freqs).map(|(v, p)| v * Complex64::from_polar(1.0, p * y)).collect();
                        let minus: Vec<Complex64> =
                            spec.iter().zip(&freqs).map(|(v, p)| v * Complex64::from_polar(1.0, -p * y)).collect();
                        (idft(&plus), idft(&minus))
                    })
                    .collect()
            })
            .collect();
        let dx = self.grid.dx();
        (0..n)
            .into_par_iter()
            .map(|j| {
                let at: Vec<Complex64> = inputs.iter().map(|f| f.samples[j]).collect();
                let mut plus = vec![Complex64::new(0.0, 0.0); ni];
                let mut minus = vec![Complex64::new(0.0, 0.0); ni];
                let mut acc = [0.0; K];
                for (node, &(y, w)) in shifted.iter().zip(&self.spectral_nodes) {
                    for i in 0..ni {
                        plus[i] = node[i].0[j];
                        minus[i] = node[i].1[j];
                    }
                    let v = pair(j, &at, &plus, &minus, ShiftInfo { y, on_grid: false });
                    for (a, b) in acc.iter_mut().zip(v) {
                        *a += b * w;
                    }
                }
                for &(k, w) in &self.grid_nodes {
                    let jp = (j + k) % n;
                    let jm = (j + n - k) % n;
                    for i in 0..ni {
                        plus[i] = inputs[i].samples[jp];
                        minus[i] = inputs[i].samples[jm];
                    }
                    let v = pair(j, &at, &plus, &minus, ShiftInfo { y: k as f64 * dx, on_grid: true });
                    for (a, b) in acc.iter_mut().zip(v) {
                        *a += b * w;
                    }
                }
                acc
            })
            .collect()
    }
}
