//! Positive-definiteness diagnostics showing the Cauchy–Schrödinger process is not
//! Markov: ratio kernel h(p,s,t), its denominator zeros, Bochner matrices and a
//! witness search near the zeros.

use crate::error::{invalid, Error, Result};
use crate::quantum::time_bracket;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const POLE_THRESHOLD: f64 = 1e-12;
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;
pub const WITNESS_OFFSETS: [f64; 3] = [1e-2, 1e-3, 1e-4];
pub const WITNESS_ZEROS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioKernel {
    pub s: f64,
    pub t: f64,
}

impl RatioKernel {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !(s > 0.0 && s < t && t.is_finite()) {
            return invalid(format!("need 0 < s < t, got s={s}, t={t}"));
        }
        Ok(Self { s, t })
    }

    pub fn numerator(&self, p: f64) -> f64 {
        time_bracket(p, self.t)
    }

    pub fn denominator(&self, p: f64) -> f64 {
        time_bracket(p, self.s)
    }

    pub fn eval(&self, p: f64) -> Result<f64> {
        let d = self.denominator(p);
        if d.abs() < POLE_THRESHOLD {
            return Err(Error::PoleProximity { p, denominator: d });
        }
        Ok(self.numerator(p) / d)
    }
}

/// h(p,s,t) = [cos(t|p|) + sin(t|p|)/t] / [cos(s|p|) + sin(s|p|)/s].
pub fn h_ratio(p: f64, s: f64, t: f64) -> Result<f64> {
    RatioKernel::new(s, t)?.eval(p)
}

/// Ground-truth multiplier [cos(t|p|) + sin(t|p|)/t]/(1+|p|), a characteristic function.
pub fn ground_multiplier(p: f64, t: f64) -> f64 {
    time_bracket(p, t) / (1.0 + p.abs())
}

/// |p|_N = (arctan(1/s) + (2N+1)π/2)/s for N = 0..count−1.
pub fn denominator_zeros(s: f64, count: usize) -> Result<Vec<f64>> {
    if !(s > 0.0) || count == 0 {
        return invalid("need s > 0 and count >= 1");
    }
    let a = (1.0 / s).atan();
    Ok((0..count).map(|n| (a + (2 * n + 1) as f64 * PI / 2.0) / s).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPoint {
    #[serde(rename = "M")]
    pub m: f64,
    pub det: f64,
}

impl TwoPoint {
    pub fn is_violation(&self) -> bool {
        self.m.abs() > 1.0
    }
}

/// 2×2 Bochner matrix [[1, M], [M, 1]] with M = h(p1 − p2).
pub fn two_point_violation(p1: f64, p2: f64, s: f64, t: f64) -> Result<TwoPoint> {
    if p1 == p2 {
        return invalid("need p1 != p2");
    }
    let m = h_ratio(p1 - p2, s, t)?;
    Ok(TwoPoint { m, det: 1.0 - m * m })
}

/// Eigenvalues of a real symmetric matrix (row-major) by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n || n == 0 {
        return invalid("matrix shape mismatch");
    }
    let mut m = a.to_vec();
    for i in 0..n {
        for j in 0..i {
            if (m[i * n + j] - m[j * n + i]).abs() > 1e-12 * (1.0 + m[i * n + j].abs()) {
                return invalid("matrix is not symmetric");
            }
        }
    }
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    for sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i * n + j].powi(2)).sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        if sweep == 99 {
            return Err(Error::NonConvergence { iterations: 100, residual: off.sqrt() });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}

/// Smallest eigenvalue of [h(p_i − p_j)].
pub fn pd_matrix_min_eigenvalue(h: impl Fn(f64) -> Result<f64>, points: &[f64]) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return invalid("need at least 2 points");
    }
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = h(points[i] - points[j])?;
        }
    }
    Ok(symmetric_eigenvalues(&a, n)?[0])
}

/// Minimum over `trials` random point sets (sizes 2..=max_n, |p| ≤ p_max) of the
/// smallest Bochner eigenvalue. Sets that hit a pole are skipped.
pub fn random_pd_test(h: impl Fn(f64) -> Result<f64>, max_n: usize, trials: usize, p_max: f64, seed: u64) -> Result<f64> {
    if max_n < 2 {
        return invalid("need max_n >= 2");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let n = rng.random_range(2..=max_n);
        let pts: Vec<f64> = (0..n).map(|_| rng.random_range(-p_max..p_max)).collect();
        match pd_matrix_min_eigenvalue(&h, &pts) {
            Ok(v) => worst = worst.min(v),
            Err(Error::PoleProximity { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PDWitness {
    pub p1: f64,
    pub p2: f64,
    pub s: f64,
    pub t: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub min_eigenvalue: f64,
    /// Index N of the denominator zero used.
    pub zero_index: usize,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSearch {
    pub witness: PDWitness,
    /// Zero indices skipped because the numerator also vanishes there.
    pub skipped_zeros: Vec<usize>,
}

/// Scans offsets δ ∈ {1e−2, 1e−3, 1e−4} on both sides of the first five denominator
/// zeros (zero index, then offset, then side −/+). At the first zero that yields
/// |M| > 1 + 1e−6, returns its innermost violating configuration as (p1, p2) = (|p|, 0).
pub fn find_nonmarkov_witness(s: f64, t: f64) -> Result<WitnessSearch> {
    let k = RatioKernel::new(s, t)?;
    let mut skipped = Vec::new();
    for (idx, z) in denominator_zeros(s, WITNESS_ZEROS)?.into_iter().enumerate() {
        if k.numerator(z).abs() < DEGENERACY_THRESHOLD {
            skipped.push(idx);
            continue;
        }
        let mut best: Option<PDWitness> = None;
        for &d in &WITNESS_OFFSETS {
            for side in [-1.0, 1.0] {
                let p = z + side * d;
                let Ok(m) = k.eval(p) else { continue };
                if m.abs() > 1.0 + DEGENERACY_THRESHOLD {
                    let ev = symmetric_eigenvalues(&[1.0, m, m, 1.0], 2)?[0];
                    best = Some(PDWitness { p1: p, p2: 0.0, s, t, m, min_eigenvalue: ev, zero_index: idx, offset: side * d });
                    break;
                }
            }
        }
        if let Some(w) = best {
            return Ok(WitnessSearch { witness: w, skipped_zeros: skipped });
        }
    }
    Err(Error::WitnessNotFound)
}

/// |M| at offsets δ₀, δ₀/2, … (`halvings` + 1 values) below the N-th zero.
pub fn witness_stability(s: f64, t: f64, zero_index: usize, delta0: f64, halvings: usize) -> Result<Vec<f64>> {
    let k = RatioKernel::new(s, t)?;
    let z = denominator_zeros(s, zero_index + 1)?[zero_index];
    (0..=halvings).map(|i| Ok(k.eval(z - delta0 / 2f64.powi(i as i32))?.abs())).collect()
}

/// (p, h) samples on [p_min, p_max]; points within the pole threshold are omitted.
pub fn h_profile(s: f64, t: f64, p_min: f64, p_max: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    let k = RatioKernel::new(s, t)?;
    if !(p_max > p_min) || n < 2 {
        return invalid("need p_max > p_min and n >= 2");
    }
    Ok((0..n)
        .map(|i| p_min + (p_max - p_min) * i as f64 / (n - 1) as f64)
        .filter_map(|p| k.eval(p).ok().map(|h| (p, h)))
        .collect())
}
