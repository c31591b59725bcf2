//! Contour integrals over the unit circle, `oint g dtau = (1/2 pi i) int g dtau`.
//!
//! Euler integrands have removable singularities at `tau = w`; with the
//! diagonal limit inserted the periodic trapezoid rule is spectrally accurate.
//! gSQG integrands carry `|tau - w|^-alpha`; they are integrated by product
//! integration against the exact Fourier coefficients of that kernel.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::boundary::{BoundarySamples, CircleGrid, Model};
use crate::error::{Error, Result};
use crate::special::{c_alpha, riesz_fourier_coefficients};

/// Trapezoid approximation of `oint g dtau` from samples `g(w_j)`.
pub fn contour_mean(values: &[Complex64], grid: &CircleGrid) -> Result<Complex64> {
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
    }
    let s: Complex64 = values.iter().enumerate().map(|(j, v)| v * grid.node(j)).sum();
    Ok(s / grid.len() as f64)
}

/// Integrand of the Euler self term at `tau != w`:
/// `conj(D)/D f'(tau) + (A conj(B) - conj(A) B)/(A D)` with `A = tau - w`,
/// `B = f(tau) - f(w)`, `D = A + eps B`.
pub fn euler_integrand(a: Complex64, b: Complex64, fp_tau: Complex64, eps: f64) -> Complex64 {
    let d = a + b * eps;
    d.conj() / d * fp_tau + (a * b.conj() - a.conj() * b) / (a * d)
}

/// Limit of [`euler_integrand`] as `tau -> w`.
pub fn euler_integrand_diag(w: Complex64, fp_w: Complex64, eps: f64) -> Complex64 {
    let dphi = Complex64::new(1.0, 0.0) + fp_w * eps;
    let wb2 = w.conj() * w.conj();
    -wb2 * dphi.conj() / dphi * fp_w + Complex64::new(0.0, 2.0 * fp_w.im) * wb2 / dphi
}

/// Euler self-interaction `G21 + G22` at every grid node.
pub fn euler_self_term(s: &BoundarySamples) -> Result<Vec<Complex64>> {
    let m = s.len();
    let eps = s.amplitude;
    let rows: Vec<(Complex64, f64)> = (0..m)
        .into_par_iter()
        .map(|k| {
            let (w, f) = (s.w[k], s.f[k]);
            let mut acc = euler_integrand_diag(w, s.fp[k], eps) * w;
            let mut ratio = s.dphi[k].norm();
            for j in (0..m).filter(|&j| j != k) {
                let a = s.w[j] - w;
                let b = s.f[j] - f;
                ratio = ratio.min((a + b * eps).norm() / a.norm());
                acc += euler_integrand(a, b, s.fp[j], eps) * s.w[j];
            }
            (acc / m as f64, ratio)
        })
        .collect();
    let worst = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    if worst < 0.25 {
        return Err(Error::NearDegenerateDenominator(worst));
    }
    Ok(rows.into_iter().map(|r| r.0).collect())
}

/// Product-integration weights: `oint h(tau) |tau - w_k|^-alpha dtau ~ sum_j q_(k-j) h_j w_j`.
#[derive(Debug, Clone)]
pub struct RieszWeights {
    pub alpha: f64,
    q: Vec<f64>,
}

impl RieszWeights {
    pub fn new(alpha: f64, grid: &CircleGrid) -> Result<Self> {
        let m = grid.len();
        let lam = riesz_fourier_coefficients(alpha, m / 2)?;
        let q = (0..m)
            .map(|l| {
                let mut s = lam[0] + lam[m / 2] * if l % 2 == 0 { 1.0 } else { -1.0 };
                for (k, lk) in lam.iter().enumerate().take(m / 2).skip(1) {
                    s += 2.0 * lk * grid.power(l, k as i64).re;
                }
                s / m as f64
            })
            .collect();
        Ok(Self { alpha, q })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Weight for target `k`, source `j`.
    pub fn weight(&self, k: usize, j: usize) -> f64 {
        let m = self.q.len();
        self.q[(k + m - j) % m]
    }

    /// `oint h(tau) |tau - w_k|^-alpha dtau` for samples of `h` on the grid.
    pub fn apply(&self, h: &[Complex64], grid: &CircleGrid, k: usize) -> Complex64 {
        h.iter().enumerate().map(|(j, v)| v * grid.node(j) * self.weight(k, j)).sum()
    }
}

/// gSQG self terms `I11 + I12` at every node:
/// `C_alpha oint [f'(tau) |Dphi|^-alpha + (|Dphi|^-alpha - |tau-w|^-alpha)/a] dtau`
/// with `Dphi = phi(tau) - phi(w)` and `a` the map amplitude (limit taken at `a = 0`).
pub fn riesz_self_term(s: &BoundarySamples, weights: &RieszWeights) -> Result<Vec<Complex64>> {
    let m = s.len();
    if weights.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: weights.len() });
    }
    let alpha = weights.alpha;
    let c = c_alpha(alpha)?;
    let amp = s.amplitude;
    let rows: Vec<(Complex64, f64, f64)> = (0..m)
        .into_par_iter()
        .map(|k| {
            let (w, f) = (s.w[k], s.f[k]);
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            let mut acc = Complex64::default();
            for j in 0..m {
                let q = if j == k { s.fp[k] } else { (s.f[j] - f) / (s.w[j] - w) };
                let sq = 2.0 * q.re + amp * q.norm_sqr();
                let r = (1.0 + amp * sq).max(0.0).sqrt();
                lo = lo.min(r);
                hi = hi.max(r);
                // |1 + a q|^-alpha - 1 and its quotient by a
                let (sm1, e) = if amp == 0.0 {
                    (0.0, -0.5 * alpha * sq)
                } else {
                    let x = (-0.5 * alpha * (amp * sq).ln_1p()).exp_m1();
                    (x, x / amp)
                };
                let h = s.fp[j] * (1.0 + sm1) + e;
                acc += h * s.w[j] * weights.weight(k, j);
            }
            (acc * c, lo, hi)
        })
        .collect();
    let lo = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    if lo < 0.25 {
        return Err(Error::BiLipschitzLoss(lo));
    }
    if hi > 4.0 {
        return Err(Error::BiLipschitzLoss(hi));
    }
    Ok(rows.into_iter().map(|r| r.0).collect())
}

/// Interaction with the second patch, before the pair-dependent sign.
///
/// Euler: `oint conj(phi(tau)) phi'(tau) / (eps (phi(tau) + phi(w)) - 2d) dtau`.
/// gSQG: `C_alpha oint phi'(tau) (|2d - eps (phi(tau)+phi(w))|^-alpha - (2d)^-alpha)/eps dtau`,
/// with its `eps -> 0` limit at `eps = 0`.
pub fn interaction_term(s: &BoundarySamples, model: Model, alpha: f64, eps: f64, d: f64) -> Result<Vec<Complex64>> {
    let m = s.len();
    let sup = s.phi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let margin = 2.0 * d - 2.0 * eps.abs() * sup;
    if margin <= 1.0 {
        return Err(Error::InteractionProximity(margin));
    }
    let inv = 1.0 / m as f64;
    let out = match model {
        Model::Euler => (0..m)
            .into_par_iter()
            .map(|k| {
                let pw = s.phi[k];
                let acc: Complex64 = (0..m)
                    .map(|j| s.phi[j].conj() * s.dphi[j] / ((s.phi[j] + pw) * eps - 2.0 * d) * s.w[j])
                    .sum();
                acc * inv
            })
            .collect(),
        Model::Gsqg => {
            let pref = c_alpha(alpha)? * (2.0 * d).powf(-alpha);
            (0..m)
                .into_par_iter()
                .map(|k| {
                    let pw = s.phi[k];
                    let acc: Complex64 = (0..m)
                        .map(|j| {
                            let p = (s.phi[j] + pw) / (2.0 * d);
                            let t = if eps == 0.0 {
                                alpha * p.re
                            } else {
                                let s2 = -2.0 * p.re + eps * p.norm_sqr();
                                (-0.5 * alpha * (eps * s2).ln_1p()).exp_m1() / eps
                            };
                            s.dphi[j] * t * s.w[j]
                        })
                        .sum();
                    acc * (pref * inv)
                })
                .collect()
        }
    };
    Ok(out)
}
