//! Boundary parametrization `phi(w) = w + a f(w)` with `f(w) = sum a_n conj(w)^n`
//! on `|w| = 1`, the equispaced grid, and the sine analysis of odd residuals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Euler,
    Gsqg,
}

/// Amplitude multiplying `f`: `epsilon` for Euler, `epsilon |epsilon|^alpha` for gSQG.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeRule {
    pub model: Model,
    pub epsilon: f64,
    pub alpha: f64,
}

impl AmplitudeRule {
    pub fn amplitude(&self) -> f64 {
        match self.model {
            Model::Euler => self.epsilon,
            Model::Gsqg => self.epsilon * self.epsilon.abs().powf(self.alpha),
        }
    }
}

/// Real coefficients `a_1..a_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundaryCoefficients(Vec<f64>);

impl BoundaryCoefficients {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidParameter("need at least one mode".into()));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(Self(a))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n.max(1)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `a_n`, 1-based.
    pub fn get(&self, n: usize) -> f64 {
        self.0[n - 1]
    }

    /// Coefficients of `f(-w)`, i.e. `(-1)^n a_n`.
    pub fn mirrored(&self) -> Self {
        Self(self.0.iter().enumerate().map(|(i, a)| if i % 2 == 0 { -a } else { *a }).collect())
    }

    /// `sum |a_n| (1 + n)`, an upper bound for `sup|f| + sup|f'|` on the circle.
    pub fn c1_bound(&self) -> f64 {
        self.0.iter().enumerate().map(|(i, a)| a.abs() * (2 + i) as f64).sum()
    }
}

/// Equispaced nodes `w_j = exp(2 pi i j / M)` with a shared root table.
#[derive(Debug, Clone)]
pub struct CircleGrid {
    m: usize,
    roots: Vec<Complex64>,
}

impl CircleGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("grid size {m} must be even and >= 4")));
        }
        let roots = (0..m).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).collect();
        Ok(Self { m, roots })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, j: usize) -> Complex64 {
        self.roots[j % self.m]
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.m as f64
    }

    /// `w_j^p` for any integer power, from the root table (exactly periodic).
    pub fn power(&self, j: usize, p: i64) -> Complex64 {
        let m = self.m as i64;
        self.roots[(p * j as i64).rem_euclid(m) as usize]
    }
}

/// Map data on the grid: `f, f', f''` and `phi, phi'` at every node.
#[derive(Debug, Clone)]
pub struct BoundarySamples {
    pub amplitude: f64,
    pub w: Vec<Complex64>,
    pub f: Vec<Complex64>,
    pub fp: Vec<Complex64>,
    pub fpp: Vec<Complex64>,
    pub phi: Vec<Complex64>,
    pub dphi: Vec<Complex64>,
}

impl BoundarySamples {
    pub fn new(coeffs: &BoundaryCoefficients, amplitude: f64, grid: &CircleGrid) -> Self {
        let m = grid.len();
        let mut out = Self {
            amplitude,
            w: Vec::with_capacity(m),
            f: Vec::with_capacity(m),
            fp: Vec::with_capacity(m),
            fpp: Vec::with_capacity(m),
            phi: Vec::with_capacity(m),
            dphi: Vec::with_capacity(m),
        };
        for j in 0..m {
            let w = grid.node(j);
            let (mut f, mut fp, mut fpp) = (Complex64::default(), Complex64::default(), Complex64::default());
            for (i, &a) in coeffs.as_slice().iter().enumerate() {
                let n = (i + 1) as i64;
                let nf = n as f64;
                f += grid.power(j, -n) * a;
                fp -= grid.power(j, -n - 1) * (nf * a);
                fpp += grid.power(j, -n - 2) * (nf * (nf + 1.0) * a);
            }
            out.w.push(w);
            out.f.push(f);
            out.fp.push(fp);
            out.fpp.push(fpp);
            out.phi.push(w + f * amplitude);
            out.dphi.push(Complex64::new(1.0, 0.0) + fp * amplitude);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `sup|f| + sup|f'|` over the grid.
    pub fn c1_norm(&self) -> f64 {
        let s0 = self.f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let s1 = self.fp.iter().map(|v| v.norm()).fold(0.0, f64::max);
        s0 + s1
    }
}

/// `[phi, phi', phi'']` at an arbitrary point `w` (up to `order`, at most 2).
pub fn eval_map(coeffs: &BoundaryCoefficients, rule: &AmplitudeRule, w: Complex64, order: usize) -> Vec<Complex64> {
    let a = rule.amplitude();
    let inv = w.inv();
    let (mut f, mut fp, mut fpp) = (Complex64::default(), Complex64::default(), Complex64::default());
    let mut p = inv; // w^-n
    for (i, &c) in coeffs.as_slice().iter().enumerate() {
        let n = (i + 1) as f64;
        f += p * c;
        fp -= p * inv * (n * c);
        fpp += p * inv * inv * (n * (n + 1.0) * c);
        p *= inv;
    }
    let one = Complex64::new(1.0, 0.0);
    let vals = [w + f * a, one + fp * a, fpp * a];
    vals[..=order.min(2)].to_vec()
}

/// `exp(i u) - 1` without cancellation for small `u`.
pub fn expm1_i(u: f64) -> Complex64 {
    let s = (0.5 * u).sin();
    Complex64::new(-2.0 * s * s, u.sin())
}

/// `phi(w e^{iu}) - phi(w)` for `|w| = 1`, accurate to relative precision as `u -> 0`.
pub fn map_increment(coeffs: &BoundaryCoefficients, rule: &AmplitudeRule, w: Complex64, u: f64) -> Complex64 {
    let d1 = expm1_i(-u); // e^{-iu} - 1
    let z = d1 + 1.0;
    let wb = w.conj();
    let mut zp = Complex64::new(1.0, 0.0); // z^(n-1)
    let mut dn = Complex64::default(); // z^n - 1
    let mut wbn = Complex64::new(1.0, 0.0);
    let mut df = Complex64::default();
    for &c in coeffs.as_slice() {
        dn += zp * d1;
        zp *= z;
        wbn *= wb;
        df += wbn * dn * c;
    }
    w * expm1_i(u) + df * rule.amplitude()
}

/// Signed curvature of the normalized boundary `phi(S^1)` at `w`:
/// `Re(1 + w phi''/phi') / |phi'|`. The physical curve has curvature this over `epsilon`.
pub fn curvature(coeffs: &BoundaryCoefficients, rule: &AmplitudeRule, w: Complex64) -> Result<f64> {
    let v = eval_map(coeffs, rule, w, 2);
    let s = v[1].norm();
    if s < 1e-12 {
        return Err(Error::DegenerateTangent(s));
    }
    Ok((Complex64::new(1.0, 0.0) + w * v[2] / v[1]).re / s)
}

/// Sine coefficients `b_1..b_(M/2-1)` of samples `g(theta_j) = sum b_n sin(n theta_j)`.
pub fn analyze_sine(values: &[f64]) -> Result<Vec<f64>> {
    let m = values.len();
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("sine analysis needs an even length >= 4, got {m}")));
    }
    let sines: Vec<f64> = (0..m).map(|k| (2.0 * PI * k as f64 / m as f64).sin()).collect();
    Ok((1..m / 2)
        .map(|n| {
            let s: f64 = values.iter().enumerate().map(|(j, g)| g * sines[(n * j) % m]).sum();
            2.0 * s / m as f64
        })
        .collect())
}

/// Inverse of [`analyze_sine`] on an `M`-point grid.
pub fn synthesize_sine(coeffs: &[f64], m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / m as f64;
            coeffs.iter().enumerate().map(|(i, b)| b * ((i + 1) as f64 * th).sin()).sum()
        })
        .collect()
}

/// Physical boundaries: patch 1 is `epsilon phi(w_j)`, patch 2 is `2d` minus that.
pub fn scale_to_physical(
    coeffs: &BoundaryCoefficients,
    rule: &AmplitudeRule,
    m: usize,
    d: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let grid = CircleGrid::new(m)?;
    let s = BoundarySamples::new(coeffs, rule.amplitude(), &grid);
    let p1: Vec<Complex64> = s.phi.iter().map(|z| z * rule.epsilon).collect();
    let p2 = p1.iter().map(|z| Complex64::new(2.0 * d, 0.0) - z).collect();
    Ok((p1, p2))
}
