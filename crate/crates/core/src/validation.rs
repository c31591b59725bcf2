//! Checks on converged solutions that do not reuse the solver's discretization.
//!
//! The tangency check rebuilds the velocity of both physical patches directly
//! from the contour-dynamics formulas (trapezoid rule for smooth integrands,
//! tanh-sinh for the weakly singular gSQG self-integral) at targets placed
//! between the collocation nodes.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::boundary::{curvature, eval_map, map_increment, BoundaryCoefficients, CircleGrid, Model};
use crate::error::{Error, Result};
use crate::functionals::{Assembler, PairKind, ProblemSpec, Velocity};
use crate::quadrature::tanh_sinh;
use crate::solver::{Branch, PairSolution};
use crate::special::c_alpha;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub tangency: f64,
    pub symmetry: f64,
    pub holder_norm: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { tangency: 1e-6, symmetry: 1e-8, holder_norm: 1.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tangency_inf: f64,
    pub tangency_patch_mismatch: f64,
    pub min_curvature: f64,
    pub curvature_bound: f64,
    pub symmetry_defect: f64,
    pub holder_seminorm: f64,
    pub holder_norm: f64,
    pub pass: bool,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangencyReport {
    /// Largest normal-velocity defect over both patches.
    pub max_defect: f64,
    /// Largest difference of `|defect|` at corresponding points of the two patches.
    pub patch_mismatch: f64,
    pub targets: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityReport {
    pub min_curvature: f64,
    /// Lower bound from sup norms of `f'` and `f''` alone.
    pub bound: f64,
}

/// Normal velocity in the co-moving frame at `epsilon phi(e^{i t})` (patch 1) and the
/// reflected point `2d - epsilon phi(e^{i t})` (patch 2), for each `t` in `targets`.
///
/// Euler defects are scaled by 2, the contour-equation normalization, so that
/// both models report `|G| / |phi'|` for the assembled functional `G`.
pub fn physical_defects(
    spec: &ProblemSpec,
    coeffs: &BoundaryCoefficients,
    vel: &Velocity,
    targets: &[f64],
    nsrc: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    spec.validate()?;
    let eps = spec.epsilon;
    if eps == 0.0 {
        return Err(Error::InvalidParameter("physical boundaries collapse at epsilon = 0".into()));
    }
    let rule = spec.rule();
    let d = spec.d;
    let two_d = Complex64::new(2.0 * d, 0.0);
    let i = Complex64::i();
    let delta = match spec.pair {
        PairKind::Corotating => [1.0, 1.0],
        PairKind::Counter => [1.0, -1.0],
    };
    let (ca, alpha) = match spec.model {
        Model::Euler => (0.0, 0.0),
        Model::Gsqg => (c_alpha(spec.alpha)?, spec.alpha),
    };
    let hs = 2.0 * PI / nsrc as f64;
    // patch-1 source nodes: position and d/ds
    let src: Vec<(Complex64, Complex64)> = (0..nsrc)
        .map(|k| {
            let w = Complex64::from_polar(1.0, k as f64 * hs);
            let v = eval_map(coeffs, &rule, w, 1);
            (v[0] * eps, i * w * v[1] * eps)
        })
        .collect();
    let patch_point = |p: usize, z1: Complex64, dz1: Complex64| if p == 0 { (z1, dz1) } else { (two_d - z1, -dz1) };

    let defect = |p: usize, t: f64| -> f64 {
        let wt = Complex64::from_polar(1.0, t);
        let v = eval_map(coeffs, &rule, wt, 1);
        let (z, dz) = patch_point(p, v[0] * eps, i * wt * v[1] * eps);
        let sgn = if p == 0 { 1.0 } else { -1.0 };
        // self boundary, parametrized by the offset u from the target
        let dxi_at = |u: f64| {
            let w = wt * Complex64::from_polar(1.0, u);
            i * w * eval_map(coeffs, &rule, w, 1)[1] * (eps * sgn)
        };
        let inc = |u: f64| map_increment(coeffs, &rule, wt, u) * (eps * sgn);
        let (self_part, other_part) = match spec.model {
            Model::Euler => {
                let own: Complex64 = (0..nsrc)
                    .map(|k| {
                        let u = k as f64 * hs;
                        let dxi = dxi_at(u);
                        if k == 0 {
                            dz.conj() / dz * dxi
                        } else {
                            let dl = inc(u);
                            dl.conj() / dl * dxi
                        }
                    })
                    .sum::<Complex64>()
                    * hs;
                let other: Complex64 = src
                    .iter()
                    .map(|&(x1, dx1)| {
                        let (x, dx) = patch_point(1 - p, x1, dx1);
                        let dl = x - z;
                        dl.conj() / dl * dx
                    })
                    .sum::<Complex64>()
                    * hs;
                (own, other)
            }
            Model::Gsqg => {
                let half = |s: f64| {
                    tanh_sinh(
                        |_, du, _| {
                            let u = s * du;
                            inc(u).norm().powf(-alpha) * dxi_at(u)
                        },
                        0.0,
                        PI,
                        1e-14,
                    )
                };
                let own = half(1.0) + half(-1.0);
                let other: Complex64 = src
                    .iter()
                    .map(|&(x1, dx1)| {
                        let (x, dx) = patch_point(1 - p, x1, dx1);
                        (x - z).norm().powf(-alpha) * dx
                    })
                    .sum::<Complex64>()
                    * hs;
                (own, other)
            }
        };
        let (own_sign, other_sign) = (delta[p], delta[1 - p]);
        let raw = self_part * own_sign + other_part * other_sign;
        let (vel_phys, factor) = match spec.model {
            // conj(v) = (1/(4 pi eps^2)) sum delta oint conj(xi - z)/(xi - z) dxi
            Model::Euler => ((raw / (4.0 * PI * eps * eps)).conj(), 2.0),
            Model::Gsqg => (raw * (ca / (2.0 * PI * eps * eps)), 1.0),
        };
        let frame = match spec.pair {
            PairKind::Corotating => i * (z - d) * vel.value,
            PairKind::Counter => i * vel.value,
        };
        let n = -i * dz / dz.norm();
        factor * ((vel_phys - frame) * n.conj()).re
    };

    let d1: Vec<f64> = targets.par_iter().map(|&t| defect(0, t)).collect();
    let d2: Vec<f64> = targets.par_iter().map(|&t| defect(1, t)).collect();
    Ok((d1, d2))
}

/// Point-vortex balance used when the patches have collapsed (`epsilon = 0`).
fn point_vortex_defect(spec: &ProblemSpec, vel: &Velocity) -> Result<f64> {
    let d = spec.d;
    let i = Complex64::i();
    let dz = Complex64::new(-2.0 * d, 0.0); // vortex 1 relative to vortex 2
    let strength = match spec.pair {
        PairKind::Corotating => 1.0,
        PairKind::Counter => -1.0,
    };
    let (induced, factor) = match spec.model {
        Model::Euler => ((-i * 0.5 / dz).conj() * strength, 2.0),
        Model::Gsqg => {
            let c = c_alpha(spec.alpha)?;
            (i * dz * (0.5 * spec.alpha * c * dz.norm().powf(-spec.alpha - 2.0)) * strength, 1.0)
        }
    };
    let frame = match spec.pair {
        PairKind::Corotating => i * (-d) * vel.value,
        PairKind::Counter => i * vel.value,
    };
    Ok(factor * (induced - frame).norm())
}

/// Tangency defect at `offgrid_m` targets per patch, half a cell off the
/// `offgrid_m`-point grid, with sources on an `offgrid_m + 1`-point grid.
pub fn tangency_residual(sol: &PairSolution, offgrid_m: usize) -> Result<TangencyReport> {
    if sol.spec.epsilon == 0.0 {
        let v = point_vortex_defect(&sol.spec, &sol.velocity)?;
        return Ok(TangencyReport { max_defect: v, patch_mismatch: 0.0, targets: 2 });
    }
    let mt = offgrid_m + offgrid_m % 2;
    let targets: Vec<f64> = (0..mt).map(|j| 2.0 * PI * (j as f64 + 0.5) / mt as f64).collect();
    let (d1, d2) = physical_defects(&sol.spec, &sol.coefficients, &sol.velocity, &targets, mt + 1)?;
    let max_defect = d1.iter().chain(&d2).fold(0.0, |m: f64, v| m.max(v.abs()));
    let patch_mismatch = d1.iter().zip(&d2).fold(0.0, |m: f64, (a, b)| m.max((a.abs() - b.abs()).abs()));
    Ok(TangencyReport { max_defect, patch_mismatch, targets: 2 * mt })
}

/// Minimum curvature of the normalized boundary over a `4M` grid.
pub fn convexity_check(sol: &PairSolution) -> Result<ConvexityReport> {
    let rule = sol.spec.rule();
    let m = 4 * sol.spec.grid;
    let grid = CircleGrid::new(m)?;
    let mut min_k = f64::INFINITY;
    let (mut s1, mut s2) = (0.0f64, 0.0f64);
    let amp = rule.amplitude().abs();
    for j in 0..m {
        let w = grid.node(j);
        min_k = min_k.min(curvature(&sol.coefficients, &rule, w)?);
        if amp > 0.0 {
            let v = eval_map(&sol.coefficients, &rule, w, 2);
            s1 = s1.max((v[1] - 1.0).norm() / amp);
            s2 = s2.max(v[2].norm() / amp);
        }
    }
    // Re(1 + w phi''/phi') >= 1 - a|f''|/(1 - a|f'|), |phi'| <= 1 + a|f'|
    let bound = if amp * s1 < 1.0 { (1.0 - amp * s2 / (1.0 - amp * s1)) / (1.0 + amp * s1) } else { f64::NEG_INFINITY };
    Ok(ConvexityReport { min_curvature: min_k, bound })
}

/// Discrete Hoelder seminorm of `f^(order)` with exponent `beta`: the largest
/// difference quotient over dyadic separations on a fine grid. A lower bound
/// for the continuous seminorm.
pub fn holder_seminorm(coeffs: &BoundaryCoefficients, beta: f64, order: usize) -> f64 {
    let m = (16 * coeffs.len()).next_power_of_two().max(256);
    let g: Vec<Complex64> = (0..m)
        .map(|j| {
            let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
            let inv = w.conj();
            let mut acc = Complex64::default();
            let mut p = inv;
            for (i, &a) in coeffs.as_slice().iter().enumerate() {
                let n = (i + 1) as f64;
                // d^order/dw^order conj(w)^n = (-1)^order n (n+1)...(n+order-1) w^-(n+order)
                let mut c = a;
                for r in 0..order {
                    c *= -(n + r as f64);
                }
                acc += p * inv.powi(order as i32) * c;
                p *= inv;
            }
            acc
        })
        .collect();
    let mut best = 0.0f64;
    let mut s = 1;
    while s <= m / 2 {
        let chord = 2.0 * (PI * s as f64 / m as f64).sin();
        let denom = chord.powf(beta);
        for j in 0..m {
            best = best.max((g[j] - g[(j + s) % m]).norm() / denom);
        }
        s *= 2;
    }
    best
}

/// Exponent used for the reported Hoelder norm of `f` in `C^(1+beta)`.
pub fn holder_exponent(spec: &ProblemSpec) -> f64 {
    match spec.model {
        Model::Euler => 0.5,
        Model::Gsqg => 1.0 - spec.alpha,
    }
}

/// Residual and velocity mismatch of the mirrored solution `f(-w)` at `-epsilon`.
pub fn equivariance_defect(sol: &PairSolution) -> Result<f64> {
    let spec = sol.spec.with_epsilon(-sol.spec.epsilon);
    let asm = Assembler::new(&spec)?;
    let (v, r) = asm.reduced(&sol.coefficients.mirrored())?;
    Ok(r.reduced_inf().max((v.value - sol.velocity.value).abs()))
}

/// Compare a branch with its mirror: `a_n(-eps) = (-1)^n a_n(eps)` and equal velocities.
pub fn symmetry_check(pos: &Branch, neg: &Branch) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut matched = 0;
    for p in pos.members.iter().filter(|s| s.spec.epsilon != 0.0) {
        let eps = p.spec.epsilon;
        let q = neg
            .members
            .iter()
            .find(|s| (s.spec.epsilon + eps).abs() <= 1e-14 * eps.abs().max(1.0))
            .ok_or_else(|| Error::GridMismatch(format!("no member at epsilon = {}", -eps)))?;
        if q.coefficients.len() != p.coefficients.len() {
            return Err(Error::GridMismatch("mode counts differ".into()));
        }
        let mirrored = p.coefficients.mirrored();
        for (a, b) in q.coefficients.as_slice().iter().zip(mirrored.as_slice()) {
            worst = worst.max((a - b).abs());
        }
        worst = worst.max((q.velocity.value - p.velocity.value).abs());
        matched += 1;
    }
    if matched == 0 {
        return Err(Error::GridMismatch("no nonzero-epsilon members to compare".into()));
    }
    Ok(worst)
}

pub fn validate(sol: &PairSolution, thr: &Thresholds) -> Result<ValidationReport> {
    let tan = tangency_residual(sol, 3 * sol.spec.grid)?;
    let conv = convexity_check(sol)?;
    let sym = equivariance_defect(sol)?;
    let beta = holder_exponent(&sol.spec);
    let semi = holder_seminorm(&sol.coefficients, beta, 1);
    let grid = CircleGrid::new(4 * sol.spec.grid)?;
    let samples = crate::boundary::BoundarySamples::new(&sol.coefficients, 0.0, &grid);
    let norm = samples.c1_norm() + semi;
    let mut notes = Vec::new();
    if norm > thr.holder_norm {
        notes.push(format!("Hoelder norm {norm:.3e} exceeds {:.2} (advisory)", thr.holder_norm));
    }
    if tan.max_defect > thr.tangency {
        notes.push(format!("tangency defect {:.3e} above {:.1e}", tan.max_defect, thr.tangency));
    }
    if conv.min_curvature <= 0.0 {
        notes.push("boundary is not strictly convex".into());
    }
    if sym > thr.symmetry {
        notes.push(format!("mirror defect {sym:.3e} above {:.1e}", thr.symmetry));
    }
    let pass = tan.max_defect <= thr.tangency && conv.min_curvature > 0.0 && sym <= thr.symmetry;
    Ok(ValidationReport {
        tangency_inf: tan.max_defect,
        tangency_patch_mismatch: tan.patch_mismatch,
        min_curvature: conv.min_curvature,
        curvature_bound: conv.bound,
        symmetry_defect: sym,
        holder_seminorm: semi,
        holder_norm: norm,
        pass,
        notes,
    })
}
