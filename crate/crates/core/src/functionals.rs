//! The steady-state functional `G(epsilon, v, f)` on the grid, its sine
//! coefficients, and elimination of the rigid velocity `v` through `b_1 = 0`.
//!
//! `G` is affine in `v`, so assembly returns `base + v * slope`.

use serde::{Deserialize, Serialize};

use crate::boundary::{analyze_sine, AmplitudeRule, BoundaryCoefficients, BoundarySamples, CircleGrid, Model};
use crate::error::{Error, Result};
use crate::integrals::{euler_self_term, interaction_term, riesz_self_term, RieszWeights};
use crate::special::hat_c_alpha;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    Corotating,
    Counter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub model: Model,
    pub alpha: f64,
    pub pair: PairKind,
    pub d: f64,
    pub epsilon: f64,
    pub modes: usize,
    pub grid: usize,
}

impl ProblemSpec {
    pub const DEFAULT_MODES: usize = 32;
    pub const DEFAULT_GRID: usize = 256;

    pub fn new(model: Model, alpha: f64, pair: PairKind, d: f64, epsilon: f64) -> Self {
        Self { model, alpha, pair, d, epsilon, modes: Self::DEFAULT_MODES, grid: Self::DEFAULT_GRID }
    }

    pub fn with_resolution(mut self, modes: usize, grid: usize) -> Self {
        self.modes = modes;
        self.grid = grid;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self.model {
            Model::Euler if self.alpha != 0.0 => return bad(format!("Euler takes alpha = 0, got {}", self.alpha)),
            Model::Gsqg if !(self.alpha > 0.0 && self.alpha < 1.0) => {
                return bad(format!("gSQG needs alpha in (0, 1), got {}", self.alpha))
            }
            _ => {}
        }
        if self.d.is_nan() || self.d <= 2.0 || !self.d.is_finite() {
            return bad(format!("d = {} must exceed 2", self.d));
        }
        if self.epsilon.is_nan() || self.epsilon.abs() >= 0.5 {
            return bad(format!("|epsilon| = {} must be below 1/2", self.epsilon.abs()));
        }
        if self.modes == 0 {
            return bad("need at least one mode".into());
        }
        if !self.grid.is_multiple_of(2) || self.grid < 4 * self.modes + 4 {
            return bad(format!("grid {} must be even and >= 4N+4 = {}", self.grid, 4 * self.modes + 4));
        }
        Ok(())
    }

    pub fn rule(&self) -> AmplitudeRule {
        AmplitudeRule { model: self.model, epsilon: self.epsilon, alpha: self.alpha }
    }

    pub fn velocity_kind(&self) -> VelocityKind {
        match self.pair {
            PairKind::Corotating => VelocityKind::Angular,
            PairKind::Counter => VelocityKind::Translational,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VelocityKind {
    Angular,
    Translational,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Velocity {
    pub kind: VelocityKind,
    pub value: f64,
}

/// `G = base + v * slope` sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineResidual {
    pub base: Vec<f64>,
    pub slope: Vec<f64>,
}

impl AffineResidual {
    pub fn at(&self, v: f64) -> Vec<f64> {
        self.base.iter().zip(&self.slope).map(|(b, s)| b + v * s).collect()
    }
}

/// Sine coefficients `b_1..b_(N+1)` of `G`, plus the largest coefficient above `N+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualVector {
    pub b: Vec<f64>,
    pub aliasing: f64,
}

impl ResidualVector {
    /// The equations solved by Newton: `b_2..b_(N+1)`.
    pub fn reduced(&self) -> &[f64] {
        &self.b[1..]
    }

    pub fn reduced_inf(&self) -> f64 {
        self.reduced().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Grid tables and kernel weights for one problem specification.
#[derive(Debug, Clone)]
pub struct Assembler {
    spec: ProblemSpec,
    grid: CircleGrid,
    weights: Option<RieszWeights>,
    hat_c: f64,
}

impl Assembler {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        spec.validate()?;
        let grid = CircleGrid::new(spec.grid)?;
        let (weights, hat_c) = match spec.model {
            Model::Euler => (None, 0.0),
            Model::Gsqg => (Some(RieszWeights::new(spec.alpha, &grid)?), hat_c_alpha(spec.alpha)?),
        };
        Ok(Self { spec: *spec, grid, weights, hat_c })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    fn check_len(&self, coeffs: &BoundaryCoefficients) -> Result<()> {
        if coeffs.len() != self.spec.modes {
            return Err(Error::LengthMismatch { expected: self.spec.modes, got: coeffs.len() });
        }
        Ok(())
    }

    pub fn samples(&self, coeffs: &BoundaryCoefficients) -> BoundarySamples {
        BoundarySamples::new(coeffs, self.spec.rule().amplitude(), &self.grid)
    }

    pub fn parts(&self, coeffs: &BoundaryCoefficients) -> Result<AffineResidual> {
        self.check_len(coeffs)?;
        let s = self.samples(coeffs);
        self.parts_from(&s)
    }

    pub fn parts_from(&self, s: &BoundarySamples) -> Result<AffineResidual> {
        let sp = &self.spec;
        let eps = sp.epsilon;
        let m = s.len();
        let inter = interaction_term(s, sp.model, sp.alpha, eps, sp.d)?;
        let (mut base, mut slope) = (Vec::with_capacity(m), Vec::with_capacity(m));
        match sp.model {
            Model::Euler => {
                let own = euler_self_term(s)?;
                let sign = match sp.pair {
                    PairKind::Corotating => -1.0,
                    PairKind::Counter => 1.0,
                };
                for j in 0..m {
                    let wd = s.w[j] * s.dphi[j];
                    let b = -s.fp[j] + (own[j] + inter[j] * sign) * wd;
                    let sl = match sp.pair {
                        PairKind::Corotating => (s.phi[j].conj() * eps - sp.d) * wd * 2.0,
                        PairKind::Counter => wd * 2.0,
                    };
                    base.push(b.im);
                    slope.push(sl.im);
                }
            }
            Model::Gsqg => {
                let own = riesz_self_term(s, self.weights.as_ref().expect("gSQG weights"))?;
                for j in 0..m {
                    let l = s.w[j].conj() * s.dphi[j].conj();
                    let g1 = (own[j] * l).im - self.hat_c * s.fp[j].im;
                    let g2 = (inter[j] * l).im;
                    let (b, sl) = match sp.pair {
                        PairKind::Corotating => (g2 - g1, ((s.phi[j] * eps - sp.d) * l).im),
                        PairKind::Counter => (g1 + g2, -l.im),
                    };
                    base.push(b);
                    slope.push(sl);
                }
            }
        }
        Ok(AffineResidual { base, slope })
    }

    pub fn g(&self, coeffs: &BoundaryCoefficients, v: &Velocity) -> Result<Vec<f64>> {
        Ok(self.parts(coeffs)?.at(v.value))
    }

    fn coefficients_of(&self, g: &[f64]) -> Result<ResidualVector> {
        let all = analyze_sine(g)?;
        let n1 = self.spec.modes + 1;
        let b = all[..n1].to_vec();
        let aliasing = all[n1..].iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        Ok(ResidualVector { b, aliasing })
    }

    pub fn residual(&self, coeffs: &BoundaryCoefficients, v: &Velocity) -> Result<ResidualVector> {
        self.coefficients_of(&self.g(coeffs, v)?)
    }

    fn velocity_from(&self, p: &AffineResidual) -> Result<Velocity> {
        let b0 = analyze_sine(&p.base)?[0];
        let b1 = analyze_sine(&p.at(1.0))?[0];
        let slope = b1 - b0;
        if slope.abs() < 1e-10 {
            return Err(Error::DegenerateConstraint(slope));
        }
        Ok(Velocity { kind: self.spec.velocity_kind(), value: -b0 / slope })
    }

    /// Velocity making `b_1` vanish.
    pub fn velocity(&self, coeffs: &BoundaryCoefficients) -> Result<Velocity> {
        self.velocity_from(&self.parts(coeffs)?)
    }

    /// Velocity from the constraint and the residual at that velocity.
    pub fn reduced(&self, coeffs: &BoundaryCoefficients) -> Result<(Velocity, ResidualVector)> {
        let p = self.parts(coeffs)?;
        let v = self.velocity_from(&p)?;
        let r = self.coefficients_of(&p.at(v.value))?;
        Ok((v, r))
    }
}

/// `G(epsilon, v, f)` at the grid nodes.
pub fn assemble_g(spec: &ProblemSpec, coeffs: &BoundaryCoefficients, v: &Velocity) -> Result<Vec<f64>> {
    Assembler::new(spec)?.g(coeffs, v)
}

pub fn residual_coefficients(spec: &ProblemSpec, coeffs: &BoundaryCoefficients, v: &Velocity) -> Result<ResidualVector> {
    Assembler::new(spec)?.residual(coeffs, v)
}

pub fn velocity_from_constraint(spec: &ProblemSpec, coeffs: &BoundaryCoefficients) -> Result<Velocity> {
    Assembler::new(spec)?.velocity(coeffs)
}

/// Point-vortex speed: `Omega` (corotating) or `U` (counter-rotating) at `epsilon = 0`.
pub fn point_vortex_velocity(model: Model, alpha: f64, pair: PairKind, d: f64) -> Result<f64> {
    let two_d = 2.0 * d;
    Ok(match (model, pair) {
        (Model::Euler, PairKind::Corotating) => 1.0 / (two_d * two_d),
        (Model::Euler, PairKind::Counter) => 1.0 / (2.0 * two_d),
        (Model::Gsqg, PairKind::Corotating) => alpha * crate::special::c_alpha(alpha)? / two_d.powf(2.0 + alpha),
        (Model::Gsqg, PairKind::Counter) => alpha * crate::special::c_alpha(alpha)? / (2.0 * two_d.powf(1.0 + alpha)),
    })
}
