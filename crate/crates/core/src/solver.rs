//! Damped Newton on `b_2..b_(N+1) = 0` and natural-parameter continuation in epsilon.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::boundary::BoundaryCoefficients;
use crate::error::{Error, Result};
use crate::functionals::{Assembler, ProblemSpec, Velocity};
use crate::linearization::{jacobian_with, JacobianMatrix, DEFAULT_FD_STEP};
use crate::validation::{validate, Thresholds, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub fd_step: f64,
    pub max_halvings: usize,
    /// Keep the Jacobian across iterations while the residual contracts by at least 10x.
    pub reuse_jacobian: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iters: 30, fd_step: DEFAULT_FD_STEP, max_halvings: 8, reuse_jacobian: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSolution {
    pub spec: ProblemSpec,
    pub velocity: Velocity,
    pub coefficients: BoundaryCoefficients,
    pub residual_inf: f64,
    pub newton_iters: usize,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, f64>,
}

fn ball_norm(asm: &Assembler, a: &BoundaryCoefficients) -> f64 {
    asm.samples(a).c1_norm()
}

fn solve_step(jac: &JacobianMatrix, r: &[f64]) -> Result<Vec<f64>> {
    let rhs = DVector::from_iterator(r.len(), r.iter().map(|v| -v));
    let dx = jac.0.clone().lu().solve(&rhs).ok_or(Error::DegenerateJacobian)?;
    if dx.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateJacobian);
    }
    Ok(dx.iter().copied().collect())
}

/// Newton iteration from `initial`, with step halving on non-decrease.
pub fn newton_solve_with(spec: &ProblemSpec, initial: &BoundaryCoefficients, opts: &NewtonOptions) -> Result<PairSolution> {
    let asm = Assembler::new(spec)?;
    if initial.len() != spec.modes {
        return Err(Error::LengthMismatch { expected: spec.modes, got: initial.len() });
    }
    let mut a = initial.clone();
    let norm = ball_norm(&asm, &a);
    if norm > 1.0 {
        return Err(Error::BallExit(norm));
    }
    let (mut vel, mut res) = asm.reduced(&a)?;
    let mut rn = res.reduced_inf();
    let mut iters = 0;
    let mut jac: Option<JacobianMatrix> = None;
    while rn > opts.tol {
        if iters >= opts.max_iters {
            return Err(Error::NoConvergence { iters, residual: rn });
        }
        if jac.is_none() {
            jac = Some(jacobian_with(&asm, &a, opts.fd_step)?);
        }
        let dx = solve_step(jac.as_ref().unwrap(), res.reduced())?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = a.as_slice().iter().zip(&dx).map(|(x, d)| x + lambda * d).collect();
            let trial = BoundaryCoefficients::new(trial)?;
            let norm = ball_norm(&asm, &trial);
            if norm <= 1.0 {
                if let Ok((v, r)) = asm.reduced(&trial) {
                    if r.reduced_inf() < rn {
                        accepted = Some((trial, v, r));
                        break;
                    }
                }
            } else if lambda == 1.0 && rn > 1e-3 {
                // a full step far outside the ball: report rather than creep
                return Err(Error::BallExit(norm));
            }
            lambda *= 0.5;
        }
        iters += 1;
        match accepted {
            Some((t, v, r)) => {
                let new_rn = r.reduced_inf();
                let slow = new_rn > 0.1 * rn;
                a = t;
                vel = v;
                res = r;
                rn = new_rn;
                if slow || !opts.reuse_jacobian {
                    jac = None;
                }
            }
            None if jac.is_some() && opts.reuse_jacobian => {
                // stale Jacobian: refresh once before giving up
                jac = None;
            }
            None => return Err(Error::NoConvergence { iters, residual: rn }),
        }
    }
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("aliasing".to_string(), res.aliasing);
    diagnostics.insert("b1".to_string(), res.b[0]);
    Ok(PairSolution { spec: *spec, velocity: vel, coefficients: a, residual_inf: rn, newton_iters: iters, diagnostics })
}

pub fn newton_solve(spec: &ProblemSpec, initial: &BoundaryCoefficients, tol: f64, max_iters: usize) -> Result<PairSolution> {
    newton_solve_with(spec, initial, &NewtonOptions { tol, max_iters, ..Default::default() })
}

/// Reduced residual of `sol` on a grid twice as fine.
pub fn doubled_grid_residual(sol: &PairSolution) -> Result<f64> {
    let spec = sol.spec.with_resolution(sol.spec.modes, 2 * sol.spec.grid);
    Ok(Assembler::new(&spec)?.reduced(&sol.coefficients)?.1.reduced_inf())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    pub newton: NewtonOptions,
    pub max_step_halvings: usize,
    pub validate: bool,
    pub thresholds: Thresholds,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self { newton: NewtonOptions::default(), max_step_halvings: 10, validate: true, thresholds: Thresholds::default() }
    }
}

/// Solutions ordered by increasing `|epsilon|`, starting at `epsilon = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub members: Vec<PairSolution>,
    #[serde(default)]
    pub reports: Vec<ValidationReport>,
    pub failure: Option<String>,
}

impl Branch {
    pub fn reached_epsilon(&self) -> f64 {
        self.members.last().map_or(0.0, |s| s.spec.epsilon)
    }
}

fn accept(sol: &mut PairSolution, opts: &ContinuationOptions) -> std::result::Result<Option<ValidationReport>, String> {
    let doubled = doubled_grid_residual(sol).map_err(|e| e.to_string())?;
    sol.diagnostics.insert("residual_doubled_grid".into(), doubled);
    if doubled > 10.0 * sol.residual_inf.max(opts.newton.tol) {
        return Err(format!("grid-doubling residual {doubled:.3e} at epsilon = {}", sol.spec.epsilon));
    }
    if !opts.validate {
        return Ok(None);
    }
    let rep = validate(sol, &opts.thresholds).map_err(|e| e.to_string())?;
    if !rep.pass {
        return Err(format!("validation failed at epsilon = {}: {}", sol.spec.epsilon, rep.notes.join("; ")));
    }
    Ok(Some(rep))
}

/// March from `epsilon = 0` to `eps_max` in `steps` equal steps (sign of `eps_max`
/// sets the direction), halving a failed step up to `max_step_halvings` times.
pub fn continue_branch(template: &ProblemSpec, eps_max: f64, steps: usize, opts: &ContinuationOptions) -> Result<Branch> {
    if steps == 0 {
        return Err(Error::InvalidParameter("need at least one continuation step".into()));
    }
    template.with_epsilon(eps_max).validate()?;
    let start = template.with_epsilon(0.0);
    let mut first = newton_solve_with(&start, &BoundaryCoefficients::zeros(start.modes), &opts.newton)?;
    let mut branch = Branch { members: vec![], reports: vec![], failure: None };
    match accept(&mut first, opts) {
        Ok(r) => branch.reports.extend(r),
        Err(msg) => {
            branch.failure = Some(msg);
            return Ok(branch);
        }
    }
    branch.members.push(first);
    let mut fd_checked = false;

    for k in 1..=steps {
        let target = eps_max * k as f64 / steps as f64;
        let mut halvings = 0;
        let mut attempt = target;
        loop {
            let prev = branch.members.last().unwrap();
            let eps_prev = prev.spec.epsilon;
            let spec = template.with_epsilon(attempt);
            let outcome = newton_solve_with(&spec, &prev.coefficients, &opts.newton).map_err(|e| e.to_string());
            let outcome = outcome.and_then(|mut sol| accept(&mut sol, opts).map(|r| (sol, r)));
            match outcome {
                Ok((mut sol, rep)) => {
                    if !fd_checked {
                        let asm = Assembler::new(&spec)?;
                        let h = opts.newton.fd_step;
                        let j1 = jacobian_with(&asm, &sol.coefficients, h)?;
                        let j2 = jacobian_with(&asm, &sol.coefficients, 0.5 * h)?;
                        sol.diagnostics.insert("fd_step_gap".into(), (&j1.0 - &j2.0).amax());
                        fd_checked = true;
                    }
                    branch.reports.extend(rep);
                    branch.members.push(sol);
                    if attempt == target {
                        break;
                    }
                    attempt = target;
                    halvings = 0;
                }
                Err(msg) => {
                    halvings += 1;
                    if halvings > opts.max_step_halvings {
                        branch.failure = Some(format!("stopped at epsilon = {eps_prev}: {msg}"));
                        return Ok(branch);
                    }
                    attempt = eps_prev + 0.5 * (attempt - eps_prev);
                }
            }
        }
    }
    Ok(branch)
}
