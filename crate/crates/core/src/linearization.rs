//! Jacobian of the reduced map `a_1..a_N -> b_2..b_(N+1)`: closed-form
//! diagonal at `epsilon = 0` and central finite differences in general.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::boundary::{BoundaryCoefficients, Model};
use crate::error::{Error, Result};
use crate::functionals::{Assembler, PairKind, ProblemSpec};
use crate::special::{MultiplierKind, MultiplierTable};

pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// `b_(n+1) = mu_n a_n` at `epsilon = 0`.
pub fn analytic_multipliers(spec: &ProblemSpec, nmax: usize) -> Result<MultiplierTable> {
    let kind = match (spec.model, spec.pair) {
        (Model::Euler, _) => MultiplierKind::Euler,
        (Model::Gsqg, PairKind::Corotating) => MultiplierKind::GsqgCorotating,
        (Model::Gsqg, PairKind::Counter) => MultiplierKind::GsqgCounter,
    };
    MultiplierTable::new(kind, spec.alpha, nmax)
}

/// Row `i` is `b_(i+2)`, column `j` is `a_(j+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianMatrix(pub DMatrix<f64>);

impl JacobianMatrix {
    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.0.diagonal().iter().copied().collect()
    }

    pub fn max_offdiag(&self) -> f64 {
        let n = self.size();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.0[(i, j)].abs());
                }
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// 2-norm condition number of `diag(1/n) J`.
    pub fn scaled_condition(&self) -> f64 {
        let mut s = self.0.clone();
        for (i, mut row) in s.row_iter_mut().enumerate() {
            row /= (i + 1) as f64;
        }
        let sv = s.singular_values();
        let (mx, mn) = sv.iter().fold((0.0f64, f64::INFINITY), |(a, b), v| (a.max(*v), b.min(*v)));
        mx / mn
    }
}

/// Central-difference Jacobian with the velocity re-eliminated at every probe.
pub fn jacobian_with(asm: &Assembler, coeffs: &BoundaryCoefficients, step: f64) -> Result<JacobianMatrix> {
    let n = asm.spec().modes;
    if coeffs.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: coeffs.len() });
    }
    let probe = |j: usize, h: f64| -> Result<Vec<f64>> {
        let mut a = coeffs.as_slice().to_vec();
        a[j] += h;
        let (_, r) = asm.reduced(&BoundaryCoefficients::new(a)?)?;
        Ok(r.reduced().to_vec())
    };
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let (p, m) = (probe(j, step)?, probe(j, -step)?);
            Ok(p.iter().zip(&m).map(|(x, y)| (x - y) / (2.0 * step)).collect())
        })
        .collect::<Result<_>>()?;
    let jac = JacobianMatrix(DMatrix::from_fn(n, n, |i, j| cols[j][i]));
    if !jac.is_finite() {
        return Err(Error::NonFiniteJacobian);
    }
    Ok(jac)
}

pub fn numeric_jacobian(spec: &ProblemSpec, coeffs: &BoundaryCoefficients, step: f64) -> Result<JacobianMatrix> {
    jacobian_with(&Assembler::new(spec)?, coeffs, step)
}
