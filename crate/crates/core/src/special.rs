//! Gamma-function constants of the gSQG kernel and the Fourier multipliers of
//! the linearized operators.
//!
//! Everything here rests on one identity: for `|tau| = |w| = 1`,
//! `|tau - w|^-alpha = sum_k lambda_|k| (tau/w)^k` with
//! `lambda_k = lambda_0 (alpha/2)_k / (1 - alpha/2)_k` and
//! `lambda_0 = Gamma(1-alpha) / Gamma(1-alpha/2)^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments (Lanczos, g = 7).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// Rising factorial `(x)_n`.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (x + k as f64))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha = {alpha} not in (0, 1)")))
    }
}

/// Kernel constant `C_alpha = Gamma(alpha/2) / (2^(1-alpha) Gamma(1-alpha/2))`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(gamma(alpha / 2.0) / (2f64.powf(1.0 - alpha) * gamma(1.0 - alpha / 2.0)))
}

/// `lambda_0 = Gamma(1-alpha)/Gamma(1-alpha/2)^2`, the mean of `|tau - w|^-alpha`.
pub fn riesz_mean(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let g = gamma(1.0 - alpha / 2.0);
    Ok(gamma(1.0 - alpha) / (g * g))
}

/// `c0 = alpha Gamma(1-alpha) / ((2-alpha) Gamma(1-alpha/2)^2)`, so that
/// `contour integral of dtau / |tau - w|^alpha = c0 w`.
pub fn circle_moment_prefactor(alpha: f64) -> Result<f64> {
    Ok(riesz_mean(alpha)? * alpha / (2.0 - alpha))
}

/// `C_alpha * c0`, the coefficient of `Im f'(w)` in the gSQG self term.
pub fn hat_c_alpha(alpha: f64) -> Result<f64> {
    Ok(c_alpha(alpha)? * circle_moment_prefactor(alpha)?)
}

/// Fourier coefficients `lambda_0..=lambda_kmax` of `|2 sin(x/2)|^-alpha`.
pub fn riesz_fourier_coefficients(alpha: f64, kmax: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(kmax + 1);
    let mut lam = riesz_mean(alpha)?;
    let (a, b) = (alpha / 2.0, 1.0 - alpha / 2.0);
    for k in 0..=kmax {
        out.push(lam);
        lam *= (a + k as f64) / (b + k as f64);
    }
    Ok(out)
}

/// `M_k` with `contour integral of conj(tau)^k / |tau - w|^alpha dtau = M_k w^(1-k)`,
/// for `k >= 1`. Equal to `lambda_(k-1)`.
pub fn singular_moment(alpha: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("moment index must be >= 1".into()));
    }
    Ok(*riesz_fourier_coefficients(alpha, k - 1)?.last().unwrap())
}

/// Companion moment for positive powers:
/// `contour integral of tau^k / |tau - w|^alpha dtau = lambda_(k+1) w^(k+1)`.
pub fn singular_moment_positive(alpha: f64, k: usize) -> Result<f64> {
    Ok(*riesz_fourier_coefficients(alpha, k + 1)?.last().unwrap())
}

/// `gamma_hat_1..=gamma_hat_nmax`, the diagonal of the gSQG linearization at
/// `epsilon = 0` (corotating sign; the counter-rotating operator is its negative).
pub fn gsqg_multipliers(alpha: f64, nmax: usize) -> Result<Vec<f64>> {
    let c = c_alpha(alpha)?;
    let lam0 = riesz_mean(alpha)?;
    let pref = alpha * c * lam0 / 4.0;
    let (p, q) = (1.0 + alpha / 2.0, 1.0 - alpha / 2.0);
    // r_n = (1+alpha/2)_n / (1-alpha/2)_n, advanced by its ratio
    let mut r = p / q;
    let mut out = Vec::with_capacity(nmax);
    for n in 1..=nmax {
        let r_next = r * (p + n as f64) / (q + n as f64);
        out.push(pref * (2.0 * (1.0 + n as f64) / q - r - r_next));
        r = r_next;
    }
    Ok(out)
}

pub fn gsqg_multiplier(alpha: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("multiplier index must be >= 1".into()));
    }
    Ok(gsqg_multipliers(alpha, n)?[n - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiplierKind {
    Euler,
    GsqgCorotating,
    GsqgCounter,
}

/// Diagonal of the linearized operator, indexed `n = 1..=values.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierTable {
    pub kind: MultiplierKind,
    pub alpha: f64,
    pub values: Vec<f64>,
}

impl MultiplierTable {
    pub fn new(kind: MultiplierKind, alpha: f64, nmax: usize) -> Result<Self> {
        let values = match kind {
            MultiplierKind::Euler => (1..=nmax).map(|n| -(n as f64)).collect(),
            MultiplierKind::GsqgCorotating => gsqg_multipliers(alpha, nmax)?,
            MultiplierKind::GsqgCounter => gsqg_multipliers(alpha, nmax)?.into_iter().map(|v| -v).collect(),
        };
        Ok(Self { kind, alpha, values })
    }

    pub fn get(&self, n: usize) -> f64 {
        self.values[n - 1]
    }
}
