//! Fixtures shared by the benchmarks.

use vpair_core::{BoundaryCoefficients, Model, PairKind, ProblemSpec};

/// Default-resolution problem near a converged state.
pub fn fixture(model: Model, pair: PairKind, eps: f64) -> (ProblemSpec, BoundaryCoefficients) {
    let alpha = if model == Model::Euler { 0.0 } else { 0.5 };
    let spec = ProblemSpec::new(model, alpha, pair, 3.0, eps);
    let a = (0..spec.modes).map(|n| 1e-3 * 0.1f64.powi(n as i32)).collect();
    (spec, BoundaryCoefficients::new(a).expect("finite"))
}
