//! Versioned JSON solution files. Floats are written in shortest round-trip
//! form and parsed exactly, so a save/load cycle is bit-identical.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::boundary::BoundaryCoefficients;
use crate::error::{Error, Result};
use crate::functionals::{ProblemSpec, Velocity};
use crate::solver::PairSolution;
use crate::validation::ValidationReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub created: String,
    #[serde(default)]
    pub note: String,
}

impl Provenance {
    pub const DETERMINISM_NOTE: &'static str =
        "seedless and deterministic: identical inputs give identical files apart from `created`";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub schema_version: u32,
    pub spec: ProblemSpec,
    pub velocity: Velocity,
    pub coefficients: BoundaryCoefficients,
    pub residual_inf: f64,
    pub newton_iters: usize,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(default)]
    pub validation: Option<ValidationReport>,
    pub provenance: Provenance,
}

impl SolutionFile {
    pub fn new(sol: &PairSolution, validation: Option<ValidationReport>, provenance: Provenance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            spec: sol.spec,
            velocity: sol.velocity,
            coefficients: sol.coefficients.clone(),
            residual_inf: sol.residual_inf,
            newton_iters: sol.newton_iters,
            diagnostics: sol.diagnostics.clone(),
            validation,
            provenance,
        }
    }

    pub fn solution(&self) -> PairSolution {
        PairSolution {
            spec: self.spec,
            velocity: self.velocity,
            coefficients: self.coefficients.clone(),
            residual_inf: self.residual_inf,
            newton_iters: self.newton_iters,
            diagnostics: self.diagnostics.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        match v.get("schema_version").and_then(|x| x.as_u64()) {
            Some(n) if n == SCHEMA_VERSION as u64 => {}
            Some(n) => return Err(Error::Format(format!("unsupported schema_version {n}"))),
            None => return Err(Error::Format("missing schema_version".into())),
        }
        let f: Self = serde_json::from_value(v).map_err(|e| Error::Format(e.to_string()))?;
        f.spec.validate()?;
        if f.coefficients.len() != f.spec.modes {
            return Err(Error::LengthMismatch { expected: f.spec.modes, got: f.coefficients.len() });
        }
        if f.coefficients.as_slice().iter().any(|a| !a.is_finite()) {
            return Err(Error::Format("non-finite coefficient".into()));
        }
        Ok(f)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

pub fn report_json(report: &ValidationReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Format(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchEntry {
    pub file: String,
    pub epsilon: f64,
    pub velocity: f64,
    pub residual_inf: f64,
}

/// `index.json` written next to the per-step files of a continuation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchIndex {
    pub schema_version: u32,
    pub entries: Vec<BranchEntry>,
    pub failure: Option<String>,
}

impl BranchIndex {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}
