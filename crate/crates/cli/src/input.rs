//! Pool file parsing and validation.
//!
//! The input is a single JSON document with top-level keys `experts`
//! (list of `label`/`a`/`b`), optional `observation` (`y`/`n`) and optional
//! `dirichlet_x`. Unknown keys are rejected so typos fail loudly.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use logpool_core::hierarchical::DirichletPrior;
use logpool_core::objectives::Observation;
use logpool_core::pool::{BetaOpinion, OpinionPool};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolFile {
    pub experts: Vec<ExpertEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation: Option<ObservationEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dirichlet_x: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpertEntry {
    pub label: String,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationEntry {
    pub y: u64,
    pub n: u64,
}

impl fmt::Display for PoolFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_string_pretty(self).map_err(|_| fmt::Error)?;
        f.write_str(&s)
    }
}

impl PoolFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let parsed: PoolFile = serde_json::from_str(&raw).map_err(|e| {
            CliError::Input(format!(
                "malformed input {} (line {}, column {}): {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })?;
        parsed.validate()?;
        Ok(parsed)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.experts.is_empty() {
            return Err(CliError::Input(
                "field `experts`: at least one expert is required".into(),
            ));
        }
        for (i, e) in self.experts.iter().enumerate() {
            if !e.a.is_finite() || e.a <= 0.0 || !e.b.is_finite() || e.b <= 0.0 {
                return Err(CliError::Input(format!(
                    "field `experts[{i}]` ({:?}): shape parameters must be positive, got a = {}, b = {}",
                    e.label, e.a, e.b
                )));
            }
        }
        if let Some(obs) = &self.observation {
            if obs.y > obs.n {
                return Err(CliError::Input(format!(
                    "field `observation`: y must not exceed n, got y = {}, n = {}",
                    obs.y, obs.n
                )));
            }
        }
        if let Some(x) = &self.dirichlet_x {
            if x.len() != self.experts.len() {
                return Err(CliError::Input(format!(
                    "field `dirichlet_x`: length {} does not match {} experts",
                    x.len(),
                    self.experts.len()
                )));
            }
            for (i, &xi) in x.iter().enumerate() {
                if !xi.is_finite() || xi <= 0.0 {
                    return Err(CliError::Input(format!(
                        "field `dirichlet_x[{i}]`: entries must be positive, got {xi}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_pool(&self) -> Result<OpinionPool<f64>, CliError> {
        let opinions: Result<Vec<_>, _> = self
            .experts
            .iter()
            .map(|e| BetaOpinion::new(e.label.clone(), e.a, e.b))
            .collect();
        OpinionPool::new(opinions.map_err(|e| CliError::Input(e.to_string()))?)
            .map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn to_observation(&self) -> Result<Option<Observation>, CliError> {
        self.observation
            .map(|o| Observation::new(o.y, o.n).map_err(|e| CliError::Input(e.to_string())))
            .transpose()
    }

    /// Dirichlet hyperparameters, defaulting to the diffuse symmetric choice
    /// `x_i = 1/(K+1)` when absent.
    pub fn to_dirichlet(&self) -> Result<DirichletPrior<f64>, CliError> {
        match &self.dirichlet_x {
            Some(x) => {
                DirichletPrior::new(x.clone()).map_err(|e| CliError::Input(e.to_string()))
            }
            None => DirichletPrior::symmetric(self.experts.len())
                .map_err(|e| CliError::Input(e.to_string())),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        self.experts.iter().map(|e| e.label.clone()).collect()
    }
}
