//! The JSON experiment configuration.
//!
//! ```json
//! {
//!   "dy": 1, "m": 1, "order": 4, "horizon": 1.0, "n_steps": 128, "seed": 7,
//!   "drift": {"order": 4, "components": [{"degree": 1, "dy": 1, "dz": 1, "entries": [1.0]}, ...]},
//!   "diffusion": {"order": 4, "components": [{"degree": 1, "dy": 1, "dz": 1, "m": 1, "entries": [0.5]}, ...]},
//!   "split_time": 0.5
//! }
//! ```
//!
//! Coefficients are constant in time. Diffusion tensors carry the noise axis
//! last, shape `dy x dy^k x m`. Missing drift or diffusion means zero;
//! `random_coefficients` replaces both with seeded uniform entries.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{DiffusionFamily, FormalMapping};
use crate::chain::{ConstantCoefficients, TimeGrid};
use crate::error::{Error, Result};
use crate::verification::{random_coefficients, ConvergenceProblem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dy: usize,
    #[serde(default = "one")]
    pub m: usize,
    pub order: usize,
    #[serde(default = "unit_horizon")]
    pub horizon: f64,
    #[serde(default = "default_steps")]
    pub n_steps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub path_index: u64,
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<FormalMapping>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diffusion: Option<DiffusionFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_coefficients: Option<RandomCoefficients>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<FormalMapping>,
    /// evolution-check: split time, default the middle knot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_time: Option<f64>,
    /// taylor-check
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halvings: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow_order: Option<usize>,
    /// convergence
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_schedule: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ConvergenceProblem>,
    /// compose-check
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compose: Option<ComposeInputs>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomCoefficients {
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeInputs {
    pub outer: FormalMapping,
    pub inner: FormalMapping,
}

fn one() -> usize {
    1
}
fn unit_horizon() -> f64 {
    1.0
}
fn default_steps() -> usize {
    128
}
fn default_paths() -> usize {
    1000
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Parses one field on its own so that errors name it.
fn check_field<T: serde::de::DeserializeOwned>(doc: &Value, field: &str) -> Result<()> {
    if let Some(v) = doc.get(field) {
        if !v.is_null() {
            serde_json::from_value::<T>(v.clone()).map_err(|e| invalid(field, e.to_string()))?;
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| invalid("<document>", e.to_string()))?;
        check_field::<FormalMapping>(&doc, "drift")?;
        check_field::<DiffusionFamily>(&doc, "diffusion")?;
        check_field::<FormalMapping>(&doc, "initial")?;
        check_field::<ConvergenceProblem>(&doc, "problem")?;
        check_field::<ComposeInputs>(&doc, "compose")?;
        let config: Self = serde_json::from_value(doc).map_err(|e| invalid("<document>", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.dy == 0 {
            return Err(invalid("dy", "must be positive"));
        }
        if self.m == 0 {
            return Err(invalid("m", "must be positive"));
        }
        if self.order == 0 {
            return Err(invalid("order", "must be positive"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(invalid("horizon", "must be a positive number"));
        }
        if self.n_steps == 0 {
            return Err(invalid("n_steps", "must be positive"));
        }
        if self.paths == 0 {
            return Err(invalid("paths", "must be positive"));
        }
        if let Some(d) = &self.drift {
            if d.order() != self.order {
                return Err(invalid(
                    "drift",
                    format!("order {} differs from `order` {}", d.order(), self.order),
                ));
            }
            if d.domain_dim() != self.dy || d.codomain_dim() != self.dy {
                return Err(invalid("drift", format!("tensors must have dy = dz = {}", self.dy)));
            }
        }
        if let Some(b) = &self.diffusion {
            if b.order() != self.order {
                return Err(invalid(
                    "diffusion",
                    format!("order {} differs from `order` {}", b.order(), self.order),
                ));
            }
            if b.domain_dim() != self.dy || b.codomain_dim() != self.dy {
                return Err(invalid("diffusion", format!("tensors must have dy = dz = {}", self.dy)));
            }
            if b.noise_dim() != self.m {
                return Err(invalid(
                    "diffusion",
                    format!("noise length {} differs from `m` {}", b.noise_dim(), self.m),
                ));
            }
        }
        if let Some(r) = &self.random_coefficients {
            if self.drift.is_some() || self.diffusion.is_some() {
                return Err(invalid(
                    "random_coefficients",
                    "cannot be combined with drift or diffusion",
                ));
            }
            if !(r.scale.is_finite() && r.scale >= 0.0) {
                return Err(invalid("random_coefficients", "scale must be a non-negative number"));
            }
        }
        if let Some(init) = &self.initial {
            if init.order() != self.order || init.domain_dim() != self.dy || init.codomain_dim() != self.dy {
                return Err(invalid(
                    "initial",
                    format!("must have order {} and dy = dz = {}", self.order, self.dy),
                ));
            }
        }
        if let Some(t) = self.split_time {
            let knot = self
                .grid()?
                .knot_of(t)
                .map_err(|e| invalid("split_time", e.to_string()))?;
            if knot == 0 || knot == self.n_steps {
                return Err(invalid("split_time", "must be an interior knot"));
            }
        }
        if let Some(y0) = &self.y0 {
            if y0.len() != self.dy {
                return Err(invalid(
                    "y0",
                    format!("length {} differs from dy {}", y0.len(), self.dy),
                ));
            }
        }
        if let Some(n) = self.flow_order {
            if n == 0 || n > self.order {
                return Err(invalid("flow_order", format!("must lie in 1..={}", self.order)));
            }
        }
        if self.halvings == Some(0) {
            return Err(invalid("halvings", "must be positive"));
        }
        if let Some(s) = &self.step_schedule {
            if s.len() < 3 || s.contains(&0) {
                return Err(invalid("step_schedule", "needs at least three positive step counts"));
            }
        }
        if let Some(c) = &self.compose {
            if c.inner.codomain_dim() != c.outer.domain_dim() {
                return Err(invalid("compose", "inner codomain must match outer domain"));
            }
            if c.inner.order() > self.order || c.outer.order() > self.order {
                return Err(invalid(
                    "compose",
                    format!("operand orders exceed `order` {}", self.order),
                ));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(0.0, self.horizon, self.n_steps)
    }

    pub fn coefficients(&self) -> Result<ConstantCoefficients> {
        if let Some(r) = &self.random_coefficients {
            return random_coefficients(self.order, self.dy, self.m, r.scale, self.seed);
        }
        let drift = match &self.drift {
            Some(d) => d.clone(),
            None => FormalMapping::zero(self.order, self.dy, self.dy)?,
        };
        let diffusion = match &self.diffusion {
            Some(b) => b.clone(),
            None => DiffusionFamily::zero(self.order, self.dy, self.m)?,
        };
        ConstantCoefficients::new(drift, diffusion)
    }

    pub fn initial_condition(&self) -> Result<FormalMapping> {
        match &self.initial {
            Some(i) => Ok(i.clone()),
            None => FormalMapping::identity(self.order, self.dy),
        }
    }

    pub fn hash(&self) -> String {
        crate::fingerprint(self)
    }
}
