//! Functional-measure time series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of a series in the host-parasite pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Host,
    Parasite,
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Role::Host => "host",
            Role::Parasite => "parasite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub t: f64,
    pub value: f64,
}

/// A named time series of one functional measure of technology.
///
/// Times are calendar years (fractional years allowed), strictly increasing.
/// Every value is strictly positive so that natural logs are defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechSeries {
    name: String,
    role: Role,
    units: String,
    observations: Vec<Observation>,
}

impl TechSeries {
    pub fn new(
        name: impl Into<String>,
        role: Role,
        units: impl Into<String>,
        observations: Vec<Observation>,
    ) -> Result<Self> {
        let name = name.into();
        for (i, obs) in observations.iter().enumerate() {
            if !obs.t.is_finite() {
                return Err(Error::invalid(format!("series `{name}`: non-finite time at index {i}")));
            }
            if !(obs.value.is_finite() && obs.value > 0.0) {
                return Err(Error::invalid(format!(
                    "series `{name}`: value {} at t={} is not a positive finite number",
                    obs.value, obs.t
                )));
            }
        }
        if let Some(w) = observations.windows(2).find(|w| w[1].t <= w[0].t) {
            return Err(Error::invalid(format!(
                "series `{name}`: times must be strictly increasing ({} then {})",
                w[0].t, w[1].t
            )));
        }
        Ok(Self {
            name,
            role,
            units: units.into(),
            observations,
        })
    }

    /// Builds a series from parallel time and value slices.
    pub fn from_pairs(name: impl Into<String>, role: Role, times: &[f64], values: &[f64]) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::invalid(format!(
                "time and value lengths differ ({} vs {})",
                times.len(),
                values.len()
            )));
        }
        let obs = times
            .iter()
            .zip(values)
            .map(|(&t, &value)| Observation { t, value })
            .collect();
        Self::new(name, role, "", obs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn units(&self) -> &str {
        &self.units
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.t).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.value).collect()
    }

    pub fn log_values(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.value.ln()).collect()
    }

    pub fn max_value(&self) -> Option<f64> {
        self.observations.iter().map(|o| o.value).reduce(f64::max)
    }

    /// Value observed at exactly `t`, if any.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        self.observations
            .binary_search_by(|o| o.t.total_cmp(&t))
            .ok()
            .map(|i| self.observations[i].value)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = units.into();
        self
    }

    /// Multiplies every value by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let obs = self
            .observations
            .iter()
            .map(|o| Observation {
                t: o.t,
                value: o.value * factor,
            })
            .collect();
        Self::new(self.name.clone(), self.role, self.units.clone(), obs)
    }

    pub(crate) fn require_len(&self, needed: usize) -> Result<()> {
        if self.len() < needed {
            return Err(Error::InsufficientData {
                needed,
                got: self.len(),
            }
            .context(format!("series `{}`", self.name)));
        }
        Ok(())
    }
}
