//! Ordinal scale of the evolution of a parasitic subsystem relative to its
//! host, keyed on the evolutionary coefficient `B`.
//!
//! | grade | B     | mode        | overall system   | symbol |
//! |-------|-------|-------------|------------------|--------|
//! | 1     | B < 1 | parasitism  | underdevelopment | `/`    |
//! | 2     | B = 1 | mutualism   | growth           | `+`    |
//! | 3     | B > 1 | symbiosis   | development      | `!`    |
//!
//! `B = 1` is a measure-zero event for an estimated coefficient, so two
//! adjudication modes are offered: an exact comparison with a fixed
//! tolerance ([`classify_point`]) and a two-sided t-test of `B = 1`
//! ([`classify_with_test`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statkit::student_t_sf;

/// Tolerance of the exact-comparison mode.
pub const POINT_EPSILON: f64 = 1e-9;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Parasitism,
    Mutualism,
    Symbiosis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionLabel {
    Underdevelopment,
    Growth,
    Development,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Parasitism => "parasitism",
            Mode::Mutualism => "mutualism",
            Mode::Symbiosis => "symbiosis",
        })
    }
}

impl std::fmt::Display for EvolutionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EvolutionLabel::Underdevelopment => "underdevelopment",
            EvolutionLabel::Growth => "growth",
            EvolutionLabel::Development => "development",
        })
    }
}

/// The t-test of `B = 1` backing a classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitTest {
    pub t_stat: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub df: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionClass {
    pub grade: u8,
    pub mode: Mode,
    pub evolution_label: EvolutionLabel,
    pub symbol: String,
    pub prediction: String,
    pub b_estimate: f64,
    pub test: Option<UnitTest>,
    /// Set when `B` is negative, a case the scale does not cover; the class
    /// is then grade 1.
    pub negative_b: bool,
}

impl EvolutionClass {
    fn from_grade(grade: u8, b: f64, test: Option<UnitTest>) -> Self {
        let (mode, evolution_label, symbol) = match grade {
            1 => (Mode::Parasitism, EvolutionLabel::Underdevelopment, "/"),
            2 => (Mode::Mutualism, EvolutionLabel::Growth, "+"),
            3 => (Mode::Symbiosis, EvolutionLabel::Development, "!"),
            _ => unreachable!("grade is produced internally"),
        };
        Self {
            grade,
            mode,
            evolution_label,
            symbol: symbol.to_string(),
            prediction: PREDICTIONS[grade as usize - 1].to_string(),
            b_estimate: b,
            test,
            negative_b: b < 0.0,
        }
    }

    /// "Low", "Average" or "High".
    pub fn grade_name(&self) -> &'static str {
        ["Low", "Average", "High"][self.grade as usize - 1]
    }

    /// Checks the one-to-one correspondence of grade, mode, label, symbol
    /// and prediction.
    pub fn is_consistent(&self) -> bool {
        let expected = match self.grade {
            1 => (Mode::Parasitism, EvolutionLabel::Underdevelopment, "/"),
            2 => (Mode::Mutualism, EvolutionLabel::Growth, "+"),
            3 => (Mode::Symbiosis, EvolutionLabel::Development, "!"),
            _ => return false,
        };
        (self.mode, self.evolution_label, self.symbol.as_str()) == expected
            && prediction_label(self.grade)
                .map(|p| p == self.prediction)
                .unwrap_or(false)
    }
}

const PREDICTIONS: [&str; 3] = [
    "Complex system of technology evolves slowly over time",
    "Complex system of technology has a steady-state growth",
    "Complex system of technology is likely to evolve rapidly",
];

pub fn prediction_label(grade: u8) -> Result<&'static str> {
    match grade {
        1..=3 => Ok(PREDICTIONS[grade as usize - 1]),
        _ => Err(Error::invalid(format!("grade must be 1, 2 or 3, got {grade}"))),
    }
}

/// Classifies `B` by exact comparison with 1 (tolerance [`POINT_EPSILON`]).
pub fn classify_point(b: f64) -> Result<EvolutionClass> {
    if !b.is_finite() {
        return Err(Error::invalid(format!("coefficient B must be finite, got {b}")));
    }
    let grade = if b < 1.0 - POINT_EPSILON {
        1
    } else if b > 1.0 + POINT_EPSILON {
        3
    } else {
        2
    };
    Ok(EvolutionClass::from_grade(grade, b, None))
}

/// Classifies `B` with a two-sided t-test of `B = 1` on `n - 2` degrees of
/// freedom. Failing to reject gives grade 2.
pub fn classify_with_test(b: f64, se_b: f64, n: usize, alpha: f64) -> Result<EvolutionClass> {
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    if !b.is_finite() {
        return Err(Error::invalid(format!("coefficient B must be finite, got {b}")));
    }
    if !(se_b.is_finite() && se_b > 0.0) {
        return Err(Error::invalid(format!("standard error must be positive, got {se_b}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let df = n - 2;
    let t_stat = (b - 1.0) / se_b;
    let p_value = student_t_sf(t_stat, df as f64)?;
    let grade = if p_value >= alpha {
        2
    } else if b > 1.0 {
        3
    } else {
        1
    };
    let test = UnitTest {
        t_stat,
        p_value,
        alpha,
        df,
    };
    Ok(EvolutionClass::from_grade(grade, b, Some(test)))
}
