//! Check reports and named tolerances.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// The value must not exceed the bound.
    AtMost,
    /// The value must reach the bound (a non-vanishing witness).
    AtLeast,
    /// Reported only; never affects the verdict.
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub label: String,
    pub point: Option<[f64; 2]>,
    pub value: f64,
    pub bound: f64,
    pub relation: Relation,
    /// `value/bound` for upper bounds, `bound/value` for witnesses, 0 for reports.
    pub normalized: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub scenario: String,
    pub residuals: Vec<Residual>,
    /// Largest normalized residual.
    pub max_residual: f64,
    /// Always 1: residuals are normalized by their own bounds.
    pub tolerance: f64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Largest raw value among residuals whose label starts with `prefix`.
    pub fn max_value(&self, prefix: &str) -> Option<f64> {
        self.residuals.iter().filter(|r| r.label.starts_with(prefix)).map(|r| r.value).reduce(f64::max)
    }

    /// Smallest raw value among residuals whose label starts with `prefix`.
    pub fn min_value(&self, prefix: &str) -> Option<f64> {
        self.residuals.iter().filter(|r| r.label.starts_with(prefix)).map(|r| r.value).reduce(f64::min)
    }
}

#[derive(Debug, Default)]
pub(crate) struct Recorder {
    residuals: Vec<Residual>,
    notes: Vec<String>,
}

fn pt(x: Option<Vec2>) -> Option<[f64; 2]> {
    x.map(|p| [p.x, p.y])
}

impl Recorder {
    pub fn at_most(&mut self, label: &str, x: Option<Vec2>, value: f64, bound: f64) {
        let normalized = if value.is_nan() { f64::INFINITY } else { value / bound };
        self.residuals.push(Residual {
            label: label.into(),
            point: pt(x),
            value,
            bound,
            relation: Relation::AtMost,
            normalized,
        });
    }

    pub fn at_least(&mut self, label: &str, x: Option<Vec2>, value: f64, bound: f64) {
        let normalized = if value > 0.0 { bound / value } else { f64::INFINITY };
        self.residuals.push(Residual {
            label: label.into(),
            point: pt(x),
            value,
            bound,
            relation: Relation::AtLeast,
            normalized,
        });
    }

    pub fn report(&mut self, label: &str, x: Option<Vec2>, value: f64) {
        self.residuals.push(Residual {
            label: label.into(),
            point: pt(x),
            value,
            bound: 0.0,
            relation: Relation::Report,
            normalized: 0.0,
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn finish(self, check_id: &str, scenario: &str) -> CheckReport {
        let max_residual = self.residuals.iter().map(|r| r.normalized).fold(0.0, f64::max);
        CheckReport {
            check_id: check_id.into(),
            scenario: scenario.into(),
            verdict: if max_residual <= 1.0 { Verdict::Pass } else { Verdict::Fail },
            residuals: self.residuals,
            max_residual,
            tolerance: 1.0,
            notes: self.notes,
        }
    }
}

const DEFAULTS: [(&str, f64); 22] = [
    ("rigid", 1e-8),
    ("scaling", 1e-7),
    ("witness_fraction", 0.5),
    ("stretch_finite", 1e-7),
    ("stretch_linear", 1e-8),
    ("flexure", 1e-7),
    ("variation", 1e-6),
    ("kernel", 1e-8),
    ("linearization", 1e-5),
    ("block", 1e-9),
    ("two_formula", 1e-8),
    ("acharya_relation", 1e-8),
    ("christoffel", 1e-7),
    ("virga_identity", 1e-8),
    ("symmetry", 1e-9),
    ("appendix_normal", 1e-9),
    ("appendix_root", 1e-8),
    ("energy_zero", 1e-12),
    ("frame_invariance", 1e-10),
    ("polarization", 1e-10),
    ("quadrature", 1e-9),
    ("quadratic_limit", 1e-4),
];

/// Named bounds used by the checks, with overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(DEFAULTS.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        *self.0.get(name).unwrap_or_else(|| panic!("tolerance '{name}' is not defined"))
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance {name}={value} must be positive")));
        }
        match self.0.get_mut(name) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(Error::InvalidInput(format!("unknown tolerance '{name}'"))),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_normalized_maximum() {
        let mut r = Recorder::default();
        r.at_most("a", None, 1e-9, 1e-8);
        r.at_least("w", Some(Vec2::new(0.1, 0.2)), 2.0, 1.0);
        r.report("info", None, 123.0);
        let rep = r.finish("c", "s");
        assert!(rep.passed() && (rep.max_residual - 0.5).abs() < 1e-15);
        let mut r = Recorder::default();
        r.at_least("w", None, 0.0, 1.0);
        assert!(!r.finish("c", "s").passed());
        let mut r = Recorder::default();
        r.at_most("nan", None, f64::NAN, 1.0);
        assert!(!r.finish("c", "s").passed());
    }

    #[test]
    fn overrides() {
        let mut t = Tolerances::default();
        t.set("rigid", 1e-6).unwrap();
        assert_eq!(t.get("rigid"), 1e-6);
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("rigid", -1.0).is_err());
        assert_eq!(t.names().count(), 22);
    }
}
