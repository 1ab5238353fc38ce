use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gluing::{cutoff_closed_form, trace_formula};
use super::upper::max_test_form_quotient;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuotientKind {
    /// `‖∇φ‖² / ‖φ‖²`
    Rough,
    /// `‖dφ‖² / ‖φ‖²`, valid for co-closed test forms.
    Hodge,
}

/// How a report's value is recomputed from its constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Formula {
    /// Largest test-form Rayleigh quotient; uses `k`, `L`.
    TestFormQuotient {
        quotient: QuotientKind,
    },
    /// `k²π² ((A L + B) / L^m)^{2/m}`.
    NormalizedUpper,
    /// `C (A L + B)^{2/m}`.
    NormalizedLower,
    /// `1 / (8 Σ)`, pieces and ordered overlaps named by constant keys.
    McGowan {
        pieces: Vec<String>,
        overlaps: Vec<(String, String, String)>,
        gradient_bound: String,
    },
    /// `π² / L²`.
    InverseSquareLength,
    MinOf {
        keys: Vec<String>,
    },
    /// Least-squares fit of `1/y[i]` against `x[i]²`; `slope` picks the
    /// coefficient of `x²`, otherwise the intercept.
    QuadraticFit {
        points: usize,
        slope: bool,
    },
    /// Least-squares slope of `ln y[i]` against `ln x[i]`.
    LogLogSlope {
        points: usize,
    },
    /// `(4 / log²ε) vol(S^{m-1}) ∫_ε^{√ε} r^{m-3} dr`.
    CutoffEnergy,
    /// `C r / (m-2) h²` or `C r |log r| h²`.
    TraceBound,
    /// `η · factor^{2/m}`.
    GlueBudget,
    /// `k π √(2/η)`.
    LengthThreshold,
}

fn get(constants: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    constants
        .get(key)
        .copied()
        .ok_or_else(|| Error::domain(format!("report constant `{key}` missing")))
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

pub(crate) fn series(constants: &BTreeMap<String, f64>, name: &str, n: usize) -> Result<Vec<f64>> {
    (0..n)
        .map(|i| get(constants, &format!("{name}[{i}]")))
        .collect()
}

/// Fit of `1/bound` against `C₁ L² + C₂`.
pub(crate) fn quadratic_fit(lengths: &[f64], bounds: &[f64]) -> (f64, f64) {
    let x: Vec<f64> = lengths.iter().map(|l| l * l).collect();
    let y: Vec<f64> = bounds.iter().map(|b| 1.0 / b).collect();
    least_squares(&x, &y)
}

pub(crate) fn loglog_slope(lengths: &[f64], bounds: &[f64]) -> f64 {
    let x: Vec<f64> = lengths.iter().map(|l| l.ln()).collect();
    let y: Vec<f64> = bounds.iter().map(|b| b.ln()).collect();
    least_squares(&x, &y).0
}

impl Formula {
    pub fn evaluate(&self, c: &BTreeMap<String, f64>) -> Result<f64> {
        Ok(match self {
            Formula::TestFormQuotient { quotient } => {
                max_test_form_quotient(get(c, "k")? as usize, get(c, "L")?, *quotient).0
            }
            Formula::NormalizedUpper => {
                let (k, l, m) = (get(c, "k")?, get(c, "L")?, get(c, "m")?);
                let vol = get(c, "A")? * l + get(c, "B")?;
                k * k * PI * PI * (vol / l.powf(m)).powf(2.0 / m)
            }
            Formula::NormalizedLower => {
                let vol = get(c, "A")? * get(c, "L")? + get(c, "B")?;
                get(c, "C")? * vol.powf(2.0 / get(c, "m")?)
            }
            Formula::McGowan {
                pieces,
                overlaps,
                gradient_bound,
            } => {
                let cg = get(c, gradient_bound)?;
                let mut total = 0.0;
                for key in pieces {
                    total += 1.0 / get(c, key)?;
                }
                for (overlap, first, second) in overlaps {
                    let inv = 1.0 / get(c, first)? + 1.0 / get(c, second)?;
                    total += (cg / get(c, overlap)? + 1.0) * inv;
                }
                1.0 / (8.0 * total)
            }
            Formula::InverseSquareLength => PI * PI / get(c, "L")?.powi(2),
            Formula::MinOf { keys } => {
                let mut v = f64::INFINITY;
                for k in keys {
                    v = v.min(get(c, k)?);
                }
                v
            }
            Formula::QuadraticFit { points, slope } => {
                let (c1, c2) =
                    quadratic_fit(&series(c, "L", *points)?, &series(c, "bound", *points)?);
                if *slope {
                    c1
                } else {
                    c2
                }
            }
            Formula::LogLogSlope { points } => {
                loglog_slope(&series(c, "L", *points)?, &series(c, "bound", *points)?)
            }
            Formula::CutoffEnergy => cutoff_closed_form(get(c, "m")? as usize, get(c, "eps")?),
            Formula::TraceBound => trace_formula(
                get(c, "m")? as usize,
                get(c, "r")?,
                get(c, "h1_norm")?,
                get(c, "C")?,
            ),
            Formula::GlueBudget => get(c, "eta")? * get(c, "factor")?.powf(2.0 / get(c, "m")?),
            Formula::LengthThreshold => get(c, "k")? * PI * (2.0 / get(c, "eta")?).sqrt(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrailStep {
    pub anchor: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub quantity: String,
    pub value: f64,
    pub formula: Formula,
    pub constants: BTreeMap<String, f64>,
    pub trail: Vec<TrailStep>,
    /// Inputs that are documented stand-ins rather than exact values.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub surrogate_inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
}

impl BoundReport {
    pub(crate) fn new(quantity: impl Into<String>, formula: Formula) -> Self {
        BoundReport {
            quantity: quantity.into(),
            value: f64::NAN,
            formula,
            constants: BTreeMap::new(),
            trail: Vec::new(),
            surrogate_inputs: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub(crate) fn constant(mut self, key: impl Into<String>, value: f64) -> Self {
        self.constants.insert(key.into(), value);
        self
    }

    pub(crate) fn step(mut self, anchor: impl Into<String>, value: f64) -> Self {
        self.trail.push(TrailStep {
            anchor: anchor.into(),
            value,
        });
        self
    }

    pub(crate) fn check(
        mut self,
        name: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) -> Self {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
        self
    }

    /// Evaluates the formula and stores the value as the final trail step.
    pub(crate) fn finish(mut self) -> Result<Self> {
        self.value = self.formula.evaluate(&self.constants)?;
        let anchor = format!("{} (result)", self.quantity);
        let value = self.value;
        Ok(self.step(anchor, value))
    }

    /// Recomputes the value from the recorded constants.
    pub fn reevaluate(&self) -> Result<f64> {
        self.formula.evaluate(&self.constants)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn is_surrogate(&self) -> bool {
        !self.surrogate_inputs.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.constants.get(key).copied()
    }
}
