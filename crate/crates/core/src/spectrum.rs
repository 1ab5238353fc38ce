//! Labeled eigenvalue tables shared by the closed-form and numeric modules.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::Result;

/// Which part of a Hodge spectrum an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Exact,
    Coexact,
    Full,
    Rough,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Exact => "exact",
            Label::Coexact => "coexact",
            Label::Full => "full",
            Label::Rough => "rough",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Numeric,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: u64,
    pub degree: usize,
    pub label: Label,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
}

impl SpectrumEntry {
    pub fn closed_form(eigenvalue: f64, multiplicity: u64, degree: usize, label: Label) -> Self {
        SpectrumEntry {
            eigenvalue,
            multiplicity,
            degree,
            label,
            provenance: Provenance::ClosedForm,
            error_estimate: None,
        }
    }

    pub fn numeric(
        eigenvalue: f64,
        multiplicity: u64,
        degree: usize,
        label: Label,
        error_estimate: f64,
    ) -> Self {
        SpectrumEntry {
            eigenvalue,
            multiplicity,
            degree,
            label,
            provenance: Provenance::Numeric,
            error_estimate: Some(error_estimate),
        }
    }
}

/// How much of the true spectrum a table is known to contain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Completeness {
    /// Every eigenvalue is listed.
    Exhaustive,
    /// Every eigenvalue `<=` the bound is listed; larger ones may be missing.
    Through(f64),
}

impl Completeness {
    pub fn bound(&self) -> f64 {
        match self {
            Completeness::Exhaustive => f64::INFINITY,
            Completeness::Through(x) => *x,
        }
    }
}

/// Ascending list of eigenvalues with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub manifold_tag: String,
    pub completeness: Completeness,
    entries: Vec<SpectrumEntry>,
}

/// Relative tolerance under which two closed-form values are the same level.
const MERGE_RTOL: f64 = 1e-12;

fn same_level(x: f64, y: f64) -> bool {
    (x - y).abs() <= MERGE_RTOL * x.abs().max(y.abs()).max(1.0)
}

impl SpectrumTable {
    /// Builds a table, sorting entries ascending. Entries with zero multiplicity
    /// are dropped.
    pub fn new(
        manifold_tag: impl Into<String>,
        mut entries: Vec<SpectrumEntry>,
        completeness: Completeness,
    ) -> Self {
        entries.retain(|e| e.multiplicity > 0);
        entries.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
        SpectrumTable {
            manifold_tag: manifold_tag.into(),
            completeness,
            entries,
        }
    }

    pub fn empty(manifold_tag: impl Into<String>) -> Self {
        Self::new(manifold_tag, Vec::new(), Completeness::Exhaustive)
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<SpectrumEntry> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Merges closed-form entries with equal eigenvalue, degree and label into
    /// one entry with summed multiplicity. Numeric entries are left alone.
    pub fn merge_equal_levels(mut self) -> Self {
        let mut merged: Vec<SpectrumEntry> = Vec::with_capacity(self.entries.len());
        for e in self.entries.drain(..) {
            if e.provenance == Provenance::ClosedForm {
                if let Some(prev) = merged
                    .iter_mut()
                    .rev()
                    .take_while(|p| same_level(p.eigenvalue, e.eigenvalue))
                    .find(|p| {
                        p.provenance == Provenance::ClosedForm
                            && p.degree == e.degree
                            && p.label == e.label
                    })
                {
                    prev.multiplicity += e.multiplicity;
                    continue;
                }
            }
            merged.push(e);
        }
        self.entries = merged;
        self
    }

    /// Keeps the first `count` entries, tightening the completeness bound.
    pub fn truncate(mut self, count: usize) -> Self {
        if self.entries.len() > count {
            let last = self.entries[count - 1].eigenvalue;
            self.entries.truncate(count);
            self.completeness = Completeness::Through(last.min(self.completeness.bound()));
        }
        self
    }

    /// Multiplies every eigenvalue by `factor` (metric scaling `g -> g / factor`).
    pub fn scaled(mut self, factor: f64) -> Self {
        for e in &mut self.entries {
            e.eigenvalue *= factor;
            if let Some(err) = e.error_estimate.as_mut() {
                *err *= factor;
            }
        }
        self.completeness = match self.completeness {
            Completeness::Exhaustive => Completeness::Exhaustive,
            Completeness::Through(x) => Completeness::Through(x * factor),
        };
        self
    }

    pub fn relabeled(mut self, degree: usize, label: Label) -> Self {
        for e in &mut self.entries {
            e.degree = degree;
            e.label = label;
        }
        self
    }

    /// Eigenvalues repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.eigenvalue, e.multiplicity as usize))
            .collect()
    }

    /// Total multiplicity of entries whose eigenvalue is at most `tol`.
    pub fn zero_multiplicity(&self, tol: f64) -> u64 {
        self.entries
            .iter()
            .filter(|e| e.eigenvalue.abs() <= tol)
            .map(|e| e.multiplicity)
            .sum()
    }

    /// Smallest eigenvalue above `tol`.
    pub fn first_positive(&self, tol: f64) -> Option<f64> {
        self.entries.iter().map(|e| e.eigenvalue).find(|&x| x > tol)
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.entries.first().map(|e| e.eigenvalue)
    }

    /// Concatenates tables (same tag kept from `self`), re-sorting.
    pub fn union(self, other: SpectrumTable) -> Self {
        let completeness = match (self.completeness, other.completeness) {
            (Completeness::Exhaustive, Completeness::Exhaustive) => Completeness::Exhaustive,
            (a, b) => Completeness::Through(a.bound().min(b.bound())),
        };
        let mut entries = self.entries;
        entries.extend(other.entries);
        SpectrumTable::new(self.manifold_tag, entries, completeness)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let with_err = self.entries.iter().any(|e| e.error_estimate.is_some());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "eigenvalue",
            "multiplicity",
            "degree",
            "label",
            "provenance",
        ];
        if with_err {
            header.push("error_estimate");
        }
        w.write_record(&header)?;
        for e in &self.entries {
            let mut row = vec![
                e.eigenvalue.to_string(),
                e.multiplicity.to_string(),
                e.degree.to_string(),
                e.label.as_str().to_string(),
                e.provenance.as_str().to_string(),
            ];
            if with_err {
                row.push(e.error_estimate.map(|x| x.to_string()).unwrap_or_default());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(values: &[(f64, u64)]) -> SpectrumTable {
        SpectrumTable::new(
            "t",
            values
                .iter()
                .map(|&(v, m)| SpectrumEntry::closed_form(v, m, 0, Label::Full))
                .collect(),
            Completeness::Exhaustive,
        )
    }

    #[test]
    fn entries_are_sorted_and_merged() {
        let t = table(&[(2.0, 1), (0.0, 1), (2.0 + 1e-15, 2)]).merge_equal_levels();
        assert_eq!(t.len(), 2);
        assert_eq!(t.entries()[1].multiplicity, 3);
    }

    #[test]
    fn truncation_records_completeness() {
        let t = table(&[(0.0, 1), (1.0, 2), (4.0, 2)]).truncate(2);
        assert_eq!(t.completeness, Completeness::Through(1.0));
        assert_eq!(t.expanded(), vec![0.0, 1.0, 1.0]);
    }

    #[test]
    fn csv_has_documented_columns() {
        let mut buf = Vec::new();
        table(&[(1.0, 2)]).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "eigenvalue,multiplicity,degree,label,provenance"
        );
        assert_eq!(text.lines().nth(1).unwrap(), "1,2,0,full,closed-form");
    }

    #[test]
    fn json_round_trip() {
        let t = table(&[(0.0, 1), (3.5, 4)]).truncate(1);
        let back: SpectrumTable = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
