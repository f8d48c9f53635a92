//! Report types shared by every validator and auditor: named entries with
//! residuals, tolerances, pass/fail status, and a provenance tag saying where
//! the expected value comes from.

use serde::{Deserialize, Serialize};

/// Where an expected value or audited identity comes from.
///
/// * `Theory`  — a claim of the theory under audit (definitions, identity
///   displays, theorem conclusions). Reported faithfully; disagreement with
///   the computed numbers is a finding, not a tool failure.
/// * `Known`   — an elementary or textbook fact (flat space has zero
///   curvature, closed forms have zero exterior derivative, ...).
/// * `Oracle`  — a value derived from an independent numeric oracle
///   (finite differences, product-block curvature, constant-curvature
///   closed forms, direct evaluation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Theory,
    Known,
    Oracle,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Theory => "[theory]",
            Provenance::Known => "[known]",
            Provenance::Oracle => "[oracle]",
        }
    }
}

/// One audited quantity: an identity residual, a flatness norm, an expected
/// eigenvalue, ... `pass` is `None` for informational findings that are
/// reported without being asserted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditEntry {
    /// Short machine-friendly identifier, unique within a report.
    pub name: String,
    /// Human-readable statement of the identity or quantity, in ASCII math.
    pub detail: String,
    /// The computed number (usually a max residual over samples).
    pub value: f64,
    /// Tolerance the value is compared against, when asserted.
    pub tol: Option<f64>,
    /// Some(true/false) when asserted against `tol`; None for findings.
    pub pass: Option<bool>,
    pub provenance: Provenance,
}

impl AuditEntry {
    /// Asserted entry: pass ⇔ |value| < tol.
    pub fn checked(
        name: &str,
        detail: &str,
        value: f64,
        tol: f64,
        provenance: Provenance,
    ) -> Self {
        AuditEntry {
            name: name.to_string(),
            detail: detail.to_string(),
            value,
            tol: Some(tol),
            pass: Some(value.abs() < tol),
            provenance,
        }
    }

    /// Asserted entry whose pass condition is not `|value| < tol` (lower
    /// bounds, dimension counts, ...): the caller supplies the verdict.
    pub fn asserted(
        name: &str,
        detail: &str,
        value: f64,
        tol: Option<f64>,
        pass: bool,
        provenance: Provenance,
    ) -> Self {
        AuditEntry {
            name: name.to_string(),
            detail: detail.to_string(),
            value,
            tol,
            pass: Some(pass),
            provenance,
        }
    }

    /// Informational entry: reported, never asserted.
    pub fn finding(name: &str, detail: &str, value: f64, provenance: Provenance) -> Self {
        AuditEntry {
            name: name.to_string(),
            detail: detail.to_string(),
            value,
            tol: None,
            pass: None,
            provenance,
        }
    }
}

/// A full validator/auditor run: metadata plus an ordered list of entries.
/// Serialization order is fixed by field declaration order, so a report with
/// identical inputs serializes byte-identically.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditReport {
    pub title: String,
    pub manifold: String,
    pub seed: u64,
    pub samples: usize,
    /// Canonical command line that reproduces this report. Uses the manifold
    /// name rather than a file path so exported-file runs match builtin runs.
    pub command: String,
    pub entries: Vec<AuditEntry>,
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn new(title: &str, manifold: &str, seed: u64, samples: usize) -> Self {
        AuditReport {
            title: title.to_string(),
            manifold: manifold.to_string(),
            seed,
            samples,
            command: String::new(),
            entries: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, entry: AuditEntry) {
        self.entries.push(entry);
    }

    pub fn note(&mut self, text: &str) {
        self.notes.push(text.to_string());
    }

    /// True when no asserted entry failed (informational entries don't count).
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass != Some(false))
    }

    /// Number of asserted entries and how many of them passed.
    pub fn tally(&self) -> (usize, usize) {
        let asserted = self.entries.iter().filter(|e| e.pass.is_some()).count();
        let passed = self
            .entries
            .iter()
            .filter(|e| e.pass == Some(true))
            .count();
        (passed, asserted)
    }

    /// Merge another report's entries and notes into this one.
    pub fn absorb(&mut self, other: AuditReport) {
        self.entries.extend(other.entries);
        self.notes.extend(other.notes);
    }

    pub fn entry(&self, name: &str) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Result of a tensor-flatness scan in an orthonormal frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub tensor_name: String,
    /// Max |component| over all samples, orthonormal-frame components.
    pub max_component: f64,
    pub samples: usize,
    pub tol: f64,
    pub is_flat: bool,
}

/// Result of fitting Ric = λ·g over sampled points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EinsteinReport {
    /// Least-squares λ (equals mean scal/n in an orthonormal frame).
    pub lambda: f64,
    /// Max |Ric − λg| orthonormal-frame component over samples.
    pub max_residual: f64,
    /// Mean scalar curvature over samples.
    pub scal: f64,
    pub is_einstein: bool,
}

/// Format a number with 12 significant digits, the fixed report precision.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        // Avoid "-0" noise so reports stay byte-stable.
        return "0.00000000000e0".to_string();
    }
    format!("{:.11e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_entry_compares_against_tolerance() {
        let good = AuditEntry::checked("a", "x", 1e-12, 1e-9, Provenance::Known);
        let bad = AuditEntry::checked("b", "y", 1e-3, 1e-9, Provenance::Known);
        assert_eq!(good.pass, Some(true));
        assert_eq!(bad.pass, Some(false));
    }

    #[test]
    fn findings_do_not_affect_passed() {
        let mut r = AuditReport::new("t", "m", 42, 10);
        r.push(AuditEntry::checked("a", "x", 0.0, 1e-9, Provenance::Known));
        r.push(AuditEntry::finding("b", "y", 123.0, Provenance::Theory));
        assert!(r.passed());
        assert_eq!(r.tally(), (1, 1));
    }

    #[test]
    fn fmt12_is_stable_for_zero_and_sign() {
        assert_eq!(fmt12(0.0), "0.00000000000e0");
        assert_eq!(fmt12(-0.0), "0.00000000000e0");
        assert_eq!(fmt12(1.5), "1.50000000000e0");
        assert_eq!(fmt12(-0.25), "-2.50000000000e-1");
    }
}
