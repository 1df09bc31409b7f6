//! Machine-readable verification reports.
//!
//! JSON is the single machine format; the human rendering is derived from
//! it. All orderings are canonical so output is stable across runs; the
//! timing field is the one non-deterministic value and is kept isolated so
//! golden comparisons can drop it.

use serde::Serialize;

use crate::conditions::{ConditionReport, Family};
use crate::dsl::expr_text;
use crate::operator::FieldSpace;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize, Clone, Debug)]
pub struct FamilySummary {
    pub family: &'static str,
    pub checked: usize,
    pub failed: usize,
}

#[derive(Serialize, Clone, Debug)]
pub struct FailureRecord {
    pub condition: String,
    pub residual: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub version: &'static str,
    pub input: String,
    pub hamiltonian: bool,
    pub ultralocal_ok: bool,
    pub leading_ok: bool,
    pub compatibility_ok: bool,
    pub families: Vec<FamilySummary>,
    pub failures: Vec<FailureRecord>,
    /// Process exit status this verdict maps to (0 pass, 1 fail).
    pub exit_status: u8,
    /// Wall-clock milliseconds; excluded from golden comparisons.
    pub timing_ms: u128,
}

impl Report {
    pub fn from_conditions(
        report: &ConditionReport,
        space: &FieldSpace,
        timing_ms: u128,
    ) -> Report {
        let mut families = Vec::new();
        for fam in Family::ALL {
            let checked = report.checked.get(&fam).copied().unwrap_or(0);
            if checked == 0 {
                continue;
            }
            let failed = report
                .residuals
                .iter()
                .filter(|r| r.id.family == fam)
                .count();
            families.push(FamilySummary {
                family: fam.name(),
                checked,
                failed,
            });
        }
        let failures = report
            .residuals
            .iter()
            .map(|r| FailureRecord {
                condition: r.id.to_string(),
                residual: expr_text(&r.expr, space),
            })
            .collect();
        Report {
            version: TOOL_VERSION,
            input: report.target.clone(),
            hamiltonian: report.hamiltonian,
            ultralocal_ok: report.ultralocal_ok,
            leading_ok: report.leading_ok,
            compatibility_ok: report.compatibility_ok,
            families,
            failures,
            exit_status: if report.hamiltonian { 0 } else { 1 },
            timing_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human rendering, derived from the same data as the JSON.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{}: {}\n",
            self.input,
            if self.hamiltonian {
                "HAMILTONIAN"
            } else {
                "not Hamiltonian"
            }
        ));
        for f in &self.families {
            out.push_str(&format!(
                "  {:>3}: {:>4} checked, {} failed\n",
                f.family, f.checked, f.failed
            ));
        }
        for rec in self.failures.iter().take(16) {
            out.push_str(&format!("  fail {} : {}\n", rec.condition, rec.residual));
        }
        if self.failures.len() > 16 {
            out.push_str(&format!("  ... {} more\n", self.failures.len() - 16));
        }
        out
    }
}
