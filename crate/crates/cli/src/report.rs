//! Report documents and CSV tables.

use std::fmt::Write as _;

use edr_core::bounds::BoundPair;
use edr_core::relations::{Evaluation, RelationId, RelationInputs};
use edr_core::spinlab::SweepResult;
use edr_core::MomentSet;
use serde::{Deserialize, Serialize};

pub const REPORT_FORMAT: &str = "edr-report/1";
pub const REPORT_CSV_STAMP: &str = "# edr-report v1";
pub const REPORT_CSV_HEADER: &str = "id,lhs,rhs,residual,satisfied,eps,eta,sigma_A,sigma_B,C,D";
pub const SWEEP_CSV_STAMP: &str = "# edr-sweep v1";
pub const SWEEP_BASE_COLUMNS: &str = "theta,eps_sq,eta_sq,circle_residual";

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Machine-readable report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub format: String,
    pub moments: MomentSet<f64>,
    pub bounds: BoundPair<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<Evaluation<f64>>,
    /// Universally valid relations that failed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<RelationId>,
}

impl ReportDocument {
    pub fn new(inputs: &RelationInputs<f64>, relations: Vec<Evaluation<f64>>) -> Self {
        let violations = violations(&relations);
        Self { format: REPORT_FORMAT.to_string(), moments: inputs.moments, bounds: inputs.bounds, relations, violations }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Evaluated, failed and not a comparator.
pub fn violations(evals: &[Evaluation<f64>]) -> Vec<RelationId> {
    evals
        .iter()
        .filter_map(|e| e.report())
        .filter(|r| !r.satisfied && !r.id.is_comparator())
        .map(|r| r.id)
        .collect()
}

pub fn report_csv(inputs: &RelationInputs<f64>, evals: &[Evaluation<f64>]) -> String {
    let m = &inputs.moments;
    let b = &inputs.bounds;
    let tail = [m.eps_a, m.eps_b, m.sigma_a, m.sigma_b, b.c_ab, b.d_ab].map(num).join(",");
    let mut out = format!("{REPORT_CSV_STAMP}\n{REPORT_CSV_HEADER}\n");
    for e in evals {
        match e {
            Evaluation::Evaluated(r) => {
                let _ = writeln!(out, "{},{},{},{},{},{tail}", r.id, num(r.lhs), num(r.rhs), num(r.residual), r.satisfied);
            }
            Evaluation::Skipped { id, .. } => {
                let _ = writeln!(out, "{id},,,,skipped,{tail}");
            }
        }
    }
    out
}

pub fn sweep_csv(result: &SweepResult, ids: &[RelationId]) -> String {
    let mut out = format!("{SWEEP_CSV_STAMP}\n{SWEEP_BASE_COLUMNS}");
    for id in ids {
        let _ = write!(out, ",{id}");
    }
    out.push('\n');
    for p in &result.points {
        let _ = write!(out, "{},{},{},{}", num(p.theta), num(p.eps_sq), num(p.eta_sq), num(p.circle_residual));
        for e in &p.evaluations {
            match e.report() {
                Some(r) => {
                    let _ = write!(out, ",{}", num(r.residual));
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// Aligned plain-text table for the terminal.
pub fn relation_table(evals: &[Evaluation<f64>]) -> String {
    let mut out = format!("{:<24} {:>24} {:>24} {:>24}  status\n", "relation", "lhs", "rhs", "residual");
    for e in evals {
        match e {
            Evaluation::Evaluated(r) => {
                let status = match (r.satisfied, r.id.is_comparator()) {
                    (true, _) => "ok",
                    (false, true) => "violated (comparator)",
                    (false, false) => "VIOLATED",
                };
                let _ = writeln!(
                    out,
                    "{:<24} {:>24} {:>24} {:>24}  {status}",
                    r.id.name(),
                    num(r.lhs),
                    num(r.rhs),
                    num(r.residual)
                );
            }
            Evaluation::Skipped { id, reason } => {
                let _ = writeln!(out, "{:<24} {:>24} {:>24} {:>24}  skipped: {reason}", id.name(), "-", "-", "-");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, -2.5e-300, 0.0] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17);
        }
    }
}
