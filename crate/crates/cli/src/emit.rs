//! Report assembly and emission: summary text, CSV samples, JSON document.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use twistcal_core::immersion::ClassifyResiduals;
use twistcal_core::report::VerdictReport;

/// The full structured report of a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct FullReport {
    pub tool_version: String,
    pub run: String,
    pub geometry: String,
    pub config: serde_json::Value,
    pub verdict: VerdictReport,
    pub route_agreement_max_angle: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classifier: Option<ClassifyResiduals>,
    /// Section-side diagnostics (holomorphicity, parallelism, harmonicity).
    pub section_diagnostics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl FullReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "run: {} ({})", self.run, self.geometry);
        let _ = writeln!(s, "tool: twistcal {}", self.tool_version);
        let v = &self.verdict;
        let _ = writeln!(
            s,
            "verdict: {}  (max {:.3e}, mean {:.3e}, tol {:.1e}, {} samples, {} errors)",
            if v.pass { "PASS" } else { "FAIL" },
            v.max,
            v.mean,
            v.tol,
            v.samples.len(),
            v.error_count
        );
        if let Some(worst) = v.worst_sample() {
            let _ = writeln!(
                s,
                "worst sample: u = {:?}, t = {:?}, residual {:.3e}",
                worst.u, worst.t, worst.total
            );
            for (name, val) in v.component_names.iter().zip(&worst.components) {
                let _ = writeln!(s, "  {name}: {val:.3e}");
            }
        }
        let _ = writeln!(
            s,
            "route agreement: max principal angle {:.3e}",
            self.route_agreement_max_angle
        );
        if let Some(c) = &self.classifier {
            let _ = write!(s, "classifier: minimal {:.3e}, austere {:.3e}", c.minimal, c.austere);
            if let (Some(n), Some(p)) = (c.superminimal_neg, c.superminimal_pos) {
                let _ = write!(s, ", superminimal -/+ {n:.3e}/{p:.3e}");
            }
            let _ = writeln!(s);
        }
        for (k, val) in &self.section_diagnostics {
            let _ = writeln!(s, "{k}: {val:.3e}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }

    /// CSV with one row per sample: base coordinates, fibre coordinates,
    /// per-condition residuals, total, error.
    pub fn csv(&self) -> String {
        let v = &self.verdict;
        let p = v.samples.first().map_or(0, |s| s.u.len());
        let dt = v.samples.first().map_or(0, |s| s.t.len());
        let mut header: Vec<String> = (1..=p).map(|i| format!("u{i}")).collect();
        header.extend((1..=dt).map(|i| format!("t{i}")));
        header.extend(v.component_names.iter().cloned());
        header.push("total".into());
        header.push("error".into());
        let mut out = header.join(",");
        out.push('\n');
        for s in &v.samples {
            let mut row: Vec<String> = s.u.iter().map(|x| format!("{x}")).collect();
            row.extend(s.t.iter().map(|x| format!("{x}")));
            if s.components.is_empty() {
                row.extend(std::iter::repeat_n("nan".to_string(), v.component_names.len()));
            } else {
                row.extend(s.components.iter().map(|x| format!("{x}")));
            }
            row.push(format!("{}", s.total));
            row.push(s.error.clone().unwrap_or_default());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> anyhow::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
