//! Text renderings of solver output.

use std::fmt::Write as _;

use anyhow::Result;
use fusion_core::{RocPoint, SelectedRule, SolveReport};

/// `x` rounded to six significant digits, printed in shortest form.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    rounded.to_string()
}

fn index_list(items: &[usize]) -> String {
    if items.is_empty() {
        return "(none)".to_string();
    }
    items
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn render_solve(report: &SolveReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "method: {}", report.method);
    let _ = writeln!(out, "objective: {}", sig6(report.objective));
    let _ = writeln!(out, "pd: {}", sig6(report.pd));
    let _ = writeln!(out, "pf: {}", sig6(report.pf));
    let _ = writeln!(out, "flops: {}", report.flops);
    let _ = writeln!(out, "feasible_scaled: {}", report.feasible_scaled);
    let _ = writeln!(out, "feasible_true: {}", report.feasible_true);
    match &report.rule {
        SelectedRule::General(x) => {
            let _ = writeln!(out, "rule_hex: {}", x.to_hex());
            let _ = writeln!(out, "rule_indices: {}", index_list(&x.selected_indices()));
        }
        SelectedRule::Count(y) => {
            let _ = writeln!(out, "rule_counts: {}", index_list(&y.selected_counts()));
        }
    }
    out
}

/// Sweep points as CSV with full double precision.
pub fn render_roc_csv(points: &[RocPoint]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["alpha", "pf_star", "pm_star", "flops"])?;
    for p in points {
        writer.write_record([
            p.alpha.to_string(),
            p.pf_star.to_string(),
            p.pm_star.to_string(),
            p.flops.to_string(),
        ])?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}
