//! Run reports and their serialized forms.
//!
//! JSON mirrors the struct fields exactly and round-trips bit-for-bit. CSV
//! follows the fixed column contract
//! `user,d_sd,d_sp,alpha,p_closed,p_quad,p_mc,ci95` with numbers printed as
//! fixed-point decimals at ten significant digits, so reports diff cleanly
//! run to run.

use std::io::Write;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// One user's row of a run report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRow {
    pub user: usize,
    pub d_sd: f64,
    pub d_sp: f64,
    pub alpha: f64,
    pub analytic_closed: Option<f64>,
    pub analytic_quadrature: Option<f64>,
    pub mc_freq: Option<f64>,
    pub ci95: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub seed: u64,
    pub trials: u64,
    pub beta: f64,
    /// Raw sum minus one for each analytic column that was computed.
    pub sum_defect_closed: Option<f64>,
    pub sum_defect_quadrature: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub label: String,
    pub rows: Vec<UserRow>,
    pub meta: ReportMeta,
}

/// Formats `x` as a fixed-point decimal with `sig` significant digits.
pub fn fmt_sig(x: f64, sig: u32) -> String {
    if x == 0.0 {
        return format!("{:.*}", sig as usize - 1, 0.0);
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn csv_cell(value: Option<f64>) -> String {
    value.map(|v| fmt_sig(v, 10)).unwrap_or_default()
}

/// Writes the fixed-column CSV form: one header line plus one line per user.
pub fn write_csv<W: Write>(report: &RunReport, w: &mut W) -> Result<()> {
    writeln!(w, "user,d_sd,d_sp,alpha,p_closed,p_quad,p_mc,ci95")?;
    for row in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            row.user,
            fmt_sig(row.d_sd, 10),
            fmt_sig(row.d_sp, 10),
            fmt_sig(row.alpha, 10),
            csv_cell(row.analytic_closed),
            csv_cell(row.analytic_quadrature),
            csv_cell(row.mc_freq),
            csv_cell(row.ci95),
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write>(report: &RunReport, w: &mut W) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, report).context("serializing report")?;
    writeln!(w)?;
    Ok(())
}

/// Writes grouped-bar data for a set of reports: one `(label, user, series)`
/// row per analytic and per empirical value, ready for any plotting tool.
pub fn emit_plot_data<W: Write>(reports: &[RunReport], w: &mut W) -> Result<()> {
    if reports.is_empty() {
        bail!("no reports to export");
    }
    writeln!(w, "scenario,user,series,value")?;
    for report in reports {
        for row in &report.rows {
            let analytic = row
                .analytic_closed
                .or(row.analytic_quadrature)
                .with_context(|| {
                    format!("report {}: no analytic column for user {}", report.label, row.user)
                })?;
            let mc = row.mc_freq.with_context(|| {
                format!("report {}: no Monte Carlo column for user {}", report.label, row.user)
            })?;
            writeln!(w, "{},{},analytic,{}", report.label, row.user, fmt_sig(analytic, 10))?;
            writeln!(w, "{},{},mc,{}", report.label, row.user, fmt_sig(mc, 10))?;
        }
    }
    Ok(())
}
