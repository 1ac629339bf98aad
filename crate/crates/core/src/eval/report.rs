use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::NmseReport;
use crate::error::{Error, Result};
use crate::io::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    /// `nmse_table.txt`, `nmse_table.csv`, `nmse_cells.csv`, `report.json`
    Table,
    /// One `plot_<method>[_<channel>].csv` per method and channel.
    PlotData,
}

const FAILED: &str = "FAILED";

fn proportions(report: &NmseReport) -> &[f64] {
    &report.plan.proportions
}

fn methods(report: &NmseReport) -> Vec<String> {
    report.plan.methods.iter().map(|m| m.to_ascii_uppercase()).collect()
}

fn mean_cell(report: &NmseReport, method: &str, rho: f64, precise: bool) -> String {
    match report.cell(method, rho).and_then(|c| c.mean()) {
        Some(v) if precise => format!("{v}"),
        Some(v) => format!("{v:.6}"),
        None => FAILED.to_string(),
    }
}

fn percent(rho: f64) -> String {
    format!("rho={}%", rho * 100.0)
}

/// Methods down the side, proportions across the top.
pub fn table_text(report: &NmseReport) -> String {
    let methods = methods(report);
    let mut header = vec!["method".to_string()];
    header.extend(proportions(report).iter().map(|&r| percent(r)));
    let mut rows = vec![header];
    for m in &methods {
        let mut row = vec![m.clone()];
        row.extend(proportions(report).iter().map(|&r| mean_cell(report, m, r, false)));
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (cell, &w))| if i == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn table_csv(report: &NmseReport) -> String {
    let mut out = String::from("method");
    for &r in proportions(report) {
        let _ = write!(out, ",{r}");
    }
    out.push('\n');
    for m in methods(report) {
        out.push_str(&m);
        for &r in proportions(report) {
            let _ = write!(out, ",{}", mean_cell(report, &m, r, true));
        }
        out.push('\n');
    }
    out
}

/// One line per run: `method,rho,seed,nmse,seconds`. Failed runs carry
/// `FAILED`; `seconds` is empty unless timing was recorded.
pub fn cells_csv(report: &NmseReport) -> String {
    let mut out = String::from("method,rho,seed,nmse,seconds\n");
    for cell in &report.cells {
        for run in &cell.runs {
            let nmse = run.nmse.map_or(FAILED.to_string(), |v| format!("{v}"));
            let secs = run.seconds.map_or(String::new(), |s| format!("{s:.3}"));
            let _ = writeln!(out, "{},{},{},{},{}", cell.method, cell.rho, run.seed, nmse, secs);
        }
    }
    out
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes the report files into `dir` (created if missing) and returns
/// their paths.
pub fn emit_report(report: &NmseReport, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    match format {
        ReportFormat::Table => {
            files.push((dir.join("nmse_table.txt"), table_text(report).into_bytes()));
            files.push((dir.join("nmse_table.csv"), table_csv(report).into_bytes()));
            files.push((dir.join("nmse_cells.csv"), cells_csv(report).into_bytes()));
            let mut json = serde_json::to_vec_pretty(report)
                .map_err(|e| Error::InvalidState(format!("report serialization failed: {e}")))?;
            json.push(b'\n');
            files.push((dir.join("report.json"), json));
        }
        ReportFormat::PlotData => {
            let multi = report
                .plots
                .iter()
                .map(|p| &p.channel)
                .collect::<std::collections::BTreeSet<_>>()
                .len()
                > 1;
            for p in &report.plots {
                let name = if multi {
                    format!("plot_{}_{}.csv", sanitize(&p.method), sanitize(&p.channel))
                } else {
                    format!("plot_{}.csv", sanitize(&p.method))
                };
                let mut text = String::from("t,clean,corrupted,reconstructed\n");
                for i in 0..p.t.len() {
                    let _ = writeln!(
                        text,
                        "{},{},{},{}",
                        p.t[i], p.clean[i], p.corrupted[i], p.reconstructed[i]
                    );
                }
                files.push((dir.join(name), text.into_bytes()));
            }
        }
    }
    for (path, bytes) in &files {
        write_atomic(path, bytes)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
