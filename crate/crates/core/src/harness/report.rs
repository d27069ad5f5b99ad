use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{BaselineReport, ExperimentError, ExperimentReport, GammaStudyReport, LinkReport};

fn io_err(path: &Path, e: impl ToString) -> ExperimentError {
    ExperimentError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExperimentError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn prepare(dir: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn opt(v: Option<usize>) -> String {
    v.map(|e| e.to_string()).unwrap_or_default()
}

fn write_links(path: &Path, links: &[LinkReport]) -> Result<(), ExperimentError> {
    write_csv(
        path,
        &["src", "dst", "max_bandwidth_bps", "used_bandwidth_bps", "utilization"],
        links.iter().map(|l| {
            vec![
                l.src.to_string(),
                l.dst.to_string(),
                l.max_bandwidth_bps.to_string(),
                l.used_bandwidth_bps.to_string(),
                l.utilization.to_string(),
            ]
        }),
    )
}

/// Writes `report.json`, `links.csv`, `temp_path_lengths.csv` and
/// `convergence.csv` into `dir`, creating it if needed.
pub fn emit_reports(report: &ExperimentReport, dir: &Path) -> Result<(), ExperimentError> {
    prepare(dir)?;
    write_json(&dir.join("report.json"), report)?;
    write_links(&dir.join("links.csv"), &report.links)?;
    write_csv(
        &dir.join("temp_path_lengths.csv"),
        &["demand", "src", "dst", "episode", "length"],
        report.demands.iter().flat_map(|d| {
            d.temp_path_lengths.iter().enumerate().map(move |(i, len)| {
                vec![
                    d.index.to_string(),
                    d.demand.src.to_string(),
                    d.demand.dst.to_string(),
                    (i + 1).to_string(),
                    len.to_string(),
                ]
            })
        }),
    )?;
    write_csv(
        &dir.join("convergence.csv"),
        &["demand", "src", "dst", "convergence_episode"],
        report.demands.iter().map(|d| {
            vec![
                d.index.to_string(),
                d.demand.src.to_string(),
                d.demand.dst.to_string(),
                opt(d.convergence_episode),
            ]
        }),
    )
}

/// Writes `gamma_study.json` and a `convergence.csv` with one column per run
/// and a closing `total` row.
pub fn emit_gamma_study(study: &GammaStudyReport, dir: &Path) -> Result<(), ExperimentError> {
    prepare(dir)?;
    write_json(&dir.join("gamma_study.json"), study)?;
    let mut header = vec!["demand", "src", "dst"];
    header.extend(study.columns.iter().map(|c| c.label.as_str()));
    let mut rows: Vec<Vec<String>> = study
        .demands
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut row = vec![i.to_string(), d.src.to_string(), d.dst.to_string()];
            row.extend(study.columns.iter().map(|c| opt(c.convergence_episodes[i])));
            row
        })
        .collect();
    let mut total = vec!["total".to_string(), String::new(), String::new()];
    total.extend(study.columns.iter().map(|c| c.total_convergence_episodes.to_string()));
    rows.push(total);
    write_csv(&dir.join("convergence.csv"), &header, rows)
}

/// Writes `baseline.json` and `baseline_links.csv`.
pub fn emit_baseline(report: &BaselineReport, dir: &Path) -> Result<(), ExperimentError> {
    prepare(dir)?;
    write_json(&dir.join("baseline.json"), report)?;
    write_links(&dir.join("baseline_links.csv"), &report.links)
}
