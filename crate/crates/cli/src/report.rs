//! Results and statistics CSV files.
//!
//! Floats are written with at least four decimal places using the
//! shortest representation that parses back to the exact same value, so
//! re-reading a results file reproduces the records bit for bit.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::experiment::{ExperimentRecord, StatsReport};

pub const RESULTS_HEADER: [&str; 10] = [
    "run_id",
    "algorithm",
    "instance",
    "seed",
    "CW",
    "WL",
    "WP",
    "IUC_bal",
    "IUC_seq",
    "wall_time_ms",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("no records to write")]
    NoRecords,
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_error(path: &Path) -> impl FnOnce(csv::Error) -> ReportError + '_ {
    move |source| ReportError::Malformed {
        path: path.to_path_buf(),
        message: source.to_string(),
    }
}

/// Shortest decimal form with at least 4 fractional digits that
/// round-trips to exactly `value`.
pub fn format_float(value: f64) -> String {
    for precision in 4..=17 {
        let formatted = format!("{value:.precision$}");
        if formatted.parse::<f64>() == Ok(value) {
            return formatted;
        }
    }
    format!("{value:.17}")
}

pub fn write_results_csv(records: &[ExperimentRecord], path: &Path) -> Result<(), ReportError> {
    if records.is_empty() {
        return Err(ReportError::NoRecords);
    }
    let mut writer = csv::Writer::from_path(path).map_err(csv_error(path))?;
    writer.write_record(RESULTS_HEADER).map_err(csv_error(path))?;
    for record in records {
        writer
            .write_record([
                record.run_id.to_string(),
                record.algorithm.clone(),
                record.instance.clone(),
                record.seed.to_string(),
                format_float(record.completed_work),
                format_float(record.workload),
                record.num_workplaces.to_string(),
                record.iuc_balancing.to_string(),
                record.iuc_sequencing.to_string(),
                record.wall_time_ms.to_string(),
            ])
            .map_err(csv_error(path))?;
    }
    writer.flush().map_err(io_error(path))?;
    Ok(())
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ExperimentRecord>, ReportError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_error(path))?;
    let malformed = |message: String| ReportError::Malformed {
        path: path.to_path_buf(),
        message,
    };
    let header = reader.headers().map_err(csv_error(path))?.clone();
    if header.iter().ne(RESULTS_HEADER) {
        return Err(malformed(format!("unexpected header {header:?}")));
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_error(path))?;
        let field = |i: usize| row.get(i).unwrap_or_default();
        let parse_err =
            |i: usize| malformed(format!("bad field '{}' in column {}", field(i), RESULTS_HEADER[i]));
        records.push(ExperimentRecord {
            run_id: field(0).parse().map_err(|_| parse_err(0))?,
            algorithm: field(1).to_string(),
            instance: field(2).to_string(),
            seed: field(3).parse().map_err(|_| parse_err(3))?,
            completed_work: field(4).parse().map_err(|_| parse_err(4))?,
            workload: field(5).parse().map_err(|_| parse_err(5))?,
            num_workplaces: field(6).parse().map_err(|_| parse_err(6))?,
            iuc_balancing: field(7).parse().map_err(|_| parse_err(7))?,
            iuc_sequencing: field(8).parse().map_err(|_| parse_err(8))?,
            wall_time_ms: field(9).parse().map_err(|_| parse_err(9))?,
        });
    }
    Ok(records)
}

/// Long-format stats table: one row per (metric, algorithm) carrying the
/// group mean, the pooled interval, and that metric's ANOVA line.
pub fn write_stats_csv(report: &StatsReport, path: &Path) -> Result<(), ReportError> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_error(path))?;
    writer
        .write_record([
            "metric",
            "algorithm",
            "n_means",
            "group_size",
            "mean",
            "ci_half_width",
            "ci_low",
            "ci_high",
            "f_statistic",
            "df_between",
            "df_within",
        ])
        .map_err(csv_error(path))?;
    for metric in &report.metrics {
        for summary in &metric.per_algorithm {
            let ci = summary.interval;
            writer
                .write_record([
                    metric.metric.to_string(),
                    summary.algorithm.clone(),
                    summary.sample_count.to_string(),
                    report.group_size.to_string(),
                    format_float(ci.mean),
                    format_float(ci.half_width),
                    format_float(ci.mean - ci.half_width),
                    format_float(ci.mean + ci.half_width),
                    format_float(metric.anova.f_statistic),
                    metric.anova.df_between.to_string(),
                    metric.anova.df_within.to_string(),
                ])
                .map_err(csv_error(path))?;
        }
    }
    writer.flush().map_err(io_error(path))?;
    Ok(())
}
