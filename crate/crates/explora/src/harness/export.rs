//! Result persistence: an episode-level CSV, a JSON document with the full
//! configuration echo, and plot-ready quantile tables.
//!
//! The CSV is plain comma-separated text with a fixed header, `.` decimals,
//! and LF line endings. Everything except the wall-time column is a
//! deterministic function of the benchmark configuration.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{BenchAccumulator, BenchReport, BenchSummary, EpisodeRecord, Outcome};
use crate::error::{Error, Result};

/// Version tag stamped into JSON exports.
pub const SPEC_VERSION: &str = "1";

/// Header of the episode-level CSV.
pub const CSV_HEADER: &str = "algorithm,delta,seed,tau,correct,outcome,wall_ms";

/// Renders episode records as CSV text.
pub fn episodes_to_csv(records: &[EpisodeRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.algorithm,
            r.delta,
            r.seed,
            r.tau,
            r.correct,
            r.outcome.as_str(),
            r.wall_ms
        ));
    }
    out
}

/// Parses the CSV produced by [`episodes_to_csv`].
pub fn episodes_from_csv<R: BufRead>(reader: R) -> Result<Vec<EpisodeRecord>> {
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            context: "reading episode CSV".into(),
            source,
        })?;
        if idx == 0 {
            if line != CSV_HEADER {
                return Err(Error::MalformedRecord {
                    line: 1,
                    reason: format!("expected header '{CSV_HEADER}'"),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::MalformedRecord {
                line: idx + 1,
                reason: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let malformed = |reason: String| Error::MalformedRecord {
            line: idx + 1,
            reason,
        };
        records.push(EpisodeRecord {
            algorithm: fields[0].to_string(),
            delta: fields[1]
                .parse()
                .map_err(|e| malformed(format!("delta: {e}")))?,
            seed: fields[2]
                .parse()
                .map_err(|e| malformed(format!("seed: {e}")))?,
            tau: fields[3]
                .parse()
                .map_err(|e| malformed(format!("tau: {e}")))?,
            correct: fields[4]
                .parse()
                .map_err(|e| malformed(format!("correct: {e}")))?,
            outcome: match fields[5] {
                "stopped" => Outcome::Stopped,
                "timeout" => Outcome::Timeout,
                other => return Err(malformed(format!("unknown outcome '{other}'"))),
            },
            wall_ms: fields[6]
                .parse()
                .map_err(|e| malformed(format!("wall_ms: {e}")))?,
        });
    }
    Ok(records)
}

/// Re-aggregates raw records into summaries, grouping by `(algorithm,
/// delta)` in order of first appearance.
pub fn summarize_records(records: &[EpisodeRecord]) -> Vec<BenchSummary> {
    let mut groups: Vec<((String, f64), BenchAccumulator)> = Vec::new();
    for record in records {
        let key = (record.algorithm.clone(), record.delta);
        let acc = match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, acc)) => acc,
            None => {
                groups.push((key, BenchAccumulator::default()));
                &mut groups.last_mut().expect("just pushed").1
            }
        };
        acc.push(record);
    }
    groups
        .into_iter()
        .map(|((algorithm, delta), acc)| acc.summarize(algorithm, delta))
        .collect()
}

/// Renders per-algorithm stopping-time quantile tables, one row per
/// `(algorithm, delta)` group.
pub fn quantile_table(summaries: &[BenchSummary]) -> String {
    let mut out = String::from(
        "algorithm,delta,episodes,stopped,timeouts,error_rate,mean_tau,p05,p25,p50,p75,p95\n",
    );
    for s in summaries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.algorithm,
            s.delta,
            s.episodes,
            s.stopped,
            s.timeouts,
            s.error_rate,
            s.mean_tau,
            s.quantiles.p05,
            s.quantiles.p25,
            s.quantiles.p50,
            s.quantiles.p75,
            s.quantiles.p95
        ));
    }
    out
}

/// JSON document written by [`export_json`]: the full configuration echo
/// plus records and summaries, stamped with a schema version.
#[derive(Serialize)]
struct JsonExport<'a> {
    spec_version: &'static str,
    report: &'a BenchReport,
}

fn io_ctx(path: &Path, action: &str) -> impl Fn(std::io::Error) -> Error {
    let context = format!("{action} {}", path.display());
    move |source| Error::Io {
        context: context.clone(),
        source,
    }
}

/// Writes the episode-level CSV to `path`.
pub fn export_csv(path: &Path, records: &[EpisodeRecord]) -> Result<()> {
    let file = File::create(path).map_err(io_ctx(path, "creating"))?;
    let mut writer = BufWriter::new(file);
    writer
        .write_all(episodes_to_csv(records).as_bytes())
        .map_err(io_ctx(path, "writing"))?;
    writer.flush().map_err(io_ctx(path, "writing"))
}

/// Reads an episode-level CSV back from `path`.
pub fn import_csv(path: &Path) -> Result<Vec<EpisodeRecord>> {
    let file = File::open(path).map_err(io_ctx(path, "opening"))?;
    episodes_from_csv(BufReader::new(file))
}

/// Writes the full benchmark report as JSON with a configuration echo.
pub fn export_json(path: &Path, report: &BenchReport) -> Result<()> {
    let file = File::create(path).map_err(io_ctx(path, "creating"))?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(
        &mut writer,
        &JsonExport {
            spec_version: SPEC_VERSION,
            report,
        },
    )
    .map_err(|e| Error::Io {
        context: format!("serializing {}", path.display()),
        source: std::io::Error::other(e),
    })?;
    writer.write_all(b"\n").map_err(io_ctx(path, "writing"))?;
    writer.flush().map_err(io_ctx(path, "writing"))
}

/// Writes the quantile table to `path`.
pub fn export_quantile_table(path: &Path, summaries: &[BenchSummary]) -> Result<()> {
    let file = File::create(path).map_err(io_ctx(path, "creating"))?;
    let mut writer = BufWriter::new(file);
    writer
        .write_all(quantile_table(summaries).as_bytes())
        .map_err(io_ctx(path, "writing"))?;
    writer.flush().map_err(io_ctx(path, "writing"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_records() -> Vec<EpisodeRecord> {
        vec![
            EpisodeRecord {
                algorithm: "lma".into(),
                delta: 0.1,
                seed: 0,
                tau: 120,
                correct: true,
                outcome: Outcome::Stopped,
                wall_ms: 1.25,
            },
            EpisodeRecord {
                algorithm: "lma".into(),
                delta: 0.1,
                seed: 1,
                tau: 180,
                correct: false,
                outcome: Outcome::Stopped,
                wall_ms: 2.0,
            },
            EpisodeRecord {
                algorithm: "bc".into(),
                delta: 0.1,
                seed: 0,
                tau: 90,
                correct: true,
                outcome: Outcome::Timeout,
                wall_ms: 0.5,
            },
        ]
    }

    #[test]
    fn csv_has_header_and_one_row_per_episode() {
        let csv = episodes_to_csv(&sample_records());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "lma,0.1,0,120,true,stopped,1.25");
    }

    #[test]
    fn csv_round_trip_preserves_summaries() {
        let records = sample_records();
        let csv = episodes_to_csv(&records);
        let parsed = episodes_from_csv(csv.as_bytes()).unwrap();
        assert_eq!(parsed, records);
        assert_eq!(summarize_records(&parsed), summarize_records(&records));
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(episodes_from_csv("not,a,header\n".as_bytes()).is_err());
        let bad = format!("{CSV_HEADER}\nlma,0.1,0,abc,true,stopped,1.0\n");
        assert!(matches!(
            episodes_from_csv(bad.as_bytes()),
            Err(Error::MalformedRecord { line: 2, .. })
        ));
    }

    #[test]
    fn quantile_table_has_one_block_per_algorithm() {
        let summaries = summarize_records(&sample_records());
        assert_eq!(summaries.len(), 2);
        let table = quantile_table(&summaries);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("lma,0.1,2,2,0,0.5,150,"));
        assert!(lines[2].starts_with("bc,0.1,1,0,1,0,0,"));
    }
}
