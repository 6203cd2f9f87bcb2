//! Report files.
//!
//! * `summary.json`: the scenario echo plus mean market and per-topic metrics.
//! * `market.csv`: one row per replication.
//! * `topics.csv`: one row per replication and topic.
//! * `timeseries.csv`: per-stage means over replications.
//! * `topic_timeseries.csv`: per-stage, per-topic means (only when requested).
//!
//! Real numbers carry six significant digits; counts are written as integers.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use expsea_core::runner::{StageMean, Summary};
use expsea_core::{RunReport, ScenarioConfig, Topic, TopicMap};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Formats like C's `%.6g`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let prec = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.prec$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn round6(x: f64) -> f64 {
    sig6(x).parse().unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryMetrics {
    pub impressions: f64,
    pub clicks: f64,
    pub actions: f64,
    pub ctr: f64,
    pub cr: f64,
    pub cpc: f64,
    pub market_profit: f64,
}

impl From<&Summary> for SummaryMetrics {
    fn from(s: &Summary) -> Self {
        SummaryMetrics {
            impressions: round6(s.impressions),
            clicks: round6(s.clicks),
            actions: round6(s.actions),
            ctr: round6(s.ctr),
            cr: round6(s.cr),
            cpc: round6(s.cpc),
            market_profit: round6(s.market_profit),
        }
    }
}

/// Layout of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub config: ScenarioConfig,
    pub replications: usize,
    pub mean: SummaryMetrics,
    pub topics: TopicMap<SummaryMetrics>,
}

impl SummaryFile {
    pub fn of(report: &RunReport) -> Self {
        SummaryFile {
            config: report.config.clone(),
            replications: report.replications.len(),
            mean: (&report.mean).into(),
            topics: report.mean_topics.map(|_, s| s.into()),
        }
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, Error> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file)))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e))
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<(), Error>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn stage_row(stage: usize, m: &StageMean) -> [String; 6] {
    [
        (stage + 1).to_string(),
        sig6(m.queries),
        sig6(m.impressions),
        sig6(m.clicks),
        sig6(m.actions),
        sig6(m.spend),
    ]
}

/// Writes every report file into `out_dir`, creating it if needed. Returns the
/// paths written.
pub fn write_report(report: &RunReport, out_dir: &Path) -> Result<Vec<PathBuf>, Error> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    let summary = out_dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&SummaryFile::of(report)).expect("summary serializes");
    text.push('\n');
    fs::write(&summary, text).map_err(|e| Error::io(&summary, e))?;
    written.push(summary);

    let market = out_dir.join("market.csv");
    write_rows(
        &market,
        &["replication", "impressions", "clicks", "actions", "ctr", "cr", "cpc", "market_profit"],
        report.replications.iter().map(|r| {
            let c = &r.market.counters;
            [
                r.index.to_string(),
                c.impressions.to_string(),
                c.clicks.to_string(),
                c.actions.to_string(),
                sig6(r.market.ratios.ctr),
                sig6(r.market.ratios.cr),
                sig6(r.market.ratios.cpc),
                sig6(r.market.profit),
            ]
        }),
    )?;
    written.push(market);

    let topics = out_dir.join("topics.csv");
    write_rows(
        &topics,
        &["replication", "topic", "impressions", "clicks", "actions", "ctr", "cr", "cpc", "spend", "profit", "vc"],
        report.replications.iter().flat_map(|r| {
            Topic::ALL.into_iter().map(move |t| {
                let s = &r.topics[t];
                [
                    r.index.to_string(),
                    t.name().to_string(),
                    s.counters.impressions.to_string(),
                    s.counters.clicks.to_string(),
                    s.counters.actions.to_string(),
                    sig6(s.ratios.ctr),
                    sig6(s.ratios.cr),
                    sig6(s.ratios.cpc),
                    sig6(s.counters.spend),
                    sig6(s.profit),
                    sig6(r.vc[t]),
                ]
            })
        }),
    )?;
    written.push(topics);

    let series = out_dir.join("timeseries.csv");
    write_rows(
        &series,
        &["stage", "queries", "impressions", "clicks", "actions", "spend"],
        report.mean_timeseries.iter().enumerate().map(|(i, m)| stage_row(i, m)),
    )?;
    written.push(series);

    if report.config.report.per_topic_timeseries {
        let path = out_dir.join("topic_timeseries.csv");
        write_rows(
            &path,
            &["stage", "topic", "queries", "impressions", "clicks", "actions", "spend"],
            report.mean_topic_timeseries.iter().enumerate().flat_map(|(i, per_topic)| {
                Topic::ALL.into_iter().map(move |t| {
                    let [stage, q, imp, clk, act, spend] = stage_row(i, &per_topic[t]);
                    [stage, t.name().to_string(), q, imp, clk, act, spend]
                })
            }),
        )?;
        written.push(path);
    }
    Ok(written)
}

pub fn read_summary(path: &Path) -> Result<SummaryFile, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formats() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(0.0472953), "0.0472953");
        assert_eq!(sig6(0.047295349), "0.0472953");
        assert_eq!(sig6(367207.4), "367207");
        assert_eq!(sig6(999999.7), "1e6");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(0.00001234567), "1.23457e-5");
        assert_eq!(sig6(-2.5), "-2.5");
    }

    #[test]
    fn empty_report_has_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        let report = RunReport::from_replications(ScenarioConfig::default(), Vec::new());
        write_report(&report, dir.path()).unwrap();
        let market = fs::read_to_string(dir.path().join("market.csv")).unwrap();
        assert_eq!(market, "replication,impressions,clicks,actions,ctr,cr,cpc,market_profit\n");
        let series = fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
        assert_eq!(series.lines().count(), 1);
    }

    #[test]
    fn unwritable_path_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let report = RunReport::from_replications(ScenarioConfig::default(), Vec::new());
        let err = write_report(&report, &blocker.join("sub")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("file"), "{err}");
    }
}
