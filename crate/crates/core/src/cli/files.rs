//! CSV curve files and the merged comparison output.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::dmt::DmtCurve;
use crate::montecarlo::OutageEstimate;

pub const TRADEOFF_HEADER: [&str; 3] = ["r", "d", "kind"];
pub const OUTAGE_HEADER: [&str; 6] = ["snr_db", "p_hat", "ci_low", "ci_high", "trials", "outage_events"];

/// Spacing of the dense samples written after the vertices.
pub const SAMPLE_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub r: f64,
    pub d: f64,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageRow {
    pub snr_db: f64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub outage_events: u64,
}

impl From<&OutageEstimate> for OutageRow {
    fn from(e: &OutageEstimate) -> Self {
        Self {
            snr_db: e.snr.snr_db,
            p_hat: e.p_hat,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            trials: e.trials,
            outage_events: e.outage_events,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveFile {
    Tradeoff(Vec<TradeoffRow>),
    Outage(Vec<OutageRow>),
}

impl CurveFile {
    pub fn axis(&self) -> &'static str {
        match self {
            CurveFile::Tradeoff(_) => "r",
            CurveFile::Outage(_) => "snr_db",
        }
    }
}

pub fn tradeoff_rows(c: &DmtCurve) -> Vec<TradeoffRow> {
    let vertex = c.vertices.iter().map(|&(r, d)| TradeoffRow {
        r,
        d,
        kind: "vertex".into(),
    });
    let sample = c.samples(SAMPLE_STEP).into_iter().map(|(r, d)| TradeoffRow {
        r,
        d,
        kind: "sample".into(),
    });
    vertex.chain(sample).collect()
}

fn writer(path: &Path, headers: bool) -> Result<csv::Writer<File>, CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .has_headers(headers)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = writer(path, true)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_curve_file(path: &Path, f: &CurveFile) -> Result<(), CliError> {
    match f {
        CurveFile::Tradeoff(rows) => write_rows(path, rows),
        CurveFile::Outage(rows) => write_rows(path, rows),
    }
}

pub fn read_curve_file(path: &Path) -> Result<CurveFile, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let bad = |e: csv::Error| CliError::Config(format!("{}: {e}", path.display()));
    if header == TRADEOFF_HEADER {
        let rows = rdr.deserialize().collect::<Result<Vec<TradeoffRow>, _>>().map_err(bad)?;
        Ok(CurveFile::Tradeoff(rows))
    } else if header == OUTAGE_HEADER {
        let rows = rdr.deserialize().collect::<Result<Vec<OutageRow>, _>>().map_err(bad)?;
        Ok(CurveFile::Outage(rows))
    } else {
        Err(CliError::Config(format!("{}: unrecognized header {header:?}", path.display())))
    }
}

/// Long-format merge: every row prefixed by its series label.
pub fn write_merged(path: &Path, series: &[(String, CurveFile)]) -> Result<(), CliError> {
    let mut w = writer(path, false)?;
    let axis = series.first().map(|s| s.1.axis());
    if axis == Some("r") {
        w.write_record(std::iter::once("label").chain(TRADEOFF_HEADER))?;
    } else {
        w.write_record(std::iter::once("label").chain(OUTAGE_HEADER))?;
    }
    for (label, file) in series {
        match file {
            CurveFile::Tradeoff(rows) => {
                for row in rows {
                    w.serialize((label, row))?;
                }
            }
            CurveFile::Outage(rows) => {
                for row in rows {
                    w.serialize((label, row))?;
                }
            }
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// A gnuplot script plotting every series of the merged file `data`.
pub fn gnuplot_script(data: &str, axis: &str, labels: &[String]) -> String {
    let mut s = String::from("set datafile separator \",\"\nset key outside right\nset grid\n");
    let plots: Vec<String> = if axis == "r" {
        s.push_str("set xlabel \"multiplexing gain r\"\nset ylabel \"diversity gain d(r)\"\nset yrange [0:*]\n");
        labels
            .iter()
            .map(|l| {
                format!(
                    "{} every ::1 using (strcol(1) eq {} && strcol(4) eq \"sample\" ? $2 : 1/0):3 with lines title {}",
                    quote(data),
                    quote(l),
                    quote(l)
                )
            })
            .collect()
    } else {
        s.push_str("set xlabel \"SNR (dB)\"\nset ylabel \"outage probability\"\nset logscale y\nset format y \"10^{%L}\"\n");
        labels
            .iter()
            .map(|l| {
                format!(
                    "{} every ::1 using (strcol(1) eq {} ? $2 : 1/0):3:4:5 with yerrorlines title {}",
                    quote(data),
                    quote(l),
                    quote(l)
                )
            })
            .collect()
    };
    s.push_str("plot \\\n    ");
    s.push_str(&plots.join(", \\\n    "));
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut f = File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmt::dmt_mimo;

    #[test]
    fn tradeoff_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        let rows = tradeoff_rows(&dmt_mimo(2, 3));
        write_curve_file(&p, &CurveFile::Tradeoff(rows.clone())).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("r,d,kind\n0.0,6.0,vertex\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_curve_file(&p).unwrap(), CurveFile::Tradeoff(rows));
    }

    #[test]
    fn outage_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("o.csv");
        let rows = vec![OutageRow {
            snr_db: 12.5,
            p_hat: 0.1 + 0.2,
            ci_low: 1.0 / 3.0,
            ci_high: 2e-7,
            trials: 1_000_000,
            outage_events: 7,
        }];
        write_curve_file(&p, &CurveFile::Outage(rows.clone())).unwrap();
        assert_eq!(read_curve_file(&p).unwrap(), CurveFile::Outage(rows));
    }

    #[test]
    fn unknown_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        std::fs::write(&p, "a,b\n1,2\n").unwrap();
        assert!(matches!(read_curve_file(&p), Err(CliError::Config(_))));
    }

    #[test]
    fn samples_follow_vertices() {
        let rows = tradeoff_rows(&dmt_mimo(1, 1));
        assert_eq!(rows.iter().filter(|r| r.kind == "vertex").count(), 2);
        assert_eq!(rows.iter().filter(|r| r.kind == "sample").count(), 21);
    }

    #[test]
    fn script_mentions_every_label() {
        let s = gnuplot_script("m.csv", "snr_db", &["a".into(), "b \"q\"".into()]);
        assert!(s.contains("set logscale y"));
        assert!(s.contains("\"a\"") && s.contains("\"b \\\"q\\\"\""));
    }
}
