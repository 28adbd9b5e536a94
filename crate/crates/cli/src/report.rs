//! Evaluation reports (JSON) and curves (CSV).

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use srs_lbp::{EvalReport, FeatureSpec};

pub const REPORT_FORMAT: &str = "srs-lbp-report";

/// Where the PCA basis of an evaluation came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PcaSource {
    /// Fitted on the evaluated descriptors (`l1out`).
    Evaluated,
    Model { path: String, training_samples: usize },
    Descriptors { path: String, training_samples: usize },
}

/// Everything written to a report file. Field order is the key order on
/// disk; `timestamp` is the only field that varies between identical runs.
#[derive(Clone, Debug, Serialize)]
pub struct ReportFile {
    pub format: &'static str,
    pub version: u32,
    pub timestamp: u64,
    pub descriptors: String,
    pub feature: FeatureSpec,
    pub feature_label: String,
    pub filter: Option<String>,
    pub pca_source: PcaSource,
    #[serde(flatten)]
    pub report: EvalReport,
}

impl ReportFile {
    pub fn new(
        descriptors: &Path,
        feature: FeatureSpec,
        filter: Option<String>,
        pca_source: PcaSource,
        report: EvalReport,
    ) -> Self {
        Self {
            format: REPORT_FORMAT,
            version: 1,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            descriptors: descriptors.display().to_string(),
            feature_label: feature.label(),
            feature,
            filter,
            pca_source,
            report,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_json()?)
    }
}

/// Writes `x,value` rows under a header line.
pub fn write_curve(path: impl AsRef<Path>, curve: &[(f64, f64)]) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "x,value")?;
    for (x, v) in curve {
        writeln!(w, "{x},{v}")?;
    }
    w.flush()
}

/// Parses a curve written by [`write_curve`].
pub fn read_curve(path: impl AsRef<Path>) -> std::io::Result<Vec<(f64, f64)>> {
    let bad = |m: String| std::io::Error::new(std::io::ErrorKind::InvalidData, m);
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some("x,value") {
        return Err(bad("missing x,value header".into()));
    }
    lines
        .map(|l| {
            let (x, v) = l.split_once(',').ok_or_else(|| bad(format!("bad row {l:?}")))?;
            let parse = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
            Ok((parse(x)?, parse(v)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use srs_lbp::evaluation::evaluate_records;
    use srs_lbp::{EmbeddedVector, EvalConfig, Protocol, RadialConfig, SampleRecord};

    fn report() -> EvalReport {
        let records: Vec<SampleRecord> = (0..6)
            .map(|i| SampleRecord {
                writer_id: format!("w{}", i / 3),
                embedded: EmbeddedVector {
                    sample_id: format!("s{i}"),
                    values: if i < 3 { vec![1.0, 0.01 * i as f64] } else { vec![0.01 * i as f64, 1.0] },
                },
            })
            .collect();
        evaluate_records(Protocol::L1out, &records, 2, &EvalConfig::default()).unwrap()
    }

    #[test]
    fn report_keys_are_stable() {
        let file = ReportFile::new(
            Path::new("d.bin"),
            FeatureSpec::srs(RadialConfig::default()),
            None,
            PcaSource::Evaluated,
            report(),
        );
        let v: serde_json::Value = serde_json::from_str(&file.to_json().unwrap()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for k in [
            "format", "version", "timestamp", "descriptors", "feature", "feature_label", "filter",
            "pca_source", "protocol", "config", "n_components", "n_queries", "soft_top", "hard_top",
            "rankings",
        ] {
            assert!(keys.contains(&k), "missing {k}");
        }
        assert_eq!(v["soft_top"]["1"], 1.0);
        assert_eq!(v["pca_source"]["kind"], "evaluated");
        assert_eq!(v["feature_label"], "srs");
        // hard top-3 needs three other samples of the same writer
        assert_eq!(v["hard_top"]["3"]["accuracy"], serde_json::Value::Null);
    }

    #[test]
    fn curve_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let curve = vec![(-20.0, 0.5), (0.0, 1.0), (2.5, 1.0 / 3.0)];
        write_curve(&path, &curve).unwrap();
        assert!(std::fs::read_to_string(&path).unwrap().starts_with("x,value\n-20,0.5\n"));
        assert_eq!(read_curve(&path).unwrap(), curve);
    }
}
