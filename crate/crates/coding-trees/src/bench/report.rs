//! Report rows and their CSV/JSON serializations.
//!
//! CSV columns are fixed: `t, <coord>, estimate, std_error, exact, rel_error`
//! where `<coord>` is `x`, `s` or `q` depending on the preset; `exact` and
//! `rel_error` are empty when no closed form is available. Floats print in
//! shortest round-trip form, so parsing the file back reproduces the values
//! exactly. The JSON form mirrors the rows and echoes the run configuration.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub t: f64,
    pub coord: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub exact: Option<f64>,
    pub rel_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub coord_label: &'static str,
    pub rows: Vec<ReportRow>,
    /// Failed samples over the whole run (0 in strict mode by construction).
    pub failed: u64,
    /// Echo of the configuration, embedded in the JSON form.
    pub config: serde_json::Value,
}

impl Report {
    pub fn max_rel_error(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.rel_error)
            .fold(None, |acc, e| Some(acc.map_or(e, |a: f64| a.max(e))))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "t",
            self.coord_label,
            "estimate",
            "std_error",
            "exact",
            "rel_error",
        ])
        .unwrap();
        for r in &self.rows {
            w.write_record([
                r.t.to_string(),
                r.coord.to_string(),
                r.estimate.to_string(),
                r.std_error.to_string(),
                r.exact.map(|v| v.to_string()).unwrap_or_default(),
                r.rel_error.map(|v| v.to_string()).unwrap_or_default(),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    /// Parses a CSV produced by [`Report::to_csv`] back into rows.
    pub fn rows_from_csv(text: &str) -> Result<Vec<ReportRow>, csv::Error> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let field = |i: usize| -> Option<f64> {
                let s = record.get(i).unwrap_or("");
                if s.is_empty() {
                    None
                } else {
                    s.parse().ok()
                }
            };
            rows.push(ReportRow {
                t: field(0).unwrap_or(f64::NAN),
                coord: field(1).unwrap_or(f64::NAN),
                estimate: field(2).unwrap_or(f64::NAN),
                std_error: field(3).unwrap_or(f64::NAN),
                exact: field(4),
                rel_error: field(5),
            });
        }
        Ok(rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "config": self.config,
            "coord_label": self.coord_label,
            "failed": self.failed,
            "rows": self.rows,
        })
    }

    /// Plain-text table for terminal output.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:>10}  {:>10}  {:>14}  {:>12}  {:>14}  {:>10}\n",
            "t", self.coord_label, "estimate", "std_error", "exact", "rel_error"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:>10.5}  {:>10.5}  {:>14.6e}  {:>12.4e}  {:>14}  {:>10}\n",
                r.t,
                r.coord,
                r.estimate,
                r.std_error,
                r.exact.map(|v| format!("{v:.6e}")).unwrap_or_default(),
                r.rel_error.map(|v| format!("{v:.2e}")).unwrap_or_default(),
            ));
        }
        out
    }
}
