//! Minimal CSV emission: `#` metadata lines, one header row, then records.
//! Floats are written with 17 significant digits so they parse back exactly.

use std::io::Write;

use crate::config::RunConfig;

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

pub struct CsvWriter<W: Write> {
    out: W,
    columns: usize,
}

impl<W: Write> CsvWriter<W> {
    /// Writes the metadata block (tool, command, every config field) and the header.
    pub fn start(mut out: W, command: &str, cfg: &RunConfig, extra: &[(&str, String)], header: &[&str]) -> std::io::Result<Self> {
        writeln!(out, "# gaussthermo {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# command = {command}")?;
        let echo = serde_json::to_value(cfg).expect("config serialises");
        if let serde_json::Value::Object(map) = echo {
            for (k, v) in map {
                writeln!(out, "# {k} = {v}")?;
            }
        }
        for (k, v) in extra {
            writeln!(out, "# {k} = {v}")?;
        }
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { out, columns: header.len() })
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> std::io::Result<()> {
        debug_assert_eq!(fields.len(), self.columns);
        let line: Vec<&str> = fields.iter().map(|f| f.as_ref()).collect();
        writeln!(self.out, "{}", line.join(","))
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Header names for the 16 covariance entries, `sigma_ij` row-major.
pub fn sigma_columns() -> Vec<String> {
    (0..4).flat_map(|i| (0..4).map(move |j| format!("sigma_{i}{j}"))).collect()
}
