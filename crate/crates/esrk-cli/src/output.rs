//! CSV assembly with shortest round-trip-exact float formatting, so
//! identical configurations produce byte-identical files.

use std::io::Write;

use crate::commands::CliError;

/// Shortest scientific representation that parses back to the same f64.
pub fn float(x: f64) -> String {
    format!("{x:e}")
}

pub fn opt_order(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Self {
            lines: vec![header.to_string()],
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.lines.push(fields.join(","));
    }

    pub fn comment(&mut self, text: &str) {
        self.lines.push(format!("# {text}"));
    }

    pub fn write(self, out: Option<&str>) -> Result<(), CliError> {
        let mut body = self.lines.join("\n");
        body.push('\n');
        match out {
            Some(path) => std::fs::write(path, body)
                .map_err(|e| CliError::Io(format!("cannot write {path}: {e}"))),
            None => std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write stdout: {e}"))),
        }
    }
}
