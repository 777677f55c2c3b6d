//! Structured-text run reports: an indented key/value tree printed to
//! stdout, machine-parseable with nothing fancier than line splitting.
//! Numeric keys carry a unit suffix (`_nats`, `_s`, `_m`, `_count`,
//! `_units`, `_dimensionless`) so values are never ambiguous.

use std::fmt::Display;

pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self {
            lines: vec!["transect-report:".to_string()],
        };
        r.top("command", command);
        r.top("tool_version", env!("CARGO_PKG_VERSION"));
        r.top("timestamp_unix_s", timestamp());
        r
    }

    /// Top-level entry.
    pub fn top(&mut self, key: &str, value: impl Display) {
        self.lines.push(format!("  {key}: {value}"));
    }

    /// Opens a named section.
    pub fn section(&mut self, name: &str) {
        self.lines.push(format!("  {name}:"));
    }

    /// Entry under the most recent section.
    pub fn kv(&mut self, key: &str, value: impl Display) {
        self.lines.push(format!("    {key}: {value}"));
    }

    pub fn print(&self) {
        for line in &self.lines {
            println!("{line}");
        }
    }
}

/// Seconds since the epoch; honors `SOURCE_DATE_EPOCH` so reruns can be
/// made byte-identical.
fn timestamp() -> u64 {
    if let Ok(v) = std::env::var("SOURCE_DATE_EPOCH") {
        if let Ok(t) = v.parse::<u64>() {
            return t;
        }
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
