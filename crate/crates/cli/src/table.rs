use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::config::ExperimentConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CONFIG_PREFIX: &str = "# config: ";

/// A CSV table with `# key: value` notes written after the header lines.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, config: &ExperimentConfig) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# toric-zeros {VERSION}");
        let _ = writeln!(s, "{CONFIG_PREFIX}{}", config.echo());
        for (k, v) in &self.notes {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    pub fn write(&self, config: &ExperimentConfig, out: Option<&Path>) -> std::io::Result<()> {
        let text = self.render(config);
        match out {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

/// Shortest round-trip representation, in exponent form for extreme magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Extracts the config echo from a previously written file.
pub fn config_line(text: &str) -> Option<&str> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix(CONFIG_PREFIX))
}
