//! Artifact writers. Files are written to a temporary sibling and renamed.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// CSV with `#`-prefixed provenance lines and one header row.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(cfg: &ExperimentConfig, columns: &[&str]) -> Self {
        let mut text = format!("# gibbsflow {}\n", gibbsflow_core::VERSION);
        for (k, v) in cfg.resolved() {
            text.push_str(&format!("# {k} = {v}\n"));
        }
        text.push_str(&columns.join(","));
        text.push('\n');
        Csv { text }
    }

    /// Extra `# key = value` line placed before the header row.
    pub fn note(&mut self, key: &str, value: impl std::fmt::Display) {
        let at = self.text.rfind("\n#").map_or(0, |i| i + 1);
        let line_end = self.text[at..].find('\n').map_or(self.text.len(), |i| at + i + 1);
        self.text.insert_str(line_end, &format!("# {key} = {value}\n"));
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

/// JSON document carrying the version and resolved config next to the report.
pub fn json_doc(cfg: &ExperimentConfig, report: Value) -> Vec<u8> {
    let config: Map<String, Value> = cfg.resolved().into_iter().map(|(k, v)| (k.to_string(), Value::String(v))).collect();
    let doc = json!({ "version": gibbsflow_core::VERSION, "config": config, "report": report });
    let mut s = serde_json::to_string_pretty(&doc).expect("json");
    s.push('\n');
    s.into_bytes()
}

/// JSON has no infinities or NaN; map them to null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(write_atomic(&dir.path().join("missing/a.txt"), b"x").is_err());
    }

    #[test]
    fn notes_go_before_the_header_row() {
        let cfg = ExperimentConfig::resolve(&[("command", "weyl")].map(|(a, b)| (a.into(), b.into())).into()).unwrap();
        let mut c = Csv::new(&cfg, &["a", "b"]);
        c.note("slope", 0.5);
        c.row(&["1".into(), "2".into()]);
        let text = String::from_utf8(c.into_bytes()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[lines.len() - 3], "# slope = 0.5");
        assert_eq!(lines[lines.len() - 2], "a,b");
    }

    #[test]
    fn non_finite_numbers_become_null() {
        assert_eq!(num(f64::INFINITY), Value::Null);
        assert_eq!(num(1.5), json!(1.5));
    }
}
