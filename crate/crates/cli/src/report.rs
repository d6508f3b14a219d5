//! Plain `key: value` reports with a JSON alternative.

use std::fmt::Display;

pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self { lines: Vec::new() }
    }

    pub fn line(&mut self, key: &str, value: impl Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    /// Fixed notation in the ordinary range, exponent notation outside it.
    pub fn num(&mut self, key: &str, x: f64) {
        let a = x.abs();
        let text = if x == 0.0 || (1e-4..1e6).contains(&a) { format!("{x}") } else { format!("{x:e}") };
        self.lines.push((key.to_string(), text));
    }

    pub fn emit(&self, json: bool, value: &serde_json::Value) {
        if json {
            println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
            return;
        }
        let width = self.lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.lines {
            println!("{k:<width$}  {v}");
        }
    }
}
