//! CSV, JSON and manifest writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ghostsim::Pattern;

use crate::config::{emit_config, RunConfig};
use crate::error::CliError;

/// Scalar figures of one coincidence run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub distinguishability: f64,
    pub peak_visibility: f64,
    pub measured_visibility: f64,
    pub duality_margin: f64,
    /// `None` outside the large-Omega regime.
    pub fringe_spacing: Option<f64>,
    pub pass_probability: f64,
}

pub const SUMMARY_KEYS: [&str; 6] = [
    "distinguishability",
    "peak_visibility",
    "measured_visibility",
    "duality_margin",
    "fringe_spacing",
    "pass_probability",
];

pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_number(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => number(x),
        _ => "null".to_string(),
    }
}

impl Summary {
    fn values(&self) -> [Option<f64>; 6] {
        [
            Some(self.distinguishability),
            Some(self.peak_visibility),
            Some(self.measured_visibility),
            Some(self.duality_margin),
            self.fringe_spacing,
            Some(self.pass_probability),
        ]
    }

    pub fn to_json(&self) -> String {
        let fields: Vec<String> = SUMMARY_KEYS
            .iter()
            .zip(self.values())
            .map(|(k, v)| format!("  \"{k}\": {}", json_number(v)))
            .collect();
        format!("{{\n{}\n}}\n", fields.join(",\n"))
    }

    /// Comma-separated values in [`SUMMARY_KEYS`] order; missing values are empty.
    pub fn csv_fields(&self) -> String {
        self.values()
            .iter()
            .map(|v| v.map(number).unwrap_or_default())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn pattern_csv(p: &Pattern) -> String {
    let mut s = String::with_capacity(48 * (p.len() + 1));
    s.push_str("z2,intensity\n");
    for (z, v) in p.z2().iter().zip(p.intensity()) {
        let _ = writeln!(s, "{},{}", number(*z), number(*v));
    }
    s
}

pub fn manifest(command: &str, seed: u64, cfg: &RunConfig) -> String {
    format!(
        "# ghostsim {} {command}\n# seed = {seed}\n{}",
        env!("CARGO_PKG_VERSION"),
        emit_config(cfg)
    )
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_has_fixed_keys_and_null_spacing() {
        let s = Summary {
            distinguishability: 1.0,
            peak_visibility: 0.0,
            measured_visibility: 0.0,
            duality_margin: 0.0,
            fringe_spacing: None,
            pass_probability: 0.25,
        };
        let json = s.to_json();
        for k in SUMMARY_KEYS {
            assert!(json.contains(&format!("\"{k}\"")));
        }
        assert!(json.contains("\"fringe_spacing\": null"));
        assert!(json.contains("2.5000000000000000e-1"));
        assert_eq!(s.csv_fields().split(',').count(), 6);
    }

    #[test]
    fn numbers_carry_seventeen_digits() {
        let text = number(0.1);
        assert_eq!(text, "1.0000000000000001e-1");
        assert_eq!(text.parse::<f64>().unwrap(), 0.1);
    }
}
