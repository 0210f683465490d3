//! Named numeric tables and their CSV form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::RunError;

#[derive(Debug, Clone, PartialEq)]
pub struct FigureDataset {
    /// File stem, e.g. `fig1a` or `evolve_g0.8`.
    pub id: String,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl FigureDataset {
    pub fn new(id: impl Into<String>) -> Self {
        FigureDataset {
            id: id.into(),
            columns: Vec::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        self.columns.push((name.into(), values));
        self
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) {
        self.columns.push((name.into(), values));
    }

    pub fn header(&self) -> String {
        self.columns
            .iter()
            .map(|(n, _)| n.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |(_, v)| v.len())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |msg: String| Err(RunError::Invariant(format!("dataset {}: {msg}", self.id)));
        if self.id.is_empty() || self.id.contains(['/', '\\']) {
            return bad("id must be a plain file stem".into());
        }
        if self.columns.is_empty() {
            return bad("no columns".into());
        }
        let rows = self.rows();
        for (name, values) in &self.columns {
            if name.is_empty() || name.contains([',', '\n', '\r', '"']) || name.chars().any(char::is_uppercase) {
                return bad(format!("column name {name:?} is not a lowercase plain identifier"));
            }
            if values.is_empty() {
                return bad(format!("column {name} is empty"));
            }
            if values.len() != rows {
                return bad(format!("column {name} has {} rows, expected {rows}", values.len()));
            }
        }
        let mut names: Vec<_> = self.columns.iter().map(|(n, _)| n).collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return bad("duplicate column names".into());
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String, RunError> {
        self.validate()?;
        let mut out = self.header();
        out.push('\n');
        for r in 0..self.rows() {
            for (i, (_, values)) in self.columns.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(&mut out, values[r]);
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`; `nan`,
/// `inf`, `-inf` for non-finite values.
pub fn write_value(out: &mut String, x: f64) {
    if x.is_nan() {
        out.push_str("nan");
    } else if x.is_infinite() {
        out.push_str(if x > 0.0 { "inf" } else { "-inf" });
    } else {
        write!(out, "{x:.16e}").expect("writing to a String cannot fail");
    }
}

/// Column-name suffix for a parameter value: `0.8`, `1.0`, `100.0`.
pub fn param_label(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

pub fn g_label(g: f64) -> String {
    format!("g{}", param_label(g))
}

/// Writes `<output_dir>/<id>.csv`.
pub fn emit_csv(dataset: &FigureDataset, output_dir: &Path) -> Result<PathBuf, RunError> {
    let text = dataset.to_csv()?;
    let path = output_dir.join(format!("{}.csv", dataset.id));
    fs::write(&path, text).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(g_label(0.8), "g0.8");
        assert_eq!(g_label(1.0), "g1.0");
        assert_eq!(g_label(100.0), "g100.0");
        assert_eq!(g_label(0.05), "g0.05");
    }

    #[test]
    fn value_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0, f64::MIN_POSITIVE, f64::MAX] {
            let mut s = String::new();
            write_value(&mut s, x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{s}");
        }
        let mut s = String::new();
        write_value(&mut s, f64::NAN);
        assert_eq!(s, "nan");
    }

    #[test]
    fn csv_layout() {
        let ds = FigureDataset::new("t")
            .with("tau", vec![0.0, 0.5])
            .with("u_g0.8", vec![0.0, f64::NAN]);
        let csv = ds.to_csv().unwrap();
        assert_eq!(
            csv,
            "tau,u_g0.8\n0.0000000000000000e0,0.0000000000000000e0\n5.0000000000000000e-1,nan\n"
        );
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn refuses_bad_datasets() {
        assert!(FigureDataset::new("x").to_csv().is_err());
        assert!(FigureDataset::new("x").with("tau", vec![]).to_csv().is_err());
        assert!(FigureDataset::new("x")
            .with("a", vec![1.0])
            .with("b", vec![1.0, 2.0])
            .to_csv()
            .is_err());
        assert!(FigureDataset::new("x").with("A", vec![1.0]).to_csv().is_err());
        assert!(FigureDataset::new("x")
            .with("a", vec![1.0])
            .with("a", vec![1.0])
            .to_csv()
            .is_err());
        assert!(FigureDataset::new("../x").with("a", vec![1.0]).to_csv().is_err());
    }
}
