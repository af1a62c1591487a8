//! Serialization of command results: JSON documents and plain CSV tables.

use std::fmt::Write;

use serde_json::Value;
use tpht::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A command result in both output formats.
pub struct Rendered {
    pub json: Value,
    pub csv: String,
}

impl Rendered {
    pub fn text(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
        }
    }
}

/// Seventeen significant digits, enough to reproduce any `f64` exactly.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn csv_row<I: IntoIterator<Item = String>>(out: &mut String, cells: I) {
    let cells: Vec<String> = cells.into_iter().collect();
    let _ = writeln!(out, "{}", cells.join(","));
}

pub fn csv_matrix(out: &mut String, m: &Matrix) {
    for i in 0..m.rows() {
        csv_row(out, m.row(i).iter().map(|&x| num(x)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0, -7.25e-300, 1e300, 0.0, f64::MIN_POSITIVE] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
            let mantissa = s.split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }
}
