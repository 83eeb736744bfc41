//! Rendering of command results.
//!
//! Every command builds a [`Report`] holding both a JSON value and a CSV
//! table; `--format` picks which one is printed. Floats are rounded to 12
//! significant digits before printing so that output is stable text.

use std::io::{self, Write};

use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Report {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn write(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()
            }
        }
    }
}

pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// JSON number rounded to 12 significant digits; `null` when not finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(round12(x))
    } else {
        Value::Null
    }
}

/// CSV cell for a float; empty when not finite.
pub fn cell(x: f64) -> String {
    if x.is_finite() {
        round12(x).to_string()
    } else {
        String::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(-0.0), 0.0);
        assert_eq!(round12(2.0 * std::f64::consts::SQRT_2), 2.82842712475);
        assert_eq!(num(1.0).to_string(), "1.0");
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(cell(-0.5), "-0.5");
        assert_eq!(cell(f64::INFINITY), "");
    }
}
