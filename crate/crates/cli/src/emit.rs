//! Deterministic output formatting: fixed 12-decimal values, plain CSV, and
//! a lossless JSON re-encoding of the same rows.

use std::io::Write;

/// Fixed 12-decimal formatting; locale independent, byte stable across
/// runs. Negative zero collapses to zero so sweep endpoints don't flip
/// sign bits.
pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.12}")
}

/// Particle numbers print in shortest round-trip form ("100", "316.3").
pub fn fmt_n(n: f64) -> String {
    format!("{n}")
}

/// JSON value for a possibly non-finite number.
pub fn json_num(x: f64) -> String {
    if x.is_finite() {
        fmt12(x)
    } else {
        "null".into()
    }
}

/// One output table: a header and preformatted rows.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// JSON object {"rows": [...]} with one object per row; `extra` appends
    /// additional preformatted members.
    pub fn write_json(&self, out: &mut dyn Write, extra: &[(&str, String)]) -> std::io::Result<()> {
        writeln!(out, "{{")?;
        write!(out, "  \"rows\": [")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(out, ",")?;
            }
            write!(out, "\n    {{")?;
            for (j, (name, value)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    write!(out, ", ")?;
                }
                write!(out, "\"{name}\": {value}")?;
            }
            write!(out, "}}")?;
        }
        writeln!(out, "\n  ]{}", if extra.is_empty() { "" } else { "," })?;
        for (i, (name, value)) in extra.iter().enumerate() {
            let comma = if i + 1 < extra.len() { "," } else { "" };
            writeln!(out, "  \"{name}\": {value}{comma}")?;
        }
        writeln!(out, "}}")?;
        Ok(())
    }
}
