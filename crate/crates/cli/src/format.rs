//! Fixed-precision number formatting and the two output layouts.

use std::fmt::Write as _;

/// Significant digits in every emitted number.
pub const SIG_DIGITS: usize = 9;

/// Formats `x` with [`SIG_DIGITS`] significant digits. Plain decimal between
/// 1e-5 and 1e9, scientific outside; trailing zeros are trimmed.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if x.is_nan() {
        return "nan".to_owned();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_owned();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        let s = format!("{:.*e}", SIG_DIGITS - 1, x);
        match s.split_once('e') {
            Some((mantissa, e)) => format!("{}e{e}", trim(mantissa.to_owned())),
            None => s,
        }
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_owned()
    } else {
        t.to_owned()
    }
}

/// Rounds to `digits` significant figures, for summary lines.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return num(x);
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Table,
}

/// Header plus rows of already formatted cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(Into::into).collect());
    }

    /// No header and no rows; renders as nothing in either layout.
    pub fn is_empty(&self) -> bool {
        self.header.is_empty() && self.rows.is_empty()
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        if self.is_empty() {
            return Ok(String::new());
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is built from UTF-8 strings"))
    }

    /// Right-aligned columns separated by two spaces.
    pub fn to_text(&self) -> String {
        if self.is_empty() {
            return String::new();
        }
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| {
                self.rows
                    .iter()
                    .filter_map(|r| r.get(c))
                    .chain(std::iter::once(&self.header[c]))
                    .map(|s| s.chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String, csv::Error> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Table => Ok(self.to_text()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(num(0.557_321_614_534_427_2), "0.557321615");
        assert_eq!(num(49.03325), "49.03325");
        assert_eq!(num(1.0 / 3.0), "0.333333333");
        assert_eq!(num(123_456_789_012.0), "1.23456789e11");
        assert_eq!(num(123_456_789.4), "123456789");
        assert_eq!(num(1.25e-7), "1.25e-7");
        assert_eq!(num(8.160_245_955_587e-8), "8.16024596e-8");
        assert_eq!(num(-2.5), "-2.5");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-1e-30 * 0.0), "0");
        assert_eq!(num(f64::INFINITY), "inf");
    }

    #[test]
    fn significant_rounding() {
        assert_eq!(sig(1.2 / 0.142, 3), "8.45");
        assert_eq!(sig(0.659_167_373, 3), "0.659");
        assert_eq!(sig(1234.7, 2), "1235");
    }

    #[test]
    fn csv_and_text_layouts() {
        let mut t = Table::new(["a", "long_name"]);
        t.push(["1", "2"]);
        assert_eq!(t.to_csv().unwrap(), "a,long_name\n1,2\n");
        assert_eq!(t.to_text(), "a  long_name\n1          2\n");
        assert_eq!(Table::default().to_csv().unwrap(), "");
        assert_eq!(Table::default().to_text(), "");
    }
}
