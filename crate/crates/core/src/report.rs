//! Ratio records and CSV output.
//!
//! Floats are printed with 12 significant digits (ties to even), positional
//! for decimal exponents in `[-5, 12)` and scientific otherwise. Trailing zeros
//! are trimmed, so `2.0` prints as `2`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io;

pub const SIG_DIGITS: usize = 12;

pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let mut s = String::new();
        if exp < 0 {
            s.push_str("0.");
            s.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
            s.push_str(&digits);
        } else {
            let int_len = exp as usize + 1;
            s.push_str(&digits[..int_len]);
            s.push('.');
            s.push_str(&digits[int_len..]);
        }
        let s = trim_fraction(&s);
        format!("{sign}{s}")
    } else {
        let m = trim_fraction(&format!("{}.{}", &digits[..1], &digits[1..]));
        format!("{sign}{m}e{exp}")
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Outcome attached to a [`BoundReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    /// Compared against an expression with an unknown implied constant.
    Monitor,
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Monitor => "monitor",
            Status::NotApplicable => "not-applicable",
        })
    }
}

/// A computed quantity set against a bound expression.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lhs_value: f64,
    pub bound_value: f64,
    pub parameters: BTreeMap<String, String>,
    pub status: Status,
}

impl BoundReport {
    pub fn new(lhs_value: f64, bound_value: f64, status: Status) -> Self {
        Self {
            lhs_value,
            bound_value,
            parameters: BTreeMap::new(),
            status,
        }
    }

    pub fn not_applicable(reason: &str) -> Self {
        let mut r = Self::new(f64::NAN, f64::NAN, Status::NotApplicable);
        r.parameters.insert("reason".into(), reason.into());
        r
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }

    /// `lhs / bound`, or `None` when the bound is not positive.
    pub fn ratio(&self) -> Option<f64> {
        (self.bound_value > 0.0).then(|| self.lhs_value / self.bound_value)
    }
}

/// A header plus rows, written as UTF-8 CSV with LF endings. Fields must not
/// contain commas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        debug_assert!(row.iter().all(|f| !f.contains(',')));
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn write_to(&self, mut w: impl io::Write) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(2.0), "2");
        assert_eq!(fmt_sig(-0.5), "-0.5");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(5.8743), "5.8743");
        assert_eq!(fmt_sig(123456789012.0), "123456789012");
        assert_eq!(fmt_sig(1234567890123.0), "1.23456789012e12");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-7");
        assert_eq!(fmt_sig(0.00012), "0.00012");
        assert_eq!(fmt_sig(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
    }

    #[test]
    fn ties_round_to_even() {
        // exact binary values with the tie in the 13th digit
        assert_eq!(fmt_sig(100000000000.5), "100000000000");
        assert_eq!(fmt_sig(100000000001.5), "100000000002");
        assert_eq!(fmt_sig(-100000000003.5), "-100000000004");
    }

    #[test]
    fn ratio_only_for_positive_bound() {
        assert_eq!(BoundReport::new(3.0, 2.0, Status::Monitor).ratio(), Some(1.5));
        assert_eq!(BoundReport::new(3.0, 0.0, Status::Monitor).ratio(), None);
    }

    #[test]
    fn csv_layout() {
        let mut t = CsvTable::new(["a", "b"]);
        t.push(vec!["1".into(), "x".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,x\n");
    }
}
