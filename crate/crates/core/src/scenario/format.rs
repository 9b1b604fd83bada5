//! Number formatting and CSV output.

use crate::classical::PayoffPolynomial;

const SIGNIFICANT_DIGITS: i32 = 12;
const MAX_DENOMINATOR: i64 = 64;
const FRACTION_TOLERANCE: f64 = 1e-12;

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros
/// dropped, scientific notation only for very large or small magnitudes.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `(p, q)` with `q <= 64` and `|v - p/q| <= 1e-12`, smallest `q` first.
pub fn as_fraction(v: f64) -> Option<(i64, i64)> {
    if !v.is_finite() || v.abs() > 1e12 {
        return None;
    }
    (1..=MAX_DENOMINATOR).find_map(|q| {
        let p = (v * q as f64).round();
        ((v - p / q as f64).abs() <= FRACTION_TOLERANCE).then_some((p as i64, q))
    })
}

/// Decimal form, followed by the fraction when `v` is a non-integer
/// rational with a small denominator: `1.33333333333 (4/3)`.
pub fn fmt_value(v: f64) -> String {
    match as_fraction(v) {
        Some((p, q)) if q > 1 => format!("{} ({p}/{q})", fmt_num(v)),
        _ => fmt_num(v),
    }
}

/// The fraction alone when there is one, otherwise the decimal.
pub fn fmt_exact(v: f64) -> String {
    match as_fraction(v) {
        Some((p, 1)) => p.to_string(),
        Some((p, q)) => format!("{p}/{q}"),
        None => fmt_num(v),
    }
}

/// Renders `1 + 3α - 3α^2`, skipping zero coefficients.
pub fn fmt_polynomial(poly: &PayoffPolynomial) -> String {
    let mut out = String::new();
    for (j, &c) in poly.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let magnitude = fmt_exact(c.abs());
        let body = match j {
            0 => magnitude,
            _ => {
                let coef = match magnitude.as_str() {
                    "1" => String::new(),
                    m if m.contains('/') => format!("({m})"),
                    _ => magnitude,
                };
                let power = if j == 1 { String::new() } else { format!("^{j}") };
                format!("{coef}α{power}")
            }
        };
        if out.is_empty() {
            if c < 0.0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0.0 { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Int(u64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(n) => n.to_string(),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

/// A header row plus data rows of the same width.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    /// Column-aligned plain text.
    pub fn render_text(&self) -> String {
        let cells: Vec<Vec<String>> = std::iter::once(self.header.clone())
            .chain(self.rows.iter().map(|r| r.iter().map(Cell::render).collect()))
            .collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row.iter().zip(&widths).map(|(s, &w)| format!("{s:<w$}")).collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// RFC 4180 CSV: header first, `\n` line endings, 12 significant digits.
pub fn emit_csv(table: &Table) -> String {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    writer.write_record(&table.header).expect("in-memory write");
    for row in &table.rows {
        writer.write_record(row.iter().map(Cell::render)).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
