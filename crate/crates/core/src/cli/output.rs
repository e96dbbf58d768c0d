use std::fmt::Write as _;

use crate::measures::Direction;

/// One reported number. Every row carries a direction tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub direction: Direction,
    pub unit: &'static str,
    pub note: Option<String>,
    /// Set for pass/fail rows; the value is then 1 or 0.
    pub verdict: Option<bool>,
}

impl Row {
    pub fn bits(label: impl Into<String>, value: f64, direction: Direction) -> Self {
        Row {
            label: label.into(),
            value,
            lower: None,
            upper: None,
            direction,
            unit: "bits",
            note: None,
            verdict: None,
        }
    }

    pub fn unitless(label: impl Into<String>, value: f64, direction: Direction) -> Self {
        Row {
            unit: "",
            ..Row::bits(label, value, direction)
        }
    }

    pub fn verdict(label: impl Into<String>, pass: bool) -> Self {
        Row {
            verdict: Some(pass),
            ..Row::unitless(label, if pass { 1.0 } else { 0.0 }, Direction::Exact)
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn interval(mut self, lower: f64, upper: f64) -> Self {
        self.lower = Some(lower);
        self.upper = Some(upper);
        self
    }

    pub fn text(&self) -> String {
        if let Some(pass) = self.verdict {
            let mut s = format!("{}: {}", self.label, if pass { "PASS" } else { "FAIL" });
            if let Some(n) = &self.note {
                let _ = write!(s, " ({n})");
            }
            return s;
        }
        let mut s = format!("{}: {}", self.label, fixed6(self.value));
        if !self.unit.is_empty() {
            s.push(' ');
            s.push_str(self.unit);
        }
        s.push_str(" (");
        s.push_str(self.direction.tag());
        if let Some(n) = &self.note {
            s.push_str(", ");
            s.push_str(n);
        }
        s.push(')');
        if let (Some(l), Some(u)) = (self.lower, self.upper) {
            let _ = write!(s, " in [{}, {}]", fixed6(l), fixed6(u));
        }
        s
    }
}

/// Six decimals without a negative sign on values that round to zero.
pub fn fixed6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Seventeen significant digits, trailing zeros trimmed, in the style of
/// `%.17g`.
pub fn format_sig17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mant.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Text report: header lines, one line per row, footer lines.
pub fn render_text(header: &[String], rows: &[Row], footer: &[String]) -> String {
    let mut s = String::new();
    for l in header.iter() {
        s.push_str(l);
        s.push('\n');
    }
    for r in rows {
        s.push_str(&r.text());
        s.push('\n');
    }
    for l in footer {
        s.push_str(l);
        s.push('\n');
    }
    s
}

/// CSV with header `label,value,lower,upper,direction,seed`.
pub fn render_csv(rows: &[Row], seed: u64) -> String {
    let mut s = String::from("label,value,lower,upper,direction,seed\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            csv_field(r.label.trim()),
            format_sig17(r.value),
            opt_sig17(r.lower),
            opt_sig17(r.upper),
            r.direction.tag(),
            seed
        );
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn opt_sig17(v: Option<f64>) -> String {
    v.map(format_sig17).unwrap_or_default()
}
