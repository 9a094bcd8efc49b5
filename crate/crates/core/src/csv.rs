//! CSV writing with C-style `%.12g` number formatting and LF line endings.

use std::fmt::Write as _;

use crate::grid::TriangleField;

/// Formats like C's `printf("%.12g", x)`.
pub fn fmt_g(x: f64) -> String {
    fmt_g_prec(x, 12)
}

pub fn fmt_g_prec(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let p = precision.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= p as i32 {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Accumulates rows into a CSV document.
#[derive(Debug, Default, Clone)]
pub struct CsvWriter {
    buf: String,
}

impl CsvWriter {
    pub fn with_header(columns: &[&str]) -> Self {
        let mut w = Self::default();
        w.raw_row(columns.iter().copied());
        w
    }

    pub fn raw_row<'a, I: IntoIterator<Item = &'a str>>(&mut self, cells: I) {
        let mut first = true;
        for c in cells {
            if !first {
                self.buf.push(',');
            }
            first = false;
            self.buf.push_str(c);
        }
        self.buf.push('\n');
    }

    pub fn row(&mut self, cells: &[String]) {
        self.raw_row(cells.iter().map(String::as_str));
    }

    pub fn numbers(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| fmt_g(v)).collect();
        self.row(&cells);
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Matrix layout: a header of maturities, then one row per `t` with empty
/// cells below the diagonal.
pub fn triangle_csv(field: &TriangleField) -> String {
    let grid = field.grid();
    let m = grid.points();
    let mut out = String::from("t");
    for j in 0..m {
        let _ = write!(out, ",{}", fmt_g(grid.time(j)));
    }
    out.push('\n');
    for i in 0..m {
        out.push_str(&fmt_g(grid.time(i)));
        for j in 0..m {
            out.push(',');
            if j >= i {
                out.push_str(&fmt_g(field.get(i, j)));
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (1.0, "1"),
            (0.1, "0.1"),
            (1e-4, "0.0001"),
            (1e-5, "1e-05"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (-2.5, "-2.5"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0 / 3.0, "0.666666666667"),
            (999999999999.5, "1e+12"),
            (1e100, "1e+100"),
            (f64::INFINITY, "inf"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_g(x), s, "{x}");
        }
    }

    #[test]
    fn triangle_has_empty_lower_cells() {
        let f = TriangleField::filled(GridSpec::new(1.0, 2), 1.5);
        assert_eq!(triangle_csv(&f), "t,0,0.5,1\n0,1.5,1.5,1.5\n0.5,,1.5,1.5\n1,,,1.5\n");
    }
}
