//! CSV emission: comma separated, LF line endings, header row, floats with
//! 9 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// `printf("%.9g")`.
pub fn fmt_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..9).contains(&exp) {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mant}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    strip_zeros(&format!("{x:.decimals$}")).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Default)]
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Self {
            buf: String::new(),
            columns: header.len(),
        };
        c.buf.push_str(&header.join(","));
        c.buf.push('\n');
        c
    }

    pub fn row(&mut self, cells: &[Cell]) {
        debug_assert_eq!(cells.len(), self.columns);
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match c {
                Cell::F(x) => self.buf.push_str(&fmt_g9(*x)),
                Cell::S(s) => self.buf.push_str(s),
                Cell::I(n) => {
                    let _ = write!(self.buf, "{n}");
                }
            }
        }
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, &self.buf)
            .map_err(|e| crate::Error::Io(format!("{}: {e}", path.display())))
    }
}

pub enum Cell<'a> {
    F(f64),
    I(i64),
    S(&'a str),
}
