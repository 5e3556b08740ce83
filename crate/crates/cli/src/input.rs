//! Point files: one point per line, comma or whitespace separated.

use std::fmt::Write as _;

use boxclust::PointSet64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Ws,
}

impl Format {
    fn split(self, line: &str) -> Vec<&str> {
        match self {
            Format::Csv => line.split(',').map(str::trim).collect(),
            Format::Ws => line.split_whitespace().collect(),
        }
    }

    pub fn sep(self) -> char {
        match self {
            Format::Csv => ',',
            Format::Ws => ' ',
        }
    }
}

/// A parse failure tied to a 1-based line number.
#[derive(Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ParseError {}

/// Parses a point file. Blank lines are skipped; a first record that is not
/// all numbers is taken as a header. The dimension comes from the first
/// data record. No records at all gives an empty planar set.
pub fn parse_points(text: &str, format: Format) -> Result<PointSet64, ParseError> {
    let mut dim = 0;
    let mut coords = Vec::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields = format.split(line);
        let values: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let was_first = std::mem::replace(&mut first, false);
        let values = match values {
            Ok(v) => v,
            Err(_) if was_first => continue,
            Err(_) => {
                let bad = fields.iter().find(|f| f.parse::<f64>().is_err()).copied().unwrap_or("");
                return Err(ParseError { line: i + 1, msg: format!("not a number: {bad:?}") });
            }
        };
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(ParseError { line: i + 1, msg: format!("non-finite value in column {}", k + 1) });
        }
        if dim == 0 {
            dim = values.len();
        } else if values.len() != dim {
            return Err(ParseError { line: i + 1, msg: format!("expected {dim} values, found {}", values.len()) });
        }
        coords.extend(values);
    }
    let dim = if dim == 0 { 2 } else { dim };
    PointSet64::from_flat(dim, coords).map_err(|e| ParseError { line: 0, msg: e.to_string() })
}

/// Points with shortest round-trip formatting.
pub fn format_points(ps: &PointSet64, format: Format) -> String {
    let mut s = String::new();
    for p in ps.iter() {
        for (k, v) in p.iter().enumerate() {
            if k > 0 {
                s.push(format.sep());
            }
            write!(s, "{v}").expect("string write");
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_blank_lines() {
        let ps = parse_points("x,y\n\n1,2\n3.5, -4\n", Format::Csv).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.point(1), &[3.5, -4.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_points("1 2\n3 4 5\n", Format::Ws).unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_points("1,2\n3,oops\n", Format::Csv).unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_points("a,b\n1,inf\n", Format::Csv).unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn empty_input() {
        assert!(parse_points("", Format::Csv).unwrap().is_empty());
        assert!(parse_points("x,y\n", Format::Csv).unwrap().is_empty());
    }

    #[test]
    fn round_trip_is_lossless() {
        let ps = PointSet64::from_xy(&[(0.1 + 0.2, 1e-300), (-7.0, 1.0 / 3.0)]);
        for f in [Format::Csv, Format::Ws] {
            assert_eq!(parse_points(&format_points(&ps, f), f).unwrap(), ps);
        }
    }
}
