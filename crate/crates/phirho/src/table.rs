//! Point and curve CSV files.
//!
//! Point rows carry exact rational strings next to their 17-significant-digit
//! decimals; re-reading a file and recomputing the verdicts must reproduce
//! every string.

use std::io::{Read, Write};

use phirho_core::bounds::{check_lower, check_upper, Curve, CurveSample, RegionPoint, Verdict, PRECISION_NOTE};
use phirho_core::Rational;
use serde::{Deserialize, Serialize};

use crate::formats::{parse_rational, FormatError};

/// Positional decimal with 17 significant digits, `-0` normalized to `0`.
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = mantissa.strip_prefix('-').map_or(("", mantissa), |m| ("-", m));
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else if exp as usize + 1 >= digits.len() {
        format!("{}{}", digits, "0".repeat(exp as usize + 1 - digits.len()))
    } else {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRow {
    pub label: String,
    pub phi: String,
    pub rho: String,
    pub phi_float: String,
    pub rho_float: String,
    pub upper_eq: bool,
    pub lower_eq: bool,
}

impl PointRow {
    pub fn from_point(pt: &RegionPoint) -> Self {
        PointRow {
            label: pt.label.clone(),
            phi: pt.phi().to_string(),
            rho: pt.rho().to_string(),
            phi_float: sig17(pt.phi().to_f64()),
            rho_float: sig17(pt.rho().to_f64()),
            upper_eq: check_upper(pt) == Verdict::Equality,
            lower_eq: check_lower(pt) == Verdict::Equality,
        }
    }

    /// Parses the exact columns back into a point.
    pub fn point(&self, origin: &str) -> Result<RegionPoint, FormatError> {
        let phi: Rational = parse_rational(origin, "phi", &self.phi)?;
        let rho: Rational = parse_rational(origin, "rho", &self.rho)?;
        RegionPoint::new(phi, rho, self.label.clone()).map_err(|e| FormatError::field(origin, "phi/rho", e))
    }

    /// Recomputes the row from its exact columns.
    pub fn reverify(&self, origin: &str) -> Result<PointRow, FormatError> {
        Ok(PointRow::from_point(&self.point(origin)?))
    }
}

fn csv_error(origin: &str, e: csv::Error) -> FormatError {
    let line = e.position().map_or(0, |p| p.line());
    let field = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => {
            err.field().map_or_else(String::new, |f| format!("column {}", f + 1))
        }
        _ => String::new(),
    };
    FormatError::Csv { origin: origin.into(), line, field, message: e.to_string() }
}

pub fn write_points<W: Write>(out: W, rows: &[PointRow]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| csv_error("points", e))?;
    }
    w.flush().map_err(|e| FormatError::Io { path: "points".into(), source: e })
}

pub fn read_points<R: Read>(input: R, origin: &str) -> Result<Vec<PointRow>, FormatError> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(|e| csv_error(origin, e))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRow {
    pub curve: String,
    pub x: String,
    pub y: String,
}

impl From<&CurveSample> for CurveRow {
    fn from(s: &CurveSample) -> Self {
        CurveRow { curve: s.curve.name().into(), x: sig17(s.x), y: sig17(s.y) }
    }
}

impl CurveRow {
    pub fn parse(&self, origin: &str) -> Result<(Curve, f64, f64), FormatError> {
        let curve = self.curve.parse().map_err(|e| FormatError::field(origin, "curve", e))?;
        let num = |name: &str, t: &str| t.parse::<f64>().map_err(|e| FormatError::field(origin, name, e));
        Ok((curve, num("x", &self.x)?, num("y", &self.y)?))
    }
}

pub fn write_curves<W: Write>(mut out: W, rows: &[CurveRow]) -> Result<(), FormatError> {
    let io = |e| FormatError::Io { path: "curves".into(), source: e };
    writeln!(out, "# precision: {PRECISION_NOTE}").map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| csv_error("curves", e))?;
    }
    w.flush().map_err(io)
}

pub fn read_curves<R: Read>(input: R, origin: &str) -> Result<Vec<CurveRow>, FormatError> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input)
        .deserialize()
        .map(|r| r.map_err(|e| csv_error(origin, e)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use phirho_core::bounds::sample_curve;
    use phirho_core::q;

    #[test]
    fn sig17_is_positional() {
        assert_eq!(sig17(0.5), "0.50000000000000000");
        assert_eq!(sig17(-0.40625), "-0.40625000000000000");
        assert_eq!(sig17(1.0), "1.0000000000000000");
        assert_eq!(sig17(-0.0), "0");
        assert_eq!(sig17(1e-3), "0.0010000000000000000");
        assert_eq!(sig17(123.0), "123.00000000000000");
        for x in [1.0 / 3.0, -0.252680, 2.0f64.sqrt(), 1e-12, 0.1] {
            assert_eq!(sig17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn points_round_trip() {
        let pts = [
            RegionPoint::new(q(-5, 16), q(-13, 32), "4 7 8 1 6 5 2 3").unwrap(),
            RegionPoint::new(q(1, 1), q(1, 1), "1 2").unwrap(),
            RegionPoint::new(q(-1, 2), q(-1, 1), "2 1").unwrap(),
        ];
        let rows: Vec<PointRow> = pts.iter().map(PointRow::from_point).collect();
        let mut buf = Vec::new();
        write_points(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("label,phi,rho,phi_float,rho_float,upper_eq,lower_eq\n"), "{text}");
        let back = read_points(&buf[..], "t").unwrap();
        assert_eq!(back, rows);
        for row in &back {
            assert_eq!(&row.reverify("t").unwrap(), row);
        }
        assert!(rows[1].upper_eq && rows[1].lower_eq);
        assert!(!rows[2].upper_eq && rows[2].lower_eq);
    }

    #[test]
    fn curves_round_trip() {
        let rows: Vec<CurveRow> = sample_curve(Curve::Upper, 3).iter().map(CurveRow::from).collect();
        assert_eq!(rows[1].y, sig17(0.625));
        let mut buf = Vec::new();
        write_curves(&mut buf, &rows).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("# precision"));
        let back = read_curves(&buf[..], "t").unwrap();
        assert_eq!(back, rows);
        for row in &back {
            let (curve, x, y) = row.parse("t").unwrap();
            assert_eq!(CurveRow { curve: curve.name().into(), x: sig17(x), y: sig17(y) }, *row);
        }
    }

    #[test]
    fn bad_rows_name_line_and_field() {
        let text = "label,phi,rho,phi_float,rho_float,upper_eq,lower_eq\na,1/2,1/2,0.5,0.5,false,false\nb,1/2,1/2,0.5,0.5,maybe,false\n";
        let e = read_points(text.as_bytes(), "p.csv").unwrap_err();
        assert!(matches!(e, FormatError::Csv { line: 3, .. }), "{e}");
        let row = PointRow {
            phi: "x".into(),
            ..read_points(&text.as_bytes()[..text.find("\nb").unwrap() + 1], "p").unwrap()[0].clone()
        };
        assert!(row.reverify("p").unwrap_err().to_string().contains("`phi`"));
    }
}
