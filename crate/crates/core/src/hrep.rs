//! The `.hrep` text format: UTF-8, `#` comment lines, a header `m n`,
//! then `m` lines of `n + 1` whitespace-separated numbers
//! `a_i1 ... a_in b_i`. Integers, plain decimals, and `p/q` rationals are
//! accepted; entries parse exactly, and exactness survives loading when
//! normalization needs only rational scaling.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use thiserror::Error;

use crate::numerics::{Matrix, NumericsError};
use crate::polytope::{HRepresentation, PolytopeError};

#[derive(Debug, Clone, Error)]
pub enum HrepError {
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("dimension error: need m > n >= 2, got m={m}, n={n}")]
    Dimension { m: usize, n: usize },
    #[error("row {0} is a zero vector and has no constraint direction")]
    ZeroRow(usize),
}

fn parse_error(line: usize, reason: impl Into<String>) -> HrepError {
    HrepError::Parse { line, reason: reason.into() }
}

/// Parses one number token: integer, `p/q` rational, or plain decimal.
fn parse_number(token: &str) -> Option<BigRational> {
    if let Some((num, den)) = token.split_once('/') {
        let p: BigInt = num.parse().ok()?;
        let q: BigInt = den.parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int_part, frac_part)) = token.split_once('.') {
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['+', '-']);
        if !int_digits.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || (int_digits.is_empty() && frac_part.is_empty())
        {
            return None;
        }
        let int_value: BigInt =
            if int_digits.is_empty() { BigInt::zero() } else { int_digits.parse().ok()? };
        let frac_value: BigInt =
            if frac_part.is_empty() { BigInt::zero() } else { frac_part.parse().ok()? };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let magnitude = int_value * &scale + frac_value;
        let signed = if negative { -magnitude } else { magnitude };
        return Some(BigRational::new(signed, scale));
    }
    let value: BigInt = token.parse().ok()?;
    Some(BigRational::from_integer(value))
}

/// Parses `.hrep` text into a normalized H-representation.
pub fn parse_hrep(text: &str) -> Result<HRepresentation, HrepError> {
    let mut data_lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = data_lines
        .next()
        .ok_or_else(|| parse_error(0, "empty input: expected a header line `m n`"))?;
    let header_tokens: Vec<&str> = header.split_whitespace().collect();
    if header_tokens.len() != 2 {
        return Err(parse_error(header_line, "header must be two integers `m n`"));
    }
    let m: usize = header_tokens[0]
        .parse()
        .map_err(|_| parse_error(header_line, format!("bad row count {:?}", header_tokens[0])))?;
    let n: usize = header_tokens[1]
        .parse()
        .map_err(|_| parse_error(header_line, format!("bad column count {:?}", header_tokens[1])))?;
    if !(m > n && n >= 2) {
        return Err(HrepError::Dimension { m, n });
    }

    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut offsets: Vec<f64> = Vec::with_capacity(m);
    for _ in 0..m {
        let (line_no, line) = data_lines
            .next()
            .ok_or_else(|| parse_error(0, format!("expected {m} constraint rows")))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != n + 1 {
            return Err(parse_error(
                line_no,
                format!("expected {} values, found {}", n + 1, tokens.len()),
            ));
        }
        let mut row = Vec::with_capacity(n + 1);
        for token in &tokens {
            let value = parse_number(token)
                .ok_or_else(|| parse_error(line_no, format!("bad number {token:?}")))?;
            row.push(value);
        }
        let b = row.pop().expect("n + 1 values");
        offsets.push(b.to_f64().ok_or_else(|| parse_error(line_no, "offset overflows f64"))?);
        rows.push(row);
    }
    if let Some((line_no, _)) = data_lines.next() {
        return Err(parse_error(line_no, "unexpected content after the last constraint row"));
    }

    HRepresentation::new(Matrix::from_rational_rows(rows), offsets).map_err(|e| match e {
        PolytopeError::ZeroRow(i) => HrepError::ZeroRow(i),
        PolytopeError::InvalidShape { m, n } => HrepError::Dimension { m, n },
        other => parse_error(0, other.to_string()),
    })
}

impl From<NumericsError> for HrepError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::ZeroRow(i) => HrepError::ZeroRow(i),
            other => parse_error(0, other.to_string()),
        }
    }
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serializes a normalized H-representation back to `.hrep` text. Exact
/// entries are written as integers or `p/q`; floating entries use the
/// shortest decimal that round-trips.
pub fn write_hrep(h: &HRepresentation) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", h.m(), h.n()));
    for i in 0..h.m() {
        let mut fields: Vec<String> = (0..h.n())
            .map(|j| match h.matrix().exact_entry(i, j) {
                Some(r) => format_rational(r),
                None => h.matrix().get(i, j).to_string(),
            })
            .collect();
        fields.push(h.offsets()[i].to_string());
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    const SQUARE: &str = "\
# unit square
4 2
1 0 1
-1 0 1
0 1 1
0 -1 1
";

    #[test]
    fn parses_the_square() {
        let h = parse_hrep(SQUARE).unwrap();
        assert_eq!((h.m(), h.n()), (4, 2));
        assert!(h.matrix().is_exact());
        assert_eq!(h.matrix().row(0), &[1.0, 0.0]);
        assert_eq!(h.offsets(), &[1.0; 4]);
    }

    #[test]
    fn parses_rationals_and_decimals() {
        let text = "3 2\n3/5 4/5 1\n-0.6 0.8 2.5\n0 -1 1/2\n";
        let h = parse_hrep(text).unwrap();
        assert!(h.matrix().is_exact(), "3-4-5 rows scale rationally");
        assert_eq!(h.matrix().row(0), &[0.6, 0.8]);
        assert_eq!(h.matrix().row(1), &[-0.6, 0.8]);
        assert_eq!(h.offsets()[2], 0.5);
    }

    #[test]
    fn rejects_wrong_arity_rows() {
        let text = "3 2\n1 0 1\n0 1 1 7\n0 -1 1\n";
        match parse_hrep(text).unwrap_err() {
            HrepError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn rejects_square_systems() {
        let text = "2 2\n1 0 1\n0 1 1\n";
        assert!(matches!(parse_hrep(text).unwrap_err(), HrepError::Dimension { m: 2, n: 2 }));
    }

    #[test]
    fn rejects_bad_tokens_and_zero_rows() {
        let text = "3 2\n1 0 1\nx 1 1\n0 -1 1\n";
        assert!(matches!(parse_hrep(text).unwrap_err(), HrepError::Parse { line: 3, .. }));

        let text = "3 2\n1 0 1\n0 0 1\n0 -1 1\n";
        assert!(matches!(parse_hrep(text).unwrap_err(), HrepError::ZeroRow(1)));
    }

    #[test]
    fn rejects_trailing_rows() {
        let text = "3 2\n1 0 1\n0 1 1\n0 -1 1\n1 1 1\n";
        assert!(matches!(parse_hrep(text).unwrap_err(), HrepError::Parse { line: 5, .. }));
    }

    #[test]
    fn roundtrip_exact_and_float() {
        let h = generators::hypercube(3);
        let text = write_hrep(&h);
        let back = parse_hrep(&text).unwrap();
        for i in 0..h.m() {
            assert_eq!(h.matrix().row(i), back.matrix().row(i));
        }
        assert_eq!(h.offsets(), back.offsets());

        let h = generators::random_tangent(8, 2, 7).unwrap();
        let back = parse_hrep(&write_hrep(&h)).unwrap();
        for i in 0..h.m() {
            for j in 0..h.n() {
                assert!((h.matrix().get(i, j) - back.matrix().get(i, j)).abs() <= 1e-15);
            }
            assert!((h.offsets()[i] - back.offsets()[i]).abs() <= 1e-15);
        }
    }

    #[test]
    fn number_grammar() {
        assert_eq!(parse_number("-42").unwrap(), BigRational::from_integer((-42).into()));
        assert_eq!(parse_number("7/2").unwrap().to_f64().unwrap(), 3.5);
        assert_eq!(parse_number("-0.25").unwrap().to_f64().unwrap(), -0.25);
        assert_eq!(parse_number(".5").unwrap().to_f64().unwrap(), 0.5);
        assert_eq!(parse_number("5.").unwrap().to_f64().unwrap(), 5.0);
        assert!(parse_number("1/0").is_none());
        assert!(parse_number("1e3").is_none());
        assert!(parse_number("one").is_none());
    }
}
