//! Lattice and code files.
//!
//! Lattices are stored either as JSON `{"n": 2, "basis": [["1", "1/2"], ...]}`
//! or as plain text, one basis row per line with whitespace-separated
//! entries (integers, `p/q` fractions or exact decimals such as `0.125` or
//! `-1.5e-3`); `#` starts a comment. Codes are JSON
//! `{"m": 4, "n": 3, "generators": [[1, 2, 3], ...]}`.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::lattice::Lattice;

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    n: usize,
    basis: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct CodeJson {
    m: u64,
    n: usize,
    generators: Vec<Vec<i64>>,
}

fn parse_error(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

/// Parses an exact rational: integer, `p/q`, or decimal with optional exponent.
pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let q: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| format!("bad exponent in {s:?}"))?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(format!("not a number: {s:?}"));
    }
    let num: BigInt = format!("{int}{frac}").parse().map_err(|_| format!("not a number: {s:?}"))?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn rows_to_lattice(rows: Vec<Vec<BigRational>>, location: &str) -> Result<Lattice> {
    let n = rows.len();
    if n == 0 {
        return Err(parse_error(location, "empty basis"));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(parse_error(format!("{location}, row {}", i + 1), format!("expected {n} entries, found {}", r.len())));
    }
    Lattice::new(rows).map_err(|e| parse_error(location, e.to_string()))
}

pub fn lattice_to_json(lat: &Lattice) -> String {
    let doc = LatticeJson { n: lat.dim(), basis: lat.basis().iter().map(|r| r.iter().map(format_rational).collect()).collect() };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn lattice_from_json(text: &str) -> Result<Lattice> {
    let doc: LatticeJson =
        serde_json::from_str(text).map_err(|e| parse_error(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    let mut rows = Vec::with_capacity(doc.basis.len());
    for (i, row) in doc.basis.iter().enumerate() {
        let parsed = row
            .iter()
            .enumerate()
            .map(|(j, s)| parse_rational(s).map_err(|m| parse_error(format!("basis[{i}][{j}]"), m)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(parsed);
    }
    if rows.len() != doc.n {
        return Err(parse_error("n", format!("n = {} but basis has {} rows", doc.n, rows.len())));
    }
    rows_to_lattice(rows, "basis")
}

pub fn lattice_to_text(lat: &Lattice) -> String {
    let mut out = String::new();
    for row in lat.basis() {
        out.push_str(&row.iter().map(format_rational).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

pub fn lattice_from_text(text: &str) -> Result<Lattice> {
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        let mut col = 0;
        for tok in content.split_whitespace() {
            let at = content[col..].find(tok).map_or(col, |i| col + i);
            col = at + tok.len();
            row.push(parse_rational(tok).map_err(|m| parse_error(format!("line {}, column {}", ln + 1, at + 1), m))?);
        }
        rows.push(row);
    }
    rows_to_lattice(rows, "text")
}

/// JSON if the first non-blank character is `{`, plain text otherwise.
pub fn parse_lattice(text: &str) -> Result<Lattice> {
    if text.trim_start().starts_with('{') {
        lattice_from_json(text)
    } else {
        lattice_from_text(text)
    }
}

pub fn read_lattice(path: &Path) -> Result<Lattice> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_error(path.display().to_string(), e.to_string()))?;
    parse_lattice(&text).map_err(|e| match e {
        Error::Parse { location, message } => parse_error(format!("{}: {location}", path.display()), message),
        other => other,
    })
}

pub fn code_to_json(code: &LinearCode) -> String {
    let doc = CodeJson {
        m: code.modulus(),
        n: code.length(),
        generators: code.generators().iter().map(|g| g.iter().map(|&x| x as i64).collect()).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn code_from_json(text: &str) -> Result<LinearCode> {
    let doc: CodeJson =
        serde_json::from_str(text).map_err(|e| parse_error(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    LinearCode::from_signed(doc.m, doc.n, &doc.generators)
}
