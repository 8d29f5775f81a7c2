//! Plain-text measure blocks.
//!
//! ```text
//! domain 0 1
//! atom 0.5 0.25
//! piece 0 0.5 1.5 0 0 0
//! ```
//!
//! `piece a b c0 c1 c2 c3` describes the density `c0 + c1 x + c2 x² + c3 x³`
//! on `[a, b)` in the absolute coordinate `x`. Higher-degree densities append
//! further coefficients. The `domain` line is optional; without it the domain
//! is the hull of the support. Blank lines and `#` comments are ignored.

use super::{Atom, Interval, MixedMeasure, Piece, Poly};
use crate::error::{Error, Result};

/// Parses a measure block; `first_line` offsets reported line numbers.
pub fn parse_measure(text: &str, first_line: usize) -> Result<MixedMeasure> {
    let mut domain = None;
    let mut atoms = Vec::new();
    let mut pieces = Vec::new();
    let mut last_line = first_line;
    for (i, raw) in text.lines().enumerate() {
        let line_no = first_line + i;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        last_line = line_no;
        let mut words = line.split_whitespace();
        let keyword = words.next().unwrap_or("");
        let nums = numbers(words, line_no)?;
        match keyword {
            "domain" => {
                if nums.len() != 2 {
                    return Err(Error::parse(line_no, "domain takes <lo> <hi>"));
                }
                domain = Some(Interval::new(nums[0], nums[1]).map_err(|e| Error::parse(line_no, e.to_string()))?);
            }
            "atom" => {
                if nums.len() != 2 {
                    return Err(Error::parse(line_no, "atom takes <location> <weight>"));
                }
                atoms.push(Atom {
                    loc: nums[0],
                    weight: nums[1],
                });
            }
            "piece" => {
                if nums.len() < 3 {
                    return Err(Error::parse(line_no, "piece takes <a> <b> <c0> [c1 c2 c3 ...]"));
                }
                if nums[1] <= nums[0] {
                    return Err(Error::parse(line_no, "piece needs a < b"));
                }
                pieces.push(Piece::new(nums[0], nums[1], Poly::new(nums[2..].to_vec())));
            }
            other => return Err(Error::parse(line_no, format!("unknown measure keyword `{other}`"))),
        }
    }
    let domain = match domain {
        Some(d) => d,
        None => {
            let lo = atoms
                .iter()
                .map(|a: &Atom| a.loc)
                .chain(pieces.iter().map(|p: &Piece| p.lo))
                .fold(f64::INFINITY, f64::min);
            let hi = atoms
                .iter()
                .map(|a| a.loc)
                .chain(pieces.iter().map(|p| p.hi))
                .fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() {
                return Err(Error::parse(last_line, "empty measure block"));
            }
            Interval { lo, hi }
        }
    };
    MixedMeasure::new(domain, atoms, pieces).map_err(|e| Error::parse(last_line, e.to_string()))
}

pub(crate) fn numbers<'a>(words: impl Iterator<Item = &'a str>, line_no: usize) -> Result<Vec<f64>> {
    words
        .map(|w| {
            w.parse::<f64>()
                .map_err(|_| Error::parse(line_no, format!("`{w}` is not a number")))
        })
        .collect()
}

/// Writes a measure block; values use the shortest round-trip decimal form.
pub fn format_measure(m: &MixedMeasure) -> String {
    let mut out = format!("domain {} {}\n", m.domain().lo, m.domain().hi);
    for a in m.atoms() {
        out.push_str(&format!("atom {} {}\n", a.loc, a.weight));
    }
    for p in m.pieces() {
        let mut c = p.density.coeffs().to_vec();
        c.resize(c.len().max(4), 0.0);
        let coeffs: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("piece {} {} {}\n", p.lo, p.hi, coeffs.join(" ")));
    }
    out
}
