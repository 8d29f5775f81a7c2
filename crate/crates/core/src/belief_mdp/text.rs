//! Plain-text model files.
//!
//! ```text
//! dims 2 1 2        # states actions observations
//! T                 # one block of |X| rows per action
//! 0.9 0.1
//! 0.2 0.8
//! Q
//! 0.8 0.2
//! 0.3 0.7
//! c
//! 0
//! 1
//! beta 0.9
//! ```

use super::FiniteModel;
use crate::error::{Error, Result};
use crate::measures::text::numbers;

struct Lines<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, first_line: usize) -> Self {
        let inner = text
            .lines()
            .enumerate()
            .map(move |(i, l)| (first_line + i, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        Lines {
            inner: Box::new(inner),
            last: first_line,
        }
    }

    fn next(&mut self, expected: &str) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n;
                Ok((n, l))
            }
            None => Err(Error::parse(self.last, format!("unexpected end of model, expected {expected}"))),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<Vec<f64>> {
        let (n, l) = self.next(word)?;
        let mut words = l.split_whitespace();
        if words.next() != Some(word) {
            return Err(Error::parse(n, format!("expected `{word}`, found `{l}`")));
        }
        numbers(words, n)
    }

    fn rows(&mut self, count: usize, width: usize, what: &str) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, l) = self.next(what)?;
            let row = numbers(l.split_whitespace(), n)?;
            if row.len() != width {
                return Err(Error::parse(n, format!("{what} row needs {width} entries, found {}", row.len())));
            }
            out.push(row);
        }
        Ok(out)
    }
}

fn count(v: f64, line: usize) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e6 {
        Ok(v as usize)
    } else {
        Err(Error::parse(line, format!("dimension {v} is not a positive integer")))
    }
}

/// Parses and validates a model file.
pub fn parse_model(text: &str, first_line: usize) -> Result<FiniteModel> {
    let mut lines = Lines::new(text, first_line);
    let dims = lines.keyword("dims")?;
    let dims_line = lines.last;
    if dims.len() != 3 {
        return Err(Error::parse(dims_line, "`dims` takes three counts"));
    }
    let nx = count(dims[0], dims_line)?;
    let nu = count(dims[1], dims_line)?;
    let ny = count(dims[2], dims_line)?;
    lines.keyword("T")?;
    let mut t = Vec::with_capacity(nu);
    for _ in 0..nu {
        t.push(lines.rows(nx, nx, "transition")?);
    }
    lines.keyword("Q")?;
    let qm = lines.rows(nx, ny, "observation")?;
    lines.keyword("c")?;
    let c = lines.rows(nx, nu, "cost")?;
    let beta = lines.keyword("beta")?;
    let beta_line = lines.last;
    if beta.len() != 1 {
        return Err(Error::parse(beta_line, "`beta` takes one value"));
    }
    if let Some((n, l)) = lines.inner.next() {
        return Err(Error::parse(n, format!("trailing content `{l}`")));
    }
    FiniteModel::new(t, qm, c, beta[0]).map_err(|e| Error::parse(beta_line, e.to_string()))
}

pub fn format_model(m: &FiniteModel) -> String {
    let row = |r: &[f64]| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = format!("dims {} {} {}\nT\n", m.n_states(), m.n_actions(), m.n_observations());
    for tu in &m.t {
        for r in tu {
            out += &row(r);
            out.push('\n');
        }
    }
    out += "Q\n";
    for r in &m.qm {
        out += &row(r);
        out.push('\n');
    }
    out += "c\n";
    for r in &m.c {
        out += &row(r);
        out.push('\n');
    }
    out += &format!("beta {}\n", m.beta);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "dims 2 1 2\nT\n0.9 0.1\n0.2 0.8\nQ\n0.8 0.2\n0.3 0.7\nc\n0\n1\nbeta 0.9\n";

    #[test]
    fn round_trip() {
        let m = parse_model(SAMPLE, 1).unwrap();
        assert_eq!(m.t[0][1], vec![0.2, 0.8]);
        assert_eq!(m.c, vec![vec![0.0], vec![1.0]]);
        assert_eq!(parse_model(&format_model(&m), 1).unwrap(), m);
    }

    #[test]
    fn errors_name_the_line() {
        let bad = SAMPLE.replace("0.3 0.7", "0.3");
        match parse_model(&bad, 1) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
        let not_stochastic = SAMPLE.replace("0.2 0.8", "0.2 0.7");
        assert!(matches!(parse_model(&not_stochastic, 1), Err(Error::Parse { .. })));
    }
}
