//! Check rows, tables and their CSV / text renderings.

use std::fmt;
use std::path::Path;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Value printed in the source of the example.
    Paper,
    /// Value from an independent closed form or enumeration.
    Derived,
    /// Computed quantity reported without a target.
    Computed,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Paper => "PAPER",
            Provenance::Derived => "DERIVED",
            Provenance::Computed => "COMPUTED",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// A published figure disagrees with the computation; not an error.
    Flagged,
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Flagged => "FLAGGED",
            Status::Info => "INFO",
        })
    }
}

/// Shortest round-trip decimal; empty for NaN.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub example: String,
    pub quantity: String,
    pub n: Option<usize>,
    pub computed: f64,
    pub target: Option<f64>,
    pub provenance: Provenance,
    pub tolerance: Option<f64>,
    pub status: Status,
}

impl CheckRow {
    /// Asserted comparison: PASS or FAIL.
    pub fn assert(
        example: &str,
        quantity: &str,
        n: Option<usize>,
        computed: f64,
        target: f64,
        provenance: Provenance,
        tol: f64,
    ) -> Self {
        // a few ulps of rounding on top of the stated tolerance
        let ulps = 4.0 * f64::EPSILON * computed.abs().max(target.abs());
        let ok = (computed - target).abs() <= tol + ulps;
        CheckRow {
            example: example.into(),
            quantity: quantity.into(),
            n,
            computed,
            target: Some(target),
            provenance,
            tolerance: Some(tol),
            status: if ok { Status::Pass } else { Status::Fail },
        }
    }

    /// Published-figure comparison: PASS when it agrees, FLAGGED otherwise.
    pub fn flag(example: &str, quantity: &str, n: Option<usize>, computed: f64, target: f64, tol: f64) -> Self {
        let mut row = Self::assert(example, quantity, n, computed, target, Provenance::Paper, tol);
        if row.status == Status::Fail {
            row.status = Status::Flagged;
        }
        row
    }

    /// A boolean condition, recorded with the computed value.
    pub fn condition(example: &str, quantity: &str, n: Option<usize>, computed: f64, holds: bool) -> Self {
        CheckRow {
            example: example.into(),
            quantity: quantity.into(),
            n,
            computed,
            target: None,
            provenance: Provenance::Derived,
            tolerance: None,
            status: if holds { Status::Pass } else { Status::Fail },
        }
    }

    pub fn info(example: &str, quantity: &str, n: Option<usize>, computed: f64) -> Self {
        CheckRow {
            example: example.into(),
            quantity: quantity.into(),
            n,
            computed,
            target: None,
            provenance: Provenance::Computed,
            tolerance: None,
            status: Status::Info,
        }
    }
}

/// Rows in a fixed column order, rendered as CSV or aligned text.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn from_checks(rows: &[CheckRow]) -> Self {
        let mut t = Table::new(&["example", "quantity", "n", "computed", "target", "provenance", "tolerance", "check"]);
        for r in rows {
            t.push(vec![
                r.example.clone(),
                r.quantity.clone(),
                r.n.map(|n| n.to_string()).unwrap_or_default(),
                num(r.computed),
                r.target.map(num).unwrap_or_default(),
                r.provenance.to_string(),
                r.tolerance.map(num).unwrap_or_default(),
                r.status.to_string(),
            ]);
        }
        t
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    /// Space-aligned rendering for the terminal.
    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.header);
        out.push('\n');
        for r in &self.rows {
            out += &line(r);
            out.push('\n');
        }
        out
    }
}
