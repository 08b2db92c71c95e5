//! Error tables and their CSV form.
//!
//! ```text
//! resolution,error,pairwise_rate
//! 20,0.0312,
//! 40,0.0255,0.291
//! fitted_rate,0.36,
//! theoretical_rate,0.3,0.25
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! parsed table equals the emitted one exactly. The last footer holds the
//! fixed-time and strict theoretical rates (equal for spatial studies).

use std::io::{Read, Write};

use super::config::StudyKind;
use super::rates::{fitted_rate, pairwise_rates};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub resolution: usize,
    pub error: f64,
    pub pairwise_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub rows: Vec<TableRow>,
    pub fitted_rate: Option<f64>,
    pub theoretical_fixed: f64,
    pub theoretical_strict: f64,
}

/// Run statistics that are not part of the CSV contract.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StudyDiagnostics {
    pub study: Option<StudyKind>,
    pub samples_used: usize,
    pub dropped: Vec<usize>,
    /// `max |(Uⁿ - U⁰, 1)|` over every step of every accepted run.
    pub max_mass_defect: f64,
    pub max_newton_iters: usize,
    pub max_laplacian_norm: f64,
}

impl ErrorTable {
    /// Builds rows and both empirical rates from raw errors.
    pub fn from_errors(
        resolutions: &[usize],
        errors: &[f64],
        theoretical_fixed: f64,
        theoretical_strict: f64,
    ) -> Self {
        let pair = pairwise_rates(resolutions, errors);
        Self {
            rows: resolutions
                .iter()
                .zip(errors)
                .zip(pair)
                .map(|((&resolution, &error), pairwise_rate)| TableRow {
                    resolution,
                    error,
                    pairwise_rate,
                })
                .collect(),
            fitted_rate: fitted_rate(resolutions, errors),
            theoretical_fixed,
            theoretical_strict,
        }
    }

    pub fn resolutions(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.resolution).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the CSV form; refuses an empty table.
pub fn write_table<W: Write>(table: &ErrorTable, out: W) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::InvalidArgument("refusing to emit an empty table".into()));
    }
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(["resolution", "error", "pairwise_rate"])?;
    for r in &table.rows {
        w.write_record(&[r.resolution.to_string(), r.error.to_string(), opt(r.pairwise_rate)])?;
    }
    w.write_record(&["fitted_rate".to_string(), opt(table.fitted_rate), String::new()])?;
    w.write_record(&[
        "theoretical_rate".to_string(),
        table.theoretical_fixed.to_string(),
        table.theoretical_strict.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn emit_table(table: &ErrorTable, path: &std::path::Path) -> Result<()> {
    let mut buf = Vec::new();
    write_table(table, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::InvalidArgument(format!("not a number: {s:?}")))
}

fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s).map(Some)
    }
}

pub fn read_table<R: Read>(input: R) -> Result<ErrorTable> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let mut rows = Vec::new();
    let mut fitted = None;
    let mut theo = None;
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        match field(0) {
            "fitted_rate" => fitted = Some(parse_opt(field(1))?),
            "theoretical_rate" => theo = Some((parse_f64(field(1))?, parse_f64(field(2))?)),
            res => rows.push(TableRow {
                resolution: res
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad resolution {res:?}")))?,
                error: parse_f64(field(1))?,
                pairwise_rate: parse_opt(field(2))?,
            }),
        }
    }
    let (theoretical_fixed, theoretical_strict) =
        theo.ok_or_else(|| Error::InvalidArgument("missing theoretical_rate footer".into()))?;
    Ok(ErrorTable {
        rows,
        fitted_rate: fitted.ok_or_else(|| Error::InvalidArgument("missing fitted_rate footer".into()))?,
        theoretical_fixed,
        theoretical_strict,
    })
}
