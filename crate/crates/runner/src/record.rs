//! CSV schemas shared with the plotting script.
//!
//! Every file starts with one `#` line naming the schema and its version,
//! then a header row. Floats are written in `{:.16e}` form (17 significant
//! digits), which reads back to the identical `f64`.

use std::io::{self, BufRead, Write};

pub const DIAGNOSTICS_SCHEMA: &str = "nlslab-diagnostics";
pub const BILINEAR_SCHEMA: &str = "nlslab-bilinear-sweep";
pub const SCHEMA_VERSION: u32 = 1;

pub const DIAGNOSTIC_COLUMNS: [&str; 17] = [
    "t",
    "mass",
    "energy",
    "momentum",
    "h1",
    "morawetz",
    "morawetz_I",
    "err1",
    "err2",
    "err3",
    "l6_accum",
    "l8_inst",
    "x_center",
    "x_radius",
    "xi_center",
    "xi_radius",
    "N_t",
];

pub const BILINEAR_COLUMNS: [&str; 6] = ["variant", "N", "constant", "ensemble_mean", "ensemble_size", "slope"];

/// Diagnostics of one saved frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub momentum: f64,
    /// `||u_x||_2`.
    pub h1: f64,
    pub morawetz: f64,
    /// Action of `Iu` recentered at the tracked frequency.
    pub morawetz_i: f64,
    /// Instantaneous error integrands; their time integrals are in the
    /// run manifest.
    pub err1: f64,
    pub err2: f64,
    pub err3: f64,
    /// Running `int_0^t int |u|^6`.
    pub l6_accum: f64,
    /// `int |u|^8 dx` at `t`.
    pub l8_inst: f64,
    pub x_center: f64,
    pub x_radius: f64,
    pub xi_center: f64,
    pub xi_radius: f64,
    pub n_t: f64,
}

impl DiagnosticRecord {
    pub fn values(&self) -> [f64; 17] {
        [
            self.t,
            self.mass,
            self.energy,
            self.momentum,
            self.h1,
            self.morawetz,
            self.morawetz_i,
            self.err1,
            self.err2,
            self.err3,
            self.l6_accum,
            self.l8_inst,
            self.x_center,
            self.x_radius,
            self.xi_center,
            self.xi_radius,
            self.n_t,
        ]
    }

    pub fn from_values(v: [f64; 17]) -> Self {
        Self {
            t: v[0],
            mass: v[1],
            energy: v[2],
            momentum: v[3],
            h1: v[4],
            morawetz: v[5],
            morawetz_i: v[6],
            err1: v[7],
            err2: v[8],
            err3: v[9],
            l6_accum: v[10],
            l8_inst: v[11],
            x_center: v[12],
            x_radius: v[13],
            xi_center: v[14],
            xi_radius: v[15],
            n_t: v[16],
        }
    }
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn schema_line(name: &str) -> String {
    format!("# {name} v{SCHEMA_VERSION}")
}

/// Streams records to any writer, one line per call.
pub struct DiagnosticWriter<W: Write> {
    out: W,
}

impl<W: Write> DiagnosticWriter<W> {
    pub fn new(mut out: W) -> io::Result<Self> {
        writeln!(out, "{}", schema_line(DIAGNOSTICS_SCHEMA))?;
        writeln!(out, "{}", DIAGNOSTIC_COLUMNS.join(","))?;
        Ok(Self { out })
    }

    pub fn write(&mut self, r: &DiagnosticRecord) -> io::Result<()> {
        let line: Vec<String> = r.values().iter().map(|v| float(*v)).collect();
        writeln!(self.out, "{}", line.join(","))
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Reads a diagnostics CSV, checking the schema line and header.
pub fn read_diagnostics(input: impl BufRead) -> io::Result<Vec<DiagnosticRecord>> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = input.lines();
    let schema = lines.next().transpose()?.unwrap_or_default();
    if schema != schema_line(DIAGNOSTICS_SCHEMA) {
        return Err(bad(format!("unexpected schema line {schema:?}")));
    }
    let header = lines.next().transpose()?.unwrap_or_default();
    if header != DIAGNOSTIC_COLUMNS.join(",") {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let parsed: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        let values: [f64; 17] = parsed
            .map_err(|e| bad(format!("row {}: {e}", i + 1)))?
            .try_into()
            .map_err(|v: Vec<f64>| bad(format!("row {}: {} fields, expected 17", i + 1, v.len())))?;
        records.push(DiagnosticRecord::from_values(values));
    }
    Ok(records)
}

/// One row of the bilinear sweep file.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearRow {
    pub variant: String,
    pub n: f64,
    pub constant: f64,
    pub ensemble_mean: f64,
    pub ensemble_size: usize,
    /// Fitted log-log slope of the variant's whole sweep, repeated per row.
    pub slope: f64,
}

pub fn write_bilinear(mut out: impl Write, rows: &[BilinearRow]) -> io::Result<()> {
    writeln!(out, "{}", schema_line(BILINEAR_SCHEMA))?;
    writeln!(out, "{}", BILINEAR_COLUMNS.join(","))?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.variant,
            float(r.n),
            float(r.constant),
            float(r.ensemble_mean),
            r.ensemble_size,
            float(r.slope)
        )?;
    }
    out.flush()
}
