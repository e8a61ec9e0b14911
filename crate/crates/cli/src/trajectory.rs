//! Trajectory CSV: one row per logged step.

use std::io::{Read, Write};

use serde::Deserialize;
use windward_core::sim::ContinuityRow;
use windward_core::sim::{PhaseTrace, Record};

use crate::number::{format_opt, format_sig};

pub const HEADER: [&str; 23] = [
    "t",
    "x",
    "y",
    "heading_x",
    "heading_y",
    "vgx",
    "vgy",
    "wx",
    "wy",
    "regime",
    "ux",
    "uy",
    "ax",
    "ay",
    "ex",
    "ey",
    "e_star",
    "eta",
    "lambda",
    "beta",
    "theta_shift",
    "alpha_out",
    "sigma_safe",
];

fn record_fields(r: &Record) -> Vec<String> {
    let d = &r.diagnostics;
    let mut out: Vec<String> = [
        r.t,
        r.position.x,
        r.position.y,
        r.heading.x(),
        r.heading.y(),
        r.ground_velocity.x,
        r.ground_velocity.y,
        r.wind.x,
        r.wind.y,
    ]
    .into_iter()
    .map(format_sig)
    .collect();
    out.push(d.regime.label().to_string());
    out.extend(
        [
            r.u.x, r.u.y, r.accel.x, r.accel.y, r.error.x, r.error.y, r.e_star, r.eta,
        ]
        .into_iter()
        .map(format_sig),
    );
    out.push(format_opt(d.lambda));
    out.push(format_sig(d.beta));
    out.push(format_opt(d.theta_shift()));
    out.push(format_opt(d.alpha_out));
    out.push(format_opt(d.sigma_safe));
    out
}

/// Writes every `every`-th record, always including the last one.
pub fn write_trajectory<W: Write>(records: &[Record], every: usize, out: W) -> csv::Result<()> {
    let every = every.max(1);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    let last = records.len().saturating_sub(1);
    for (i, r) in records.iter().enumerate() {
        if i % every == 0 || i == last {
            w.write_record(record_fields(r))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// A parsed trajectory row. Empty fields read back as `None`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading_x: f64,
    pub heading_y: f64,
    pub vgx: f64,
    pub vgy: f64,
    pub wx: f64,
    pub wy: f64,
    pub regime: String,
    pub ux: f64,
    pub uy: f64,
    pub ax: f64,
    pub ay: f64,
    pub ex: f64,
    pub ey: f64,
    pub e_star: f64,
    pub eta: f64,
    pub lambda: Option<f64>,
    pub beta: f64,
    pub theta_shift: Option<f64>,
    pub alpha_out: Option<f64>,
    pub sigma_safe: Option<f64>,
}

pub fn read_trajectory<R: Read>(input: R) -> csv::Result<Vec<TrajectoryRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected header {header:?}"),
        )));
    }
    r.deserialize().collect()
}

pub fn write_phase_traces<W: Write>(traces: &[PhaseTrace], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["trace_id", "t", "eta", "e_star"])?;
    for tr in traces {
        for s in &tr.samples {
            w.write_record([
                tr.id.to_string(),
                format_sig(s.t),
                format_sig(s.eta),
                format_sig(s.e_star),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_continuity<W: Write>(rows: &[ContinuityRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["nu_deg", "w_star", "regime", "y", "ux", "uy"])?;
    for r in rows {
        w.write_record([
            format_sig(r.nu.to_degrees()),
            format_sig(r.w_star),
            r.regime.label().to_string(),
            format_sig(r.y),
            format_sig(r.ux),
            format_sig(r.uy),
        ])?;
    }
    w.flush()?;
    Ok(())
}
