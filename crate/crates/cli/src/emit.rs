//! Output files: verdict JSON, diagnostic time series and plot data.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use epitaxy_core::experiments::Series;
use epitaxy_core::{Trajectory, Verdict};

use crate::plot::render_svg;

pub const CSV_HEADER: [&str; 7] = [
    "t",
    "E_total",
    "E_dirichlet",
    "E_biharmonic",
    "dissipation",
    "grad_sup",
    "mean_h",
];

fn csv_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// One row per recorded time, 17 significant digits.
pub fn emit_timeseries(traj: &Trajectory, path: &Path) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_io)?;
    w.write_record(CSV_HEADER).map_err(csv_io)?;
    for i in 0..traj.len() {
        let e = &traj.energy[i];
        let row = [
            traj.times[i],
            e.total,
            e.dirichlet,
            e.biharmonic,
            e.dissipation,
            traj.grad_sup[i],
            traj.mean_h[i],
        ];
        w.write_record(row.iter().map(|v| format!("{v:.16e}")))
            .map_err(csv_io)?;
    }
    w.flush()
}

pub fn read_timeseries(path: &Path) -> io::Result<Vec<[f64; 7]>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_io)?;
    let header = r.headers().map_err(csv_io)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "unexpected header"));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_io)?;
            let mut row = [0.0; 7];
            for (slot, field) in row.iter_mut().zip(rec.iter()) {
                *slot = field
                    .parse()
                    .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
            }
            Ok(row)
        })
        .collect()
}

pub fn write_verdict(v: &Verdict, path: &Path) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text)
}

/// Writes `<name>.json` (data and fit) and `<name>.svg` for every series.
pub fn emit_plotdata(series: &[Series], dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = vec![];
    for s in series {
        let json = dir.join(format!("{}.json", s.name));
        let mut text = serde_json::to_string_pretty(s)?;
        text.push('\n');
        fs::write(&json, text)?;
        let svg = dir.join(format!("{}.svg", s.name));
        fs::write(&svg, render_svg(s).map_err(io::Error::other)?)?;
        written.extend([json, svg]);
    }
    Ok(written)
}
