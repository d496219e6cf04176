//! Trajectory files. Complex fields are written as "re+imj".

use spincm::dynamics::Trajectory;
use spincm::phase::PhasePoint;
use spincm::{RootSystem, C64};
use std::path::Path;

use crate::config::{format_complex, parse_complex};
use crate::CliError;

pub fn phase_header(rs: &RootSystem) -> Vec<String> {
    let n = rs.rank();
    let mut h = vec!["t".to_string()];
    h.extend((1..=n).map(|i| format!("q{i}")));
    h.extend((1..=n).map(|i| format!("p{i}")));
    h.extend((1..=n).map(|i| format!("xi_h{i}")));
    h.extend((0..rs.num_roots()).map(|k| format!("xi{}", rs.label(k))));
    h
}

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_trajectory(path: &Path, rs: &RootSystem, tr: &Trajectory<PhasePoint>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io(path, e))?;
    let mut header = phase_header(rs);
    header.push("energy".into());
    header.push("constraint".into());
    w.write_record(&header).map_err(|e| io(path, e))?;
    for (i, x) in tr.points.iter().enumerate() {
        let mut row = vec![tr.t[i].to_string()];
        row.extend(x.to_vec().into_iter().map(format_complex));
        row.push(format_complex(tr.energy[i]));
        row.push(tr.constraint[i].to_string());
        w.write_record(&row).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

/// Generic table writer: a header and rows of preformatted fields.
pub fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io(path, e))?;
    w.write_record(header).map_err(|e| io(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

/// Reads (t, point) rows from a trajectory file; extra columns are ignored.
pub fn read_trajectory(path: &Path, rs: &RootSystem) -> Result<Vec<(f64, PhasePoint)>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io(path, e))?;
    let header = r.headers().map_err(|e| io(path, e))?.clone();
    let cols: Vec<usize> = phase_header(rs)
        .iter()
        .map(|name| {
            header
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| CliError::Config(format!("{}: missing column {name}", path.display())))
        })
        .collect::<Result<_, _>>()?;
    let n = rs.rank();
    let mut out = Vec::new();
    for (step, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| io(path, e))?;
        let bad = |m: String| CliError::Config(format!("{}: step {step}: {m}", path.display()));
        let t: f64 = rec[cols[0]].trim().parse().map_err(|_| bad(format!("bad time {:?}", &rec[cols[0]])))?;
        let v: Vec<C64> = cols[1..].iter().map(|&c| parse_complex(&rec[c]).map_err(bad)).collect::<Result<_, _>>()?;
        out.push((t, PhasePoint::from_slice(n, &v)));
    }
    Ok(out)
}
