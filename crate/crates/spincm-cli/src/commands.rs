use serde::Serialize;
use spincm::dynamics::SystemSpec;
use spincm::ode::Stop;
use spincm::phase::{gauge_g, momentum_j, project_pi};
use spincm::rootsys::RootSystemSummary;
use spincm::Error;
use std::path::{Path, PathBuf};

use crate::config::{format_complex, initial_point, Family, ResolvedThresholds, Setup};
use crate::csvio;
use crate::suites::{self, Report, SUITES};
use crate::CliError;

fn out_path(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir.join(name))
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).expect("report serializes");
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn system(setup: &Setup) -> Result<SystemSpec, CliError> {
    SystemSpec::new(setup.spec.clone()).map_err(|e| CliError::Config(format!("{e} (fault injection only applies to verify)")))
}

#[derive(Debug, Serialize)]
pub struct Diagnostics {
    pub stop: String,
    pub steps: usize,
    pub t_final: f64,
    pub energy_initial: String,
    pub energy_drift: f64,
    pub max_constraint: f64,
    pub momentum: Vec<String>,
    pub min_collision_distance: f64,
}

/// Integrates the unreduced system and writes the trajectory and diagnostics.
pub fn simulate(setup: &Setup, out: &Path) -> Result<Diagnostics, CliError> {
    let sys = system(setup)?;
    let init = setup.config.initial.as_ref().ok_or_else(|| CliError::Config("simulate needs an initial condition".into()))?;
    let x = initial_point(&setup.rs, init)?;
    let ic = &setup.config.integration;
    let tr = sys.integrate(&x, ic.t_end, ic.tol)?;
    csvio::write_trajectory(&out_path(out, &setup.config.outputs.trajectory)?, &setup.rs, &tr)?;
    let diag = Diagnostics {
        stop: match &tr.stop {
            Stop::Completed => "completed".into(),
            s => format!("{s:?}"),
        },
        steps: tr.t.len().saturating_sub(1),
        t_final: *tr.t.last().unwrap_or(&0.0),
        energy_initial: format_complex(tr.energy[0]),
        energy_drift: tr.energy_drift(),
        max_constraint: tr.constraint.iter().fold(0.0, |m, c| m.max(*c)),
        momentum: momentum_j(&setup.rs, &x).into_iter().map(format_complex).collect(),
        min_collision_distance: tr.points.iter().map(|p| sys.collision_distance(&p.q)).fold(f64::INFINITY, f64::min),
    };
    write_json(&out_path(out, &setup.config.outputs.diagnostics)?, &diag)?;
    match tr.stop {
        Stop::Completed => Ok(diag),
        s => Err(CliError::Singular(format!("integration stopped at t = {}: {s:?}", diag.t_final))),
    }
}

/// Runs one suite, or all of them for `"all"`, and writes the report.
pub fn verify(setup: &Setup, suite: &str, seed: u64, th: &ResolvedThresholds, out: &Path) -> Result<Vec<Report>, CliError> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let reports = names.iter().map(|s| suites::run(setup, s, seed, th)).collect::<Result<Vec<_>, _>>()?;
    let path = out_path(out, &setup.config.outputs.report)?;
    if reports.len() == 1 {
        write_json(&path, &reports[0])?;
    } else {
        write_json(&path, &reports)?;
    }
    Ok(reports)
}

/// Applies π pointwise to a trajectory file and writes the reduced trajectory
/// with a gauge-consistency residual column.
pub fn reduce(setup: &Setup, input: &Path, out: &Path) -> Result<usize, CliError> {
    let sys = system(setup)?;
    let rs = &setup.rs;
    let rows = csvio::read_trajectory(input, rs)?;
    let n = rs.rank();
    let nonsimple: Vec<usize> = (0..rs.num_roots()).filter(|&k| !rs.is_simple(k)).collect();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("q{i}")));
    header.extend((1..=n).map(|i| format!("p{i}")));
    header.extend(nonsimple.iter().map(|&k| format!("s{}", rs.label(k))));
    header.extend(["energy".to_string(), "gauge_residual".to_string()]);
    let mut table = Vec::with_capacity(rows.len());
    for (step, (t, x)) in rows.iter().enumerate() {
        let at = |e: Error| match e {
            Error::OutsideU { root } => {
                CliError::Singular(format!("step {step}: ξ{} vanishes, the point is outside U", rs.label(rs.simple_roots()[root - 1])))
            }
            e => CliError::Singular(format!("step {step}: {e}")),
        };
        let xr = project_pi(rs, x).map_err(at)?;
        let g: Vec<_> = gauge_g(rs, &x.xi).map_err(at)?.iter().map(|v| -v).collect();
        let mut gauge = 0.0f64;
        for &z in &setup.zs {
            let l0 = sys.lax_l0(&xr, z).map_err(at)?;
            let lt = rs.torus_adjoint(&g, &sys.lax_l(x, z).map_err(at)?);
            gauge = gauge.max((&l0 - &lt).norm_max() / lt.norm_max().max(1.0));
        }
        let mut row = vec![t.to_string()];
        row.extend(xr.q.iter().chain(&xr.p).map(|v| format_complex(*v)));
        row.extend(nonsimple.iter().map(|&k| format_complex(xr.s[k])));
        row.push(format_complex(sys.hamiltonian_reduced(&xr).map_err(at)?));
        row.push(gauge.to_string());
        table.push(row);
    }
    csvio::write_table(&out_path(out, &setup.config.outputs.reduced)?, &header, &table)?;
    Ok(table.len())
}

#[derive(Debug, Serialize)]
pub struct Info {
    pub family: Family,
    pub root_system: RootSystemSummary,
    pub labels: Vec<String>,
    pub case: String,
    pub fault: f64,
    pub thresholds: ThresholdView,
    pub z_samples: Vec<String>,
    pub kmax: usize,
}

#[derive(Debug, Serialize)]
pub struct ThresholdView {
    pub axioms: f64,
    pub cdybe: f64,
    pub mdybe: f64,
    pub lax: f64,
    pub reduced_lax: f64,
    pub involution: f64,
    pub spectral: f64,
}

pub fn info(setup: &Setup, th: &ResolvedThresholds) -> Info {
    let rs = &setup.rs;
    Info {
        family: setup.config.family,
        root_system: rs.summary(),
        labels: (0..rs.num_roots()).map(|k| rs.label(k)).collect(),
        case: format!("{:?}", setup.spec.case()),
        fault: setup.spec.fault(),
        thresholds: ThresholdView {
            axioms: th.axioms,
            cdybe: th.cdybe,
            mdybe: th.mdybe,
            lax: th.lax,
            reduced_lax: th.reduced_lax,
            involution: th.involution,
            spectral: th.spectral,
        },
        z_samples: setup.zs.iter().map(|z| format_complex(*z)).collect(),
        kmax: setup.kmax,
    }
}
