//! Verification suites. Samples are drawn from per-sample seeded generators and
//! evaluated in parallel, so reports depend only on the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spincm::dynamics::SystemSpec;
use spincm::laurent::Laurent;
use spincm::ode::Stop;
use spincm::phase::{momentum_j, project_pi, ReducedPoint};
use spincm::rmatrix::RMatrixSpec;
use spincm::{AlgElement, RootSystem, C64};

use crate::config::{initial_point, ResolvedThresholds, Setup};
use crate::CliError;

pub const SUITES: [&str; 6] = ["axioms", "cdybe", "mdybe", "lax", "involution", "spectral"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, residuals: &[f64], threshold: f64) -> Self {
        let max = residuals.iter().fold(0.0f64, |m, r| if r.is_nan() { f64::INFINITY } else { m.max(*r) });
        Check { name: name.into(), samples: residuals.len(), max_residual: max, threshold, pass: max < threshold }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn sample_rng(seed: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64))
}

fn rand_c(r: &mut impl Rng, scale: f64) -> C64 {
    C64::new(r.gen_range(-scale..scale), r.gen_range(-scale..scale))
}

fn rand_q(rs: &RootSystem, spec: &RMatrixSpec, r: &mut impl Rng) -> Vec<C64> {
    loop {
        let q: Vec<C64> = (0..rs.rank()).map(|_| rand_c(r, 0.6)).collect();
        let ok = (0..rs.num_roots()).all(|k| {
            let x = rs.pair_root(k, &q);
            x.norm() > 0.15 && spec.root_singularity(k, x).is_none_or(|d| d > 0.15)
        });
        if ok {
            return q;
        }
    }
}

fn rand_z(r: &mut impl Rng) -> C64 {
    loop {
        let z = rand_c(r, 0.8);
        if z.norm() > 0.2 {
            return z;
        }
    }
}

fn rand_element(rs: &RootSystem, r: &mut impl Rng) -> AlgElement {
    AlgElement::from_coeffs((0..rs.dim()).map(|_| rand_c(r, 1.0)).collect())
}

fn rand_reduced(rs: &RootSystem, spec: &RMatrixSpec, r: &mut impl Rng) -> ReducedPoint {
    let q = rand_q(rs, spec, r);
    let p = (0..rs.rank()).map(|_| rand_c(r, 1.0)).collect();
    let s = (0..rs.num_roots()).map(|_| rand_c(r, 1.0)).collect();
    ReducedPoint::new(rs, q, p, s).expect("sizes match")
}

/// Runs `f` on `count` seeded samples in parallel.
fn fan_out<F>(seed: u64, count: usize, f: F) -> Result<Vec<f64>, CliError>
where
    F: Fn(&mut ChaCha8Rng) -> spincm::Result<f64> + Sync,
{
    (0..count).into_par_iter().map(|i| f(&mut sample_rng(seed, i)).map_err(CliError::from)).collect()
}

fn system(setup: &Setup) -> Result<SystemSpec, CliError> {
    SystemSpec::new(setup.spec.clone()).map_err(|e| CliError::Config(format!("{e} (fault injection only applies to the r-matrix suites)")))
}

fn singular(stop: &Stop) -> Option<CliError> {
    match stop {
        Stop::Completed => None,
        s => Some(CliError::Singular(format!("integration stopped: {s:?}"))),
    }
}

pub fn run(setup: &Setup, suite: &str, seed: u64, th: &ResolvedThresholds) -> Result<Report, CliError> {
    let checks = match suite {
        "axioms" => axioms(setup, seed, th)?,
        "cdybe" => cdybe(setup, seed, th)?,
        "mdybe" => mdybe(setup, seed, th)?,
        "lax" => lax(setup, th)?,
        "involution" => involution(setup, seed, th)?,
        "spectral" => spectral(setup, th)?,
        other => return Err(CliError::Config(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report { suite: suite.into(), seed, checks, pass })
}

fn axioms(setup: &Setup, seed: u64, th: &ResolvedThresholds) -> Result<Vec<Check>, CliError> {
    let (rs, spec) = (&setup.rs, &setup.spec);
    let reps: Vec<_> = (0..setup.config.verify.samples)
        .into_par_iter()
        .map(|i| {
            let r = &mut sample_rng(seed, i);
            let q = rand_q(rs, spec, r);
            spec.verify_axioms(&q, &[rand_z(r)])
        })
        .collect::<spincm::Result<_>>()?;
    let col = |f: fn(&spincm::rmatrix::AxiomReport) -> f64| reps.iter().map(f).collect::<Vec<_>>();
    Ok(vec![
        Check::new("zero weight", &col(|r| r.zero_weight), th.axioms),
        Check::new("unitarity", &col(|r| r.unitarity), th.axioms),
        Check::new("residue", &col(|r| r.residue), th.axioms),
    ])
}

fn cdybe(setup: &Setup, seed: u64, th: &ResolvedThresholds) -> Result<Vec<Check>, CliError> {
    let (rs, spec) = (&setup.rs, &setup.spec);
    let res = fan_out(seed, setup.config.verify.samples, |r| {
        let q = rand_q(rs, spec, r);
        spec.verify_cdybe(&q, rand_z(r), rand_z(r), rand_z(r))
    })?;
    Ok(vec![Check::new("cdybe", &res, th.cdybe)])
}

fn mdybe(setup: &Setup, seed: u64, th: &ResolvedThresholds) -> Result<Vec<Check>, CliError> {
    let (rs, spec) = (&setup.rs, &setup.spec);
    let zs: Vec<C64> = setup.zs.iter().take(3).copied().collect();
    let res = fan_out(seed, setup.config.verify.samples, |r| {
        let q = rand_q(rs, spec, r);
        let laurent = |r: &mut ChaCha8Rng| {
            let poles = r.gen_range(0..=2);
            Laurent::from_coefficients((0..poles + 2).map(|_| rand_element(rs, r)).collect(), poles)
        };
        let (xi, eta) = (laurent(r), laurent(r));
        spec.verify_mdybe(&q, &xi, &eta, &zs)
    })?;
    Ok(vec![Check::new("mdybe", &res, th.mdybe)])
}

fn involution(setup: &Setup, seed: u64, th: &ResolvedThresholds) -> Result<Vec<Check>, CliError> {
    let (rs, spec) = (&setup.rs, &setup.spec);
    let sys = system(setup)?;
    let z = |i: usize| setup.zs[i % setup.zs.len()];
    let k = setup.kmax.max(2);
    let battery = [
        ((z(0), 2), (z(1), 2)),
        ((z(0), 2), (z(1), k)),
        ((z(0), k), (z(1), k)),
        ((z(1), 2), (z(2), k)),
        ((z(2), k), (z(0), k)),
        ((z(0), k), (z(2), 2)),
    ];
    let res = fan_out(seed, setup.config.verify.samples, |r| sys.involution_check(&rand_reduced(rs, spec, r), &battery))?;
    Ok(vec![Check::new("involution", &res, th.involution)])
}

/// Initial point and whether it lies on J⁻¹(0).
fn start(setup: &Setup) -> Result<(spincm::PhasePoint, bool), CliError> {
    let init = setup.config.initial.as_ref().ok_or_else(|| CliError::Config("this suite needs an initial condition".into()))?;
    let x = initial_point(&setup.rs, init)?;
    let j0 = momentum_j(&setup.rs, &x).iter().all(|v| v.norm() < 1e-12);
    Ok((x, j0))
}

/// Indices of `count` points spread evenly along a trajectory of length `len`.
fn spread(len: usize, count: usize) -> Vec<usize> {
    let count = count.clamp(1, len);
    (0..count).map(|i| if count == 1 { 0 } else { i * (len - 1) / (count - 1) }).collect()
}

fn lax(setup: &Setup, th: &ResolvedThresholds) -> Result<Vec<Check>, CliError> {
    let sys = system(setup)?;
    let (x, j0) = start(setup)?;
    let ic = &setup.config.integration;
    let n = setup.config.verify.samples;
    let zs = &setup.zs;
    let mut checks = Vec::new();
    let tr = sys.integrate(&x, ic.t_end, ic.tol)?;
    if let Some(e) = singular(&tr.stop) {
        return Err(e);
    }
    let idx = spread(tr.points.len(), n);
    if sys.sigma_residual(&x) < spincm::dynamics::SIGMA_TOL {
        let res = idx.par_iter().map(|&i| sys.lax_residual(&tr.points[i], zs)).collect::<spincm::Result<Vec<_>>>()?;
        checks.push(Check::new("lax", &res, th.lax));
    } else {
        let res = idx.par_iter().map(|&i| sys.quasi_lax_residual(&tr.points[i], zs)).collect::<spincm::Result<Vec<_>>>()?;
        checks.push(Check::new("quasi-lax", &res, th.lax));
    }
    if j0 {
        let xr = project_pi(&setup.rs, &x)?;
        let trr = sys.integrate_reduced(&xr, ic.t_end, ic.tol)?;
        if let Some(e) = singular(&trr.stop) {
            return Err(e);
        }
        let first = sys.spectral_curve(&xr, zs)?;
        let iso = trr
            .points
            .par_iter()
            .map(|p| {
                let cur = sys.spectral_curve(p, zs)?;
                Ok(first.iter().flatten().zip(cur.iter().flatten()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm() / a.norm().max(1.0))))
            })
            .collect::<spincm::Result<Vec<_>>>()?;
        checks.push(Check::new("isospectral", &iso, th.reduced_lax));
        let idx = spread(trr.points.len(), n);
        let res = idx.par_iter().map(|&i| sys.lax_residual_reduced(&trr.points[i], zs)).collect::<spincm::Result<Vec<_>>>()?;
        checks.push(Check::new("reduced lax", &res, th.reduced_lax));
    }
    Ok(checks)
}

fn spectral(setup: &Setup, th: &ResolvedThresholds) -> Result<Vec<Check>, CliError> {
    let sys = system(setup)?;
    let (x, j0) = start(setup)?;
    let ic = &setup.config.integration;
    let (zs, kmax) = (&setup.zs, setup.kmax);
    let rel = |a: &[Vec<C64>], b: &[Vec<C64>]| {
        a.iter().flatten().zip(b.iter().flatten()).fold(0.0f64, |m, (u, v)| m.max((u - v).norm() / u.norm().max(1.0)))
    };
    let (energy, drift) = if j0 {
        let xr = project_pi(&setup.rs, &x)?;
        let tr = sys.integrate_reduced(&xr, ic.t_end, ic.tol)?;
        if let Some(e) = singular(&tr.stop) {
            return Err(e);
        }
        let h0 = sys.conserved_spectrum_reduced(&xr, zs, kmax)?;
        let d = tr
            .points
            .par_iter()
            .map(|p| Ok(rel(&h0, &sys.conserved_spectrum_reduced(p, zs, kmax)?)))
            .collect::<spincm::Result<Vec<_>>>()?;
        (energy_drifts(&tr.energy), d)
    } else {
        let tr = sys.integrate(&x, ic.t_end, ic.tol)?;
        if let Some(e) = singular(&tr.stop) {
            return Err(e);
        }
        let h0 = sys.conserved_spectrum(&x, zs, kmax)?;
        let d = tr
            .points
            .par_iter()
            .map(|p| Ok(rel(&h0, &sys.conserved_spectrum(p, zs, kmax)?)))
            .collect::<spincm::Result<Vec<_>>>()?;
        (energy_drifts(&tr.energy), d)
    };
    Ok(vec![Check::new("energy", &energy, th.spectral), Check::new("spectral invariants", &drift, th.spectral)])
}

fn energy_drifts(e: &[C64]) -> Vec<f64> {
    let s = e[0].norm().max(1.0);
    e.iter().map(|v| (v - e[0]).norm() / s).collect()
}
