//! Acceptance battery. Prints one line per criterion and exits nonzero if any fails.

mod common;

use common::*;
use rand::Rng;
use spincm::dynamics::SystemSpec;
use spincm::elliptic::Lattice;
use spincm::laurent::Laurent;
use spincm::phase::*;
use spincm::rmatrix::RMatrixSpec;
use spincm::{build_root_system, dynamics, RootSystem, C64};
use std::process::ExitCode;
use std::time::Instant;

const ONE: C64 = C64::new(1.0, 0.0);

type Outcome = spincm::Result<(f64, f64)>;
type Criterion = fn() -> Outcome;

fn rand_z(r: &mut impl Rng) -> C64 {
    loop {
        let z = rand_c(r, 0.8);
        if z.norm() > 0.2 {
            return z;
        }
    }
}

fn tol_for(name: &str, rt: f64, ell: f64) -> f64 {
    if name == "elliptic" {
        ell
    } else {
        rt
    }
}

/// Worst residual divided by its tolerance, and the worst raw residual.
struct Worst(f64, f64);

impl Worst {
    fn new() -> Self {
        Worst(0.0, 0.0)
    }

    fn add(&mut self, res: f64, tol: f64) {
        let ratio = if res.is_nan() { f64::INFINITY } else { res / tol };
        if ratio > self.0 {
            self.0 = ratio;
            self.1 = res;
        }
    }

    fn done(self) -> Outcome {
        Ok((self.0, self.1))
    }
}

fn axioms() -> Outcome {
    let mut w = Worst::new();
    let mut r = rng(101);
    for n in 1..=2 {
        let rs = build_root_system('A', n)?;
        for (name, spec) in families(&rs) {
            for _ in 0..20 {
                let q = rand_q(&rs, &mut r);
                let rep = spec.verify_axioms(&q, &[rand_z(&mut r)])?;
                w.add(rep.max(), tol_for(name, 1e-10, 1e-8));
            }
        }
    }
    w.done()
}

fn cdybe() -> Outcome {
    let mut w = Worst::new();
    let mut r = rng(102);
    for n in 1..=2 {
        let rs = build_root_system('A', n)?;
        for (name, spec) in families(&rs) {
            for _ in 0..10 {
                let q = rand_q(&rs, &mut r);
                let (z1, z2, z3) = (rand_z(&mut r), rand_z(&mut r), rand_z(&mut r));
                w.add(spec.verify_cdybe(&q, z1, z2, z3)?, tol_for(name, 1e-10, 1e-8));
            }
        }
    }
    w.done()
}

fn mdybe() -> Outcome {
    let mut w = Worst::new();
    let mut r = rng(103);
    let zs = [c(0.5, 0.1), c(-0.2, 0.4), c(0.1, -0.6)];
    for n in 1..=2 {
        let rs = build_root_system('A', n)?;
        let all: Vec<usize> = (0..n).collect();
        for spec in [RMatrixSpec::rational_full(&rs), RMatrixSpec::trigonometric(&rs, &all)?] {
            for _ in 0..10 {
                let q = rand_q(&rs, &mut r);
                let (p1, p2) = (r.gen_range(0..=2), r.gen_range(0..=2));
                let xi = Laurent::from_coefficients((0..p1 + 2).map(|_| rand_element(&rs, &mut r)).collect(), p1);
                let eta = Laurent::from_coefficients((0..p2 + 2).map(|_| rand_element(&rs, &mut r)).collect(), p2);
                w.add(spec.verify_mdybe(&q, &xi, &eta, &zs)?, 1e-8);
            }
        }
    }
    w.done()
}

fn sl3_table() -> Outcome {
    let rs = build_root_system('A', 2)?;
    let mut r = rng(104);
    let idx = |i: usize, j: usize| rs.index_of_entry(i - 1, j - 1).unwrap();
    let g = |i, j| coordinate_gradient(&rs, Coordinate::S(idx(i, j)));
    let mut w = Worst::new();
    for _ in 0..100 {
        let xr = ReducedPoint::new(&rs, rand_q(&rs, &mut r), rand_vec(&mut r, 2, 1.0), rand_vec(&mut r, 6, 1.0))?;
        let s = |i, j| xr.s[idx(i, j)];
        let br = |a: (usize, usize), b: (usize, usize)| bracket_reduced(&rs, &g(a.0, a.1), &g(b.0, b.1), &xr);
        let (s13, s21, s31, s32) = (s(1, 3), s(2, 1), s(3, 1), s(3, 2));
        let table = [
            (br((1, 3), (2, 1))?, ONE - s13 * s13 * s21),
            (br((1, 3), (3, 1))?, s13 * (s21 - s32)),
            (br((1, 3), (3, 2))?, -ONE + s13 * s13 * s32),
            (br((2, 1), (3, 1))?, s21 * (s32 - s13 * s31)),
            (br((2, 1), (3, 2))?, s31 - s13 * s21 * s32),
            (br((3, 1), (3, 2))?, s32 * (s21 - s13 * s31)),
        ];
        for (a, b) in table {
            w.add((a - b).norm(), 1e-12);
        }
    }
    w.done()
}

fn conservation() -> Outcome {
    let mut w = Worst::new();
    let zs = sample_zs();
    for n in 1..=2 {
        let rs = build_root_system('A', n)?;
        for (_, spec, period) in flow_families(&rs) {
            let sys = SystemSpec::new(spec)?;
            let xr = project_pi(&rs, &repulsive_point(&rs, period, 200 + n as u64))?;
            let tr = sys.integrate_reduced(&xr, 10.0, 1e-10)?;
            if !tr.completed() {
                w.add(f64::INFINITY, 1.0);
                continue;
            }
            w.add(tr.energy_drift(), 1e-6);
            let h0 = sys.conserved_spectrum_reduced(&xr, &zs, n + 1)?;
            let h1 = sys.conserved_spectrum_reduced(tr.last(), &zs, n + 1)?;
            for (a, b) in h0.iter().flatten().zip(h1.iter().flatten()) {
                w.add((a - b).norm() / a.norm().max(1.0), 1e-6);
            }
        }
    }
    w.done()
}

fn lax() -> Outcome {
    let mut w = Worst::new();
    let zs = sample_zs();
    for n in 1..=2 {
        let rs = build_root_system('A', n)?;
        for (name, spec, period) in flow_families(&rs) {
            let sys = SystemSpec::new(spec)?;
            let x = repulsive_point(&rs, period, 300 + n as u64);
            w.add(sys.lax_residual(&x, &zs)?, 1e-6);
            let tr = sys.integrate_reduced(&project_pi(&rs, &x)?, 10.0, 1e-10)?;
            let rep = sys.lax_pair_reduced(&tr, &zs, (tr.points.len() / 10).max(1))?;
            w.add(rep.isospectral, 1e-5);
            w.add(rep.lax, 1e-5);
            if name == "rational" {
                let mut y = x.clone();
                for i in 0..n {
                    y.xi.coeffs[i] = c(0.2 / (i + 1) as f64, -0.1);
                }
                w.add(sys.quasi_lax_residual(&y, &zs)?, 1e-6);
            }
        }
    }
    w.done()
}

fn involution() -> Outcome {
    let rs = build_root_system('A', 2)?;
    let mut r = rng(105);
    let (z1, z2, z3) = (c(0.4, 0.3), c(-0.3, 0.5), c(0.6, -0.2));
    let battery = [((z1, 2), (z2, 2)), ((z1, 2), (z2, 3)), ((z1, 3), (z2, 3)), ((z2, 2), (z3, 3)), ((z3, 3), (z1, 3)), ((z1, 3), (z3, 2))];
    let mut w = Worst::new();
    for (name, spec) in families(&rs) {
        let sys = SystemSpec::new(spec)?;
        for _ in 0..3 {
            let xr = project_pi(&rs, &rand_point_j0(&rs, &mut r))?;
            w.add(sys.involution_check(&xr, &battery)?, tol_for(name, 1e-8, 1e-6));
        }
    }
    w.done()
}

fn positions(rs: &RootSystem, q: &[C64]) -> spincm::Result<Vec<C64>> {
    let m = rs.matrix_rep(&rs.cartan_element(q))?;
    Ok((0..rs.matrix_size()).map(|i| m[(i, i)]).collect())
}

fn spinless() -> Outcome {
    let mut w = Worst::new();
    let mut r = rng(106);
    for n in 1..=2 {
        let rs = build_root_system('A', n)?;
        let sys = SystemSpec::new(RMatrixSpec::rational_full(&rs))?;
        for _ in 0..50 {
            let m = rand_c(&mut r, 1.0);
            let q = rand_q(&rs, &mut r);
            let p = rand_vec(&mut r, n, 1.0);
            let x = PhasePoint::new(&rs, q.clone(), p.clone(), dynamics::spinless_xi(&rs, m))?;
            let y = positions(&rs, &q)?;
            let mut want: C64 = p.iter().map(|v| v * v).sum::<C64>() * 0.5;
            for i in 0..=n {
                for j in i + 1..=n {
                    want -= m * m / (y[i] - y[j]).powi(2);
                }
            }
            let got = sys.hamiltonian_reduced(&project_pi(&rs, &x)?)?;
            w.add((got - want).norm() / want.norm().max(1.0), 1e-12);
        }
        let diag: Vec<f64> = (0..=n).map(|i| 1.1 * i as f64).collect();
        let x = PhasePoint::new(&rs, q_from_positions(&rs, &diag), vec![c(0.1, 0.0); n], dynamics::spinless_xi(&rs, c(0.0, 0.4)))?;
        let xr = project_pi(&rs, &x)?;
        let tr = sys.integrate_reduced(&xr, 10.0, 1e-10)?;
        for pt in &tr.points {
            for (a, b) in pt.s.iter().zip(&xr.s) {
                w.add((a - b).norm(), 1e-10);
            }
        }
    }
    w.done()
}

fn gauge() -> Outcome {
    let mut w = Worst::new();
    let mut r = rng(107);
    for n in 1..=3 {
        let rs = build_root_system('A', n)?;
        for _ in 0..50 {
            let x = rand_point_j0(&rs, &mut r);
            let h: Vec<C64> = (0..n).map(|_| rand_c(&mut r, 0.1)).collect();
            let y = torus_action(&rs, &h, &x);
            let (g0, g1) = (gauge_g(&rs, &x.xi)?, gauge_g(&rs, &y.xi)?);
            for i in 0..n {
                w.add((g1[i] - h[i] - g0[i]).norm(), 1e-10);
            }
            let (a, b) = (project_pi(&rs, &x)?, project_pi(&rs, &y)?);
            for (u, v) in a.to_vec().iter().zip(b.to_vec()) {
                w.add((u - v).norm() / u.norm().max(1.0), 1e-10);
            }
        }
    }
    w.done()
}

fn fpbr() -> Outcome {
    let mut w = Worst::new();
    let mut r = rng(108);
    let pairs = [(c(0.4, 0.2), c(-0.3, 0.1)), (c(0.1, -0.5), c(0.6, 0.3)), (c(-0.45, -0.2), c(0.2, 0.25)), (c(0.7, 0.0), c(0.0, 0.6))];
    for n in 1..=2 {
        let rs = build_root_system('A', n)?;
        let sys = SystemSpec::new(RMatrixSpec::rational_full(&rs))?;
        for _ in 0..20 {
            let x = rand_point(&rs, &mut r);
            for &(z, zw) in &pairs {
                w.add(sys.fpbr_residual(&x, z, zw)?, 1e-7);
            }
        }
    }
    w.done()
}

fn special_functions() -> Outcome {
    let mut w = Worst::new();
    for lat in [Lattice::square(), lattice()] {
        let mut r = rng(109);
        let mut n = 0;
        while n < 50 {
            let z = lat.omega1() * r.gen_range(-1.0..1.0) + lat.omega2() * r.gen_range(-1.0..1.0);
            if lat.lattice_distance(z) < 0.2 {
                continue;
            }
            n += 1;
            let d = |h: f64| (lat.sigma(z + h) / lat.sigma(z - h)).ln() / (2.0 * h);
            let zeta = lat.zeta(z)?;
            w.add(((d(5e-5) * 4.0 - d(1e-4)) / 3.0 - zeta).norm() / zeta.norm().max(1.0), 1e-8);
            let dz = |h: f64| -(lat.zeta(z + h).unwrap() - lat.zeta(z - h).unwrap()) / (2.0 * h);
            let wp = lat.wp(z)?;
            w.add(((dz(5e-4) * 4.0 - dz(1e-3)) / 3.0 - wp).norm() / wp.norm().max(1.0), 1e-8);
            let v = lat.omega1() * r.gen_range(-1.0..1.0) + lat.omega2() * r.gen_range(-1.0..1.0);
            if lat.lattice_distance(v) > 0.05 && lat.lattice_distance(v + z) > 0.05 {
                let l1 = lat.l_kernel(v, z)?;
                w.add((l1 - lat.l_kernel(z, v)?).norm() / l1.norm().max(1.0), 1e-12);
            }
        }
    }
    w.done()
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 11] = [
        ("r-matrix axioms", axioms),
        ("CDYBE", cdybe),
        ("mDYBE (c = -1/4)", mdybe),
        ("sl(3) reduced bracket table", sl3_table),
        ("conservation along reduced flows", conservation),
        ("Lax equations", lax),
        ("involution", involution),
        ("spinless recovery", spinless),
        ("gauge map", gauge),
        ("fundamental Poisson bracket relation", fpbr),
        ("special functions", special_functions),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok((ratio, res)) => (ratio < 1.0, format!("worst residual {res:.3e} ({:.1}% of tolerance)", 100.0 * ratio)),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {:>2}. {name}: {detail} [{:.2}s]", i + 1, start.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
